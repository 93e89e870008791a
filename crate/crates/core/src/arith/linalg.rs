//! Exact linear algebra over Q and Z.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Incremental row-echelon basis over Q that also tracks how each stored
/// row was built from the inserted vectors. Used to find the first linear
/// dependency among successive powers of an element.
pub struct DependencyFinder {
    dim: usize,
    rows: Vec<(usize, Vec<BigRational>, Vec<BigRational>)>,
    inserted: usize,
}

impl DependencyFinder {
    pub fn new(dim: usize) -> Self {
        DependencyFinder { dim, rows: Vec::new(), inserted: 0 }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Inserts `v`. If it is dependent on the earlier vectors, returns the
    /// coefficients `c` with `v = Σ c_i v_i` (over the `inserted` earlier ones).
    pub fn insert(&mut self, v: Vec<BigRational>) -> Option<Vec<BigRational>> {
        assert_eq!(v.len(), self.dim);
        let k = self.inserted;
        self.inserted += 1;
        let mut v = v;
        // combo expresses the current v as a combination of inserted vectors
        let mut combo = vec![BigRational::zero(); k + 1];
        combo[k] = BigRational::one();
        for (piv, row, rc) in &self.rows {
            if v[*piv].is_zero() {
                continue;
            }
            let f = v[*piv].clone();
            for (a, b) in v.iter_mut().zip(row) {
                if !b.is_zero() {
                    *a -= &f * b;
                }
            }
            for (a, b) in combo.iter_mut().zip(rc) {
                if !b.is_zero() {
                    *a -= &f * b;
                }
            }
        }
        match v.iter().position(|c| !c.is_zero()) {
            Some(piv) => {
                let inv = v[piv].recip();
                for a in v.iter_mut() {
                    *a *= &inv;
                }
                for a in combo.iter_mut() {
                    *a *= &inv;
                }
                for (_, row, rc) in self.rows.iter_mut() {
                    if !row[piv].is_zero() {
                        let f = row[piv].clone();
                        for (a, b) in row.iter_mut().zip(&v) {
                            *a -= &f * b;
                        }
                        rc.resize(k + 1, BigRational::zero());
                        for (a, b) in rc.iter_mut().zip(&combo) {
                            *a -= &f * b;
                        }
                    }
                }
                self.rows.push((piv, v, combo));
                None
            }
            None => {
                // 0 = combo · inserted, with combo[k] = 1 after normalisation
                let lead = combo[k].clone();
                Some(combo[..k].iter().map(|c| -c / &lead).collect())
            }
        }
    }
}

pub fn rank_rational(rows: &[Vec<BigRational>]) -> usize {
    let dim = rows.first().map_or(0, |r| r.len());
    let mut f = DependencyFinder::new(dim);
    for r in rows {
        f.insert(r.clone());
    }
    f.rank()
}

/// Row-style Hermite normal form of an integer matrix: nonzero rows only,
/// pivots positive and strictly increasing, entries above pivots reduced.
pub fn hermite_normal_form(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut m: Vec<Vec<BigInt>> = rows.iter().filter(|r| r.iter().any(|c| !c.is_zero())).cloned().collect();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut prow = 0;
    let mut pivots = Vec::new();
    for col in 0..ncols {
        if prow >= m.len() {
            break;
        }
        loop {
            // bring the smallest nonzero entry at or below prow into place
            let best = (prow..m.len()).filter(|&r| !m[r][col].is_zero()).min_by_key(|&r| m[r][col].abs());
            let Some(b) = best else { break };
            m.swap(prow, b);
            let mut done = true;
            for r in prow + 1..m.len() {
                if !m[r][col].is_zero() {
                    let q = m[r][col].div_floor(&m[prow][col]);
                    let sub: Vec<BigInt> = m[prow].iter().map(|x| x * &q).collect();
                    for (a, s) in m[r].iter_mut().zip(sub) {
                        *a -= s;
                    }
                    if !m[r][col].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if prow < m.len() && !m[prow][col].is_zero() {
            if m[prow][col].is_negative() {
                for a in m[prow].iter_mut() {
                    *a = -a.clone();
                }
            }
            pivots.push((prow, col));
            prow += 1;
        }
    }
    m.truncate(prow);
    for &(r, c) in &pivots {
        for above in 0..r {
            let q = m[above][c].div_floor(&m[r][c]);
            if !q.is_zero() {
                let sub: Vec<BigInt> = m[r].iter().map(|x| x * &q).collect();
                for (a, s) in m[above].iter_mut().zip(sub) {
                    *a -= s;
                }
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ring::rat;

    #[test]
    fn dependency() {
        let mut f = DependencyFinder::new(2);
        assert!(f.insert(vec![rat(1), rat(0)]).is_none());
        assert!(f.insert(vec![rat(1), rat(1)]).is_none());
        let c = f.insert(vec![rat(3), rat(2)]).unwrap();
        assert_eq!(c, vec![rat(1), rat(2)]);
    }

    #[test]
    fn hnf() {
        let b = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        let h = hermite_normal_form(&[b(&[2, 4]), b(&[3, 5]), b(&[0, 0])]);
        assert_eq!(h, vec![b(&[1, 1]), b(&[0, 2])]);
        let h = hermite_normal_form(&[b(&[1, -1, 0]), b(&[0, 1, -1]), b(&[1, 0, -1])]);
        assert_eq!(h.len(), 2);
    }
}
