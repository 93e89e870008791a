use base64::engine::general_purpose::URL_SAFE_NO_PAD;
use base64::Engine;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclotomic::RootOfUnityTuple;

/// Multisets of size `n` over `μ_N` as nondecreasing exponent vectors, in
/// lexicographic order.
#[derive(Debug, Clone)]
pub struct MultisetIter {
    order: u64,
    next: Option<Vec<u64>>,
}

impl MultisetIter {
    pub fn new(n: usize, order: u64) -> Self {
        MultisetIter { order, next: (n > 0 && order > 0).then(|| vec![0; n]) }
    }
}

impl Iterator for MultisetIter {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let cur = self.next.take()?;
        let mut nxt = cur.clone();
        if let Some(i) = (0..nxt.len()).rev().find(|&i| nxt[i] + 1 < self.order) {
            let v = nxt[i] + 1;
            for x in &mut nxt[i..] {
                *x = v;
            }
            self.next = Some(nxt);
        }
        Some(cur)
    }
}

/// Tuples of `n` roots of unity with common order `N_max` (so every order
/// dividing `N_max` occurs), one per multiset. With `all_orders`, the union
/// over exact tuple orders `1..=N_max`.
pub fn enumerate_tuples(n: usize, n_max: u64, skip_vanishing_subsums: bool, all_orders: bool) -> impl Iterator<Item = RootOfUnityTuple> {
    let orders: Vec<u64> = if all_orders { (1..=n_max).collect() } else { vec![n_max] };
    orders
        .into_iter()
        .flat_map(move |order| {
            MultisetIter::new(n, order).filter_map(move |e| {
                let t = RootOfUnityTuple { n, order, exponents: e };
                // with all orders, keep each multiset only at its exact order
                if all_orders && t.normalized().order != order {
                    return None;
                }
                Some(t)
            })
        })
        .filter(move |t| !skip_vanishing_subsums || !t.has_vanishing_subsum().unwrap_or(true))
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TokenError {
    #[error("malformed resume token")]
    Malformed,
    #[error("resume token belongs to a different configuration")]
    ConfigMismatch,
}

/// Position in the tuple stream, bound to a configuration digest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResumeToken {
    pub config: String,
    pub next: u64,
}

impl ResumeToken {
    pub fn encode(&self) -> String {
        URL_SAFE_NO_PAD.encode(serde_json::to_vec(self).unwrap())
    }

    pub fn decode(s: &str, config: &str) -> Result<Self, TokenError> {
        let bytes = URL_SAFE_NO_PAD.decode(s.trim()).map_err(|_| TokenError::Malformed)?;
        let t: ResumeToken = serde_json::from_slice(&bytes).map_err(|_| TokenError::Malformed)?;
        if t.config != config {
            return Err(TokenError::ConfigMismatch);
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let v: Vec<_> = enumerate_tuples(1, 2, false, false).map(|t| t.exponents).collect();
        assert_eq!(v, vec![vec![0], vec![1]]);
        let v: Vec<_> = enumerate_tuples(2, 2, false, false).map(|t| t.exponents).collect();
        assert_eq!(v, vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
        let v: Vec<_> = enumerate_tuples(2, 2, true, false).map(|t| t.exponents).collect();
        assert_eq!(v, vec![vec![0, 0], vec![1, 1]]);
        assert_eq!(enumerate_tuples(2, 4, false, false).count(), 10);
        // exact orders 1..4: φ(1) + φ(2) + φ(3) + φ(4)
        assert_eq!(enumerate_tuples(1, 4, false, true).count(), 6);
        // pairs of exact order ≤ 4: 10 over μ_4 plus the 5 over μ_3 other than {1, 1}
        assert_eq!(enumerate_tuples(2, 4, false, true).count(), 15);
    }

    #[test]
    fn token_roundtrip() {
        let t = ResumeToken { config: "abc".into(), next: 42 };
        assert_eq!(ResumeToken::decode(&t.encode(), "abc").unwrap(), t);
        assert_eq!(ResumeToken::decode(&t.encode(), "abd").unwrap_err(), TokenError::ConfigMismatch);
        assert_eq!(ResumeToken::decode("!!", "abc").unwrap_err(), TokenError::Malformed);
    }
}
