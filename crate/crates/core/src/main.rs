fn main() {
    std::process::exit(cyclotorsion::cli::dispatch(std::env::args_os()));
}
