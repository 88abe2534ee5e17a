fn main() {
    std::process::exit(mbl::cli::run_from(std::env::args_os()));
}
