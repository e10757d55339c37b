fn main() {
    std::process::exit(rcar::cli::run(std::env::args_os()));
}
