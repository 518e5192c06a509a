fn main() {
    std::process::exit(roughpower::cli::run(std::env::args_os()));
}
