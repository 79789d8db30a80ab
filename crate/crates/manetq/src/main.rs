fn main() {
    std::process::exit(manetq::cli::run(std::env::args_os()));
}
