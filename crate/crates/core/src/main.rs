fn main() {
    std::process::exit(exact_esop::cli::run(std::env::args_os()));
}
