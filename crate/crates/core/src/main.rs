fn main() {
    std::process::exit(zpd::cli::run(std::env::args_os()));
}
