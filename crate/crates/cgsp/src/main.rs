fn main() {
    std::process::exit(cgsp::cli::run(std::env::args_os()));
}
