fn main() {
    std::process::exit(crnoma::cli::run(std::env::args_os()));
}
