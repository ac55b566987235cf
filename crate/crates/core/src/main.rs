fn main() {
    std::process::exit(goldweight::cli::run(std::env::args_os()));
}
