fn main() {
    std::process::exit(domino_cyl::cli::run(std::env::args_os()));
}
