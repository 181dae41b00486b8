fn main() {
    std::process::exit(levelcut::cli::run(std::env::args_os()));
}
