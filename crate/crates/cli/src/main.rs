fn main() {
    std::process::exit(deltalimit_cli::run(std::env::args_os()));
}
