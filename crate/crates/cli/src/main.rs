fn main() {
    std::process::exit(xilab_cli::run(std::env::args_os()));
}
