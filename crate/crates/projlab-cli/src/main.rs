fn main() {
    std::process::exit(projlab_cli::run(std::env::args_os()));
}
