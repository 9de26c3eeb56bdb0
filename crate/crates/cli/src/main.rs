fn main() {
    std::process::exit(ptnlse_cli::run(std::env::args_os()));
}
