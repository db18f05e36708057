fn main() {
    std::process::exit(qnet_cli::run(std::env::args_os()));
}
