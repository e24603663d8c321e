fn main() {
    std::process::exit(qgrape_cli::cli::run(std::env::args_os()));
}
