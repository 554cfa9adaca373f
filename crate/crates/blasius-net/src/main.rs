fn main() {
    std::process::exit(blasius_net::cli::run(std::env::args_os()));
}
