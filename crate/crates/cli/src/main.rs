fn main() {
    std::process::exit(ssr_cli::run(std::env::args_os()));
}
