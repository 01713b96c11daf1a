fn main() {
    std::process::exit(blockalign::cli::run_cli(std::env::args_os()));
}
