fn main() {
    std::process::exit(coopnav::cli::run_cli(std::env::args_os()));
}
