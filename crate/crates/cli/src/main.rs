fn main() {
    std::process::exit(disclination_cli::app::run(std::env::args_os()));
}
