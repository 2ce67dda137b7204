fn main() {
    std::process::exit(scoresmooth_lab::cli::run_cli(std::env::args_os()));
}
