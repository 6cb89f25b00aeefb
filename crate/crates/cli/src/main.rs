fn main() {
    std::process::exit(alpha_bandits_cli::run_cli(std::env::args_os()));
}
