fn main() {
    std::process::exit(hstoric::cli::run_command(std::env::args_os()));
}
