fn main() {
    std::process::exit(nbesov_cli::run(std::env::args_os()));
}
