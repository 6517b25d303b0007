fn main() {
    std::process::exit(gpcq_cli::run(std::env::args_os()));
}
