fn main() {
    std::process::exit(qroute::harness::cli::run(std::env::args_os()));
}
