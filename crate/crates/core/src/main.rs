fn main() {
    std::process::exit(detcal::cli::run(std::env::args_os()));
}
