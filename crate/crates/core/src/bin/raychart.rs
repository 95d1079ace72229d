fn main() {
    std::process::exit(raychart::cli::run(std::env::args().skip(1)));
}
