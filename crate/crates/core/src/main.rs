fn main() {
    std::process::exit(beamcov::cli::run(std::env::args_os()));
}
