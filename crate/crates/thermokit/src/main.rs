fn main() {
    std::process::exit(thermokit::cli::run(std::env::args_os()));
}
