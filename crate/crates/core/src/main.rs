fn main() {
    std::process::exit(casimir_spectra::cli::run(std::env::args_os()));
}
