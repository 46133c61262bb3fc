fn main() {
    std::process::exit(iso_probe::cli::cli_main(std::env::args()));
}
