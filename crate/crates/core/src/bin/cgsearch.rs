fn main() {
    std::process::exit(cgsearch::cli::cli_main());
}
