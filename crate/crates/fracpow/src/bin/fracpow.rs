fn main() {
    std::process::exit(fracpow::cli::run());
}
