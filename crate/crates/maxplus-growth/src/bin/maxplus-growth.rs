fn main() {
    std::process::exit(maxplus_growth::cli::run());
}
