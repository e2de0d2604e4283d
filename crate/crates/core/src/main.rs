fn main() {
    std::process::exit(lexicap::cli::run());
}
