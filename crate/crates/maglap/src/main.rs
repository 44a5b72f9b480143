fn main() {
    std::process::exit(maglap::cli::run());
}
