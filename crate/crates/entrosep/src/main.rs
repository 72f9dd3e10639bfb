fn main() {
    std::process::exit(entrosep::cli::run());
}
