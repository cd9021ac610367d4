fn main() {
    std::process::exit(hermitian_covers::cli::run());
}
