fn main() {
    std::process::exit(eit_engine::cli::run(std::env::args()));
}
