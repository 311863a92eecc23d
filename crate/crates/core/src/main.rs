fn main() {
    std::process::exit(sector_core::cli::run(std::env::args_os()));
}
