fn main() {
    std::process::exit(equichan_core::cli::run(std::env::args_os()));
}
