fn main() {
    std::process::exit(shc::cli::run(std::env::args_os()));
}
