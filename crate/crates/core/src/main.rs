fn main() {
    std::process::exit(erelax::cli::run(std::env::args_os()));
}
