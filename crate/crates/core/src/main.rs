fn main() {
    std::process::exit(reprbench::cli::main_with_args(std::env::args_os()));
}
