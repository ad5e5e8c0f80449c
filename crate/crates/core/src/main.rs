fn main() {
    std::process::exit(squeezebeam::cli::main_with_args(std::env::args_os()));
}
