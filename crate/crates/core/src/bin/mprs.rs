fn main() {
    std::process::exit(mprs::cli::main_with_args(std::env::args_os()));
}
