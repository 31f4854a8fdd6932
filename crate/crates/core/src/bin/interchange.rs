fn main() {
    std::process::exit(interchange::cli::main_with_args(std::env::args_os()));
}
