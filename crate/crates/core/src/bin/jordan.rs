fn main() {
    std::process::exit(jordan_core::cli::main_with_args(std::env::args_os()));
}
