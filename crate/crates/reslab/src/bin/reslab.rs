fn main() {
    std::process::exit(reslab::cli::main_with_args(std::env::args_os()));
}
