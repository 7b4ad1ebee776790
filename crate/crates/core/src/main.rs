fn main() {
    std::process::exit(fockbloch::cli::main_with_args(std::env::args_os()));
}
