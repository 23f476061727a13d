fn main() {
    std::process::exit(fockbench::cli::main_with_args(std::env::args_os()));
}
