fn main() {
    std::process::exit(lookdown::cli::main_with_args(std::env::args_os()));
}
