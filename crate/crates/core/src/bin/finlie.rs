fn main() {
    std::process::exit(finlie::cli::main_with_args(std::env::args_os()));
}
