fn main() {
    std::process::exit(kinkflow::cli::main_with_args(std::env::args_os()));
}
