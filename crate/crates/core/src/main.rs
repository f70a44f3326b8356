fn main() {
    std::process::exit(d4verify::cli::main_with_args(std::env::args_os()));
}
