fn main() {
    std::process::exit(rydspec::cli::main_with_args(std::env::args_os()));
}
