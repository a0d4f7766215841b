fn main() {
    std::process::exit(iso_bergman::cli::main_with_args(std::env::args_os()));
}
