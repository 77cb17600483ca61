fn main() {
    std::process::exit(wsupport::cli::main_with_args(std::env::args_os()));
}
