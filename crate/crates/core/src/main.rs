fn main() {
    std::process::exit(endpoint_select::cli::main_with_args(std::env::args_os()));
}
