fn main() {
    std::process::exit(treerep::cli::main_with_args(std::env::args_os()));
}
