fn main() {
    std::process::exit(edgetok_cli::commands::main_with_args(std::env::args_os()));
}
