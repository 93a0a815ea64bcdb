fn main() {
    std::process::exit(padeclust_cli::main_with(std::env::args_os()));
}
