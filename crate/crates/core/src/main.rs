fn main() {
    std::process::exit(delayed_pa::cli::main_with_args(std::env::args_os()));
}
