fn main() {
    std::process::exit(fermisig::cli::main_with_args(std::env::args_os()));
}
