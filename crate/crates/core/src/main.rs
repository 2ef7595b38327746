fn main() {
    std::process::exit(gamedyn::cli::main_with_args(std::env::args_os()));
}
