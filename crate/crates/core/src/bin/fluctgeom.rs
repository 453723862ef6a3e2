fn main() {
    std::process::exit(fluctgeom::cli::main_with_args(std::env::args_os()));
}
