fn main() {
    std::process::exit(superkoszul::cli::main_with_args(std::env::args_os()));
}
