fn main() {
    std::process::exit(modlab::cli::main_from(std::env::args_os()));
}
