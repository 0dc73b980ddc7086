fn main() {
    std::process::exit(rydberg_messenger::cli::main_with(std::env::args_os()));
}
