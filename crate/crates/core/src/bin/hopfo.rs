fn main() {
    std::process::exit(hopfo::cli::main_with(std::env::args_os()));
}
