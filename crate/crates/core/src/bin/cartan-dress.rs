fn main() {
    std::process::exit(cartan_dress::cli::main_with(std::env::args_os()));
}
