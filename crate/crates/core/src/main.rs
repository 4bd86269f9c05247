fn main() {
    std::process::exit(vqubits::cli::run(std::env::args_os()));
}
