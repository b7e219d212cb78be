fn main() {
    std::process::exit(homcircuits::cli::run(std::env::args_os()));
}
