fn main() {
    std::process::exit(anharmonic::cli::run(std::env::args_os()));
}
