fn main() {
    std::process::exit(epipolicy_cli::run(std::env::args_os()));
}
