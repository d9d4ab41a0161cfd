fn main() {
    std::process::exit(sldlab::cli::run(std::env::args_os()));
}
