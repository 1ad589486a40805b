fn main() {
    std::process::exit(gradtag_cli::run(std::env::args_os()));
}
