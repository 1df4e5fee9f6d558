fn main() {
    std::process::exit(proxymtl::cli::run(std::env::args_os()));
}
