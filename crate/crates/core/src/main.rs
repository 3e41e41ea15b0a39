fn main() {
    std::process::exit(egocircles::cli::run(std::env::args_os()));
}
