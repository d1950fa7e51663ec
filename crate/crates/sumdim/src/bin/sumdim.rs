fn main() {
    std::process::exit(sumdim::cli::run(std::env::args_os()));
}
