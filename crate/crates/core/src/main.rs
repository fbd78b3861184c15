fn main() {
    std::process::exit(catdistort::cli::run(std::env::args_os()));
}
