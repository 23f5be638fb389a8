fn main() {
    std::process::exit(meancurv::cli::run(std::env::args_os()));
}
