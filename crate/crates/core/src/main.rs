fn main() {
    std::process::exit(qmf::cli::run_from(std::env::args_os()));
}
