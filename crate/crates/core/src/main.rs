fn main() {
    std::process::exit(bh_lab::cli::run(std::env::args_os()));
}
