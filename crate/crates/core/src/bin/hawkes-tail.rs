fn main() {
    std::process::exit(hawkes_tails::cli::run(std::env::args_os()));
}
