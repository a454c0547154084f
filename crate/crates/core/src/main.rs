fn main() {
    std::process::exit(alpha_perc::cli::run(std::env::args_os()));
}
