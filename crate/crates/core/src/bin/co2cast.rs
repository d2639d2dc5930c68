fn main() {
    std::process::exit(co2cast::cli::run(std::env::args_os()));
}
