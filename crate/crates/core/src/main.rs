fn main() {
    std::process::exit(bigdiv::cli::dispatch(std::env::args_os()));
}
