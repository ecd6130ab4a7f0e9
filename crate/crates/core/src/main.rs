fn main() {
    std::process::exit(embias::cli::dispatch(std::env::args_os()));
}
