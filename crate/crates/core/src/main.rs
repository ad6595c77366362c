fn main() {
    std::process::exit(tempofilt::cli::dispatch(std::env::args_os()));
}
