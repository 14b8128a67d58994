fn main() {
    std::process::exit(plaque_channel::cli::run(std::env::args_os()));
}
