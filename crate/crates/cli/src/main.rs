fn main() {
    std::process::exit(virasoro_cli::run(std::env::args_os()));
}
