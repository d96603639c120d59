fn main() {
    std::process::exit(tasnif_cli::run(std::env::args_os()));
}
