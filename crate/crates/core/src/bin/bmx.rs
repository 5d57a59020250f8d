fn main() {
    std::process::exit(bmx::cli_io::run_cli(std::env::args_os()));
}
