fn main() {
    std::process::exit(hfgauge::cli::main_with_args(std::env::args_os()));
}
