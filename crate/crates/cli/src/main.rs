fn main() {
    std::process::exit(zhu_cli::main_with(std::env::args_os()));
}
