fn main() {
    std::process::exit(netshare::cli::main_with_args(std::env::args_os()));
}
