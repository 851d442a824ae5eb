fn main() {
    std::process::exit(ptr_rules::cli::run(std::env::args_os()));
}
