fn main() {
    std::process::exit(weylsym::cli::run(std::env::args_os()));
}
