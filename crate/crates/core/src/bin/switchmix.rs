fn main() {
    std::process::exit(switchmix::cli::run(std::env::args_os()));
}
