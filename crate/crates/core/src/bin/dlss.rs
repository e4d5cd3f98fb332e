fn main() {
    env_logger::init();
    std::process::exit(dlss::cli::parse_and_dispatch(std::env::args_os()));
}
