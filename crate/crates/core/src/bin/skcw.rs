fn main() {
    std::process::exit(skcw::cli::parse_and_dispatch(std::env::args_os()));
}
