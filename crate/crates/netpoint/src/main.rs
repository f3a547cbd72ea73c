fn main() {
    std::process::exit(netpoint::cli::run());
}
