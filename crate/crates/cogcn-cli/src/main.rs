fn main() {
    std::process::exit(cogcn_cli::run());
}
