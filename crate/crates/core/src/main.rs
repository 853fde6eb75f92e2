fn main() {
    let code = zssusy::cli::run(std::env::args().collect());
    std::process::exit(code);
}
