fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(qdspin::cli::run(argv));
}
