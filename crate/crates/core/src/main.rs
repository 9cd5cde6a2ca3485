fn main() {
    std::process::exit(bellmono::cli::run(std::env::args()).code());
}
