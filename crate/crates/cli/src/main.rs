fn main() {
    std::process::exit(predint::run(std::env::args_os()));
}
