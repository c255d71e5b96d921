fn main() {
    std::process::exit(alpha_duplex::cli::main());
}
