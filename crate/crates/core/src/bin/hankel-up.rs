fn main() {
    std::process::exit(hankel_up::cli::main())
}
