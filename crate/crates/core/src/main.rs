fn main() {
    std::process::exit(speclocate::cli::main());
}
