fn main() {
    std::process::exit(flowcat::cli::main_entry())
}
