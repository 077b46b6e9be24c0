fn main() {
    std::process::exit(thinset_lab::cli::execute(std::env::args_os()));
}
