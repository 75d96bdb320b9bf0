fn main() {
    std::process::exit(scoreprior_cli::main_with(std::env::args_os()));
}
