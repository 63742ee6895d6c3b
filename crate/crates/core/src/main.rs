fn main() {
    let code = vibronic::cli::run_command(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
