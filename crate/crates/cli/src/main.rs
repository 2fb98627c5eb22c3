fn main() {
    std::process::exit(petition_pulse_cli::run(std::env::args_os()));
}
