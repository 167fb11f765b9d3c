fn main() {
    std::process::exit(resolvent_lab_cli::dispatch(std::env::args_os()));
}
