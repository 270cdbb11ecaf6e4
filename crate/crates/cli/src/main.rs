fn main() {
    std::process::exit(indiff_cli::main_exit_code());
}
