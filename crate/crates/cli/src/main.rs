fn main() -> std::process::ExitCode {
    nsrg_cli::run_cli()
}
