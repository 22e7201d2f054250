fn main() -> std::process::ExitCode {
    ncphi4::cli::main()
}
