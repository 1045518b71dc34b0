fn main() -> std::process::ExitCode {
    qsurf::harness::cli::main()
}
