fn main() -> std::process::ExitCode {
    gbg::cli::main()
}
