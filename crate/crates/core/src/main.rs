fn main() -> std::process::ExitCode {
    beliefcast::gateway::cli::main()
}
