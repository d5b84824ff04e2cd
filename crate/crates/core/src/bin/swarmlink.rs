fn main() -> std::process::ExitCode {
    swarmlink::cli::main()
}
