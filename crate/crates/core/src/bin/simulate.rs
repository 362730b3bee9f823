fn main() {
    let workers = std::env::var("SIM_WORKERS").ok();
    std::process::exit(chemotaxis::cli::main_with(std::env::args_os(), workers.as_deref()));
}
