fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or(mcsda::cli::LOG_ENV, "warn"))
        .init();
    std::process::exit(mcsda::cli::run(std::env::args_os()));
}
