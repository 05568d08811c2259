use clap::Parser;
use measure_control::cli::{load_config, run, CliArgs};

fn main() {
    let args = CliArgs::parse();
    let code = match load_config(&args) {
        Ok(config) => run(&config),
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    };
    std::process::exit(code);
}
