use clap::Parser;

fn main() {
    let cli = ncmd::cli::Cli::parse();
    if let Err(e) = ncmd::cli::run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
