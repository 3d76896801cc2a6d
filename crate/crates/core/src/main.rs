use clap::Parser;

fn main() {
    let cli = kicktop::cli::Cli::parse();
    if let Err(e) = kicktop::cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
