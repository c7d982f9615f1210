use clap::Parser;
use ltree_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    if let Err(e) = run(&cli, &mut stdout.lock()) {
        eprintln!("ltree: {e}");
        std::process::exit(e.code);
    }
}
