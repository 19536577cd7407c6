use clap::Parser;
use turan_cli::{execute, Cli};

fn main() {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: cannot configure thread pool: {e}");
            std::process::exit(2);
        }
    }
    let outcome = execute(&cli);
    if !outcome.stdout.is_empty() {
        print!("{}", outcome.stdout);
    }
    if let Some(msg) = &outcome.stderr {
        eprintln!("error: {msg}");
    }
    std::process::exit(outcome.code);
}
