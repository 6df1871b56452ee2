use clap::Parser;

fn main() {
    let cli = qchan_cli::Cli::parse();
    if let Err(err) = qchan_cli::run(&cli) {
        eprintln!("qchan: {err}");
        std::process::exit(err.exit_code());
    }
}
