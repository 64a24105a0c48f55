use clap::Parser;

fn main() {
    let cli = cli::Cli::parse();
    std::process::exit(cli::execute(&cli));
}
