use clap::Parser;

fn main() {
    let cli = copolymer_cli::Cli::parse();
    std::process::exit(copolymer_cli::run(&cli));
}
