use clap::Parser;

fn main() {
    let cli = ifsmetric::cli::Cli::parse();
    std::process::exit(ifsmetric::cli::run(&cli));
}
