use clap::Parser;

fn main() {
    let cli = dc1lab_cli::Cli::parse();
    std::process::exit(dc1lab_cli::run(cli));
}
