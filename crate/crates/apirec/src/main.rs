use clap::Parser;

fn main() {
    let cli = apirec::cli::Cli::parse();
    std::process::exit(apirec::cli::run(cli));
}
