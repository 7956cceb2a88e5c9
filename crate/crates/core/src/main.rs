use clap::Parser;

fn main() {
    std::process::exit(lifshitz::cli::main_with(lifshitz::cli::Cli::parse()));
}
