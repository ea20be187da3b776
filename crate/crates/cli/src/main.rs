use clap::Parser;

fn main() {
    let cli = treeshift_cli::Cli::parse();
    let code = treeshift_cli::run(cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
