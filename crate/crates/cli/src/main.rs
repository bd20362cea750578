use clap::Parser;

fn main() {
    let cli = icard_cli::Cli::parse();
    let out = icard_cli::run(&cli);
    let text = out.render(cli.json);
    if out.code >= 2 {
        eprintln!("{text}");
    } else {
        println!("{text}");
    }
    std::process::exit(out.code);
}
