use clap::Parser;

fn main() {
    let cli = copmix_cli::Cli::parse();
    match copmix_cli::run(&cli) {
        Ok(outcome) => {
            if outcome.stdout.ends_with('\n') {
                print!("{}", outcome.stdout);
            } else {
                println!("{}", outcome.stdout);
            }
            std::process::exit(if outcome.all_ok { 0 } else { 1 });
        }
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(copmix_cli::exit_code_for(&err));
        }
    }
}
