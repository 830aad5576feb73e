use std::io::{stderr, stdout};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let code = agc_cli::run_cli(&args, &mut stdout().lock(), &mut stderr().lock());
    std::process::exit(code);
}
