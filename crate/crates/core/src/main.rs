use clap::error::ErrorKind;
use clap::Parser;

use padic_hc::cli::{self, Cli};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let ok = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            // structural argument errors map to the bad-input exit code
            std::process::exit(if ok { 0 } else { 4 });
        }
    };
    std::process::exit(cli::run(cli));
}
