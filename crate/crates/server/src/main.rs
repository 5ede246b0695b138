use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use tweetminer_server::cli::{run, Cli, Outcome};
use tweetminer_server::http;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|outcome| match outcome {
        Outcome::Print(text) => {
            // A closed pipe (`| head`) is not an error worth reporting.
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            Ok(())
        }
        Outcome::Serve(snapshot, addr) => {
            let runtime = tokio::runtime::Runtime::new().expect("tokio runtime");
            eprintln!("listening on http://{addr}");
            runtime.block_on(http::serve(*snapshot, addr))
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", serde_json::to_string(&err).expect("error serializes"));
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
