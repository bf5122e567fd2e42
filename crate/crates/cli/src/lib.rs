//! Command-line front end. [`run`] is the whole program; the `molion`
//! binary only wires it to the process streams.

pub mod args;
pub mod commands;
pub mod format;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

use args::{Cli, Flags};
use commands::Failure;

fn load_config(flags: &Flags) -> Result<Flags, Failure> {
    let Some(path) = &flags.config else {
        return Ok(Flags::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("bad config {}: {e}", path.display())))
}

fn emit<W: Write>(flags: &Flags, data: &[u8], out: &mut W) -> Result<(), Failure> {
    match &flags.out {
        Some(path) => {
            std::fs::write(path, data).map_err(|e| Failure::Physics(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            out.write_all(data)?;
            out.flush()?;
            Ok(())
        }
    }
}

/// Runs one invocation. `argv` includes the program name. Data goes to
/// `out` (or the `--out` file), diagnostics to `err`. Returns the exit code:
/// 0 on success, 1 for physics or regime errors, 2 for usage errors.
pub fn run<I, T, O, E>(argv: I, out: &mut O, err: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    O: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().ansi().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return e.exit_code();
        }
    };
    let result = load_config(&cli.flags).and_then(|file| {
        let flags = cli.flags.or(file);
        let mut data = Vec::new();
        let outcome = commands::run(cli.command, flags.clone(), &mut data, err);
        if !data.is_empty() {
            emit(&flags, &data, out)?;
        }
        outcome
    });
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "molion: {}", f.message());
            f.exit_code()
        }
    }
}
