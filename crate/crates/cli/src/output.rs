// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const SCHEMA: &str = "1";

#[derive(Serialize)]
struct Envelope<'a, T> {
    schema: &'static str,
    command: &'static str,
    #[serde(flatten)]
    body: &'a T,
}

fn write_to(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> CliResult<()> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|source| CliError::Write {
                path: p.to_path_buf(),
                source,
            })?;
            let mut w = BufWriter::new(file);
            f(&mut w).and_then(|_| w.flush()).map_err(|source| CliError::Write {
                path: p.to_path_buf(),
                source,
            })
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            f(&mut w).and_then(|_| w.flush()).map_err(CliError::Stdout)
        }
    }
}

/// Pretty JSON with the schema and command fields first.
pub fn emit_json<T: Serialize>(command: &'static str, body: &T, path: Option<&Path>) -> CliResult<()> {
    let text = serde_json::to_string_pretty(&Envelope {
        schema: SCHEMA,
        command,
        body,
    })
    .expect("report types serialize without failure");
    write_to(path, |w| writeln!(w, "{text}"))
}

pub fn emit_text(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> CliResult<()> {
    write_to(path, f)
}
