//! Report emission: sinks, JSON envelopes and schema-stamped CSV.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::{CliError, RunConfig, SCHEMA_VERSION};

/// Uniform JSON envelope. The payload is flattened so its fields appear
/// next to the schema version and command name.
#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    #[serde(flatten)]
    payload: T,
}

pub fn open_sink(cfg: &RunConfig) -> Result<Box<dyn Write>, CliError> {
    match &cfg.out {
        None => Ok(Box::new(std::io::stdout().lock())),
        Some(path) => {
            let file = File::create(path).map_err(|e| {
                CliError::Domain(format!("cannot create output file {}: {e}", path.display()))
            })?;
            Ok(Box::new(file))
        }
    }
}

pub fn open_path(path: &Path) -> Result<Box<dyn Write>, CliError> {
    let file = File::create(path).map_err(|e| {
        CliError::Domain(format!("cannot create output file {}: {e}", path.display()))
    })?;
    Ok(Box::new(file))
}

/// Write one pretty-printed JSON report with the schema envelope.
pub fn emit_json<T: Serialize>(cfg: &RunConfig, command: &str, payload: T) -> Result<(), CliError> {
    let mut sink = open_sink(cfg)?;
    let envelope = Envelope {
        schema_version: SCHEMA_VERSION,
        command,
        payload,
    };
    let text = serde_json::to_string_pretty(&envelope)
        .map_err(|e| CliError::Domain(format!("serialization failure: {e}")))?;
    writeln!(sink, "{text}")?;
    Ok(())
}

/// Begin a CSV report on the given sink: schema comment line first, then a
/// writer for the record rows.
pub fn csv_writer(mut sink: Box<dyn Write>) -> Result<csv::Writer<Box<dyn Write>>, CliError> {
    writeln!(sink, "# schema-version: {SCHEMA_VERSION}")?;
    Ok(csv::Writer::from_writer(sink))
}

pub fn finish_csv(writer: csv::Writer<Box<dyn Write>>) -> Result<(), CliError> {
    writer
        .into_inner()
        .map_err(|e| CliError::Domain(format!("CSV flush failure: {e}")))?
        .flush()?;
    Ok(())
}
