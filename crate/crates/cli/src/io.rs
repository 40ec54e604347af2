use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::Context;
use serde::de::DeserializeOwned;
use serde::Serialize;

use lagdelta::CubicForm;

pub enum Outcome {
    Success,
    VerificationFailed,
}

impl Outcome {
    pub fn from_ok(ok: bool) -> Self {
        if ok {
            Outcome::Success
        } else {
            Outcome::VerificationFailed
        }
    }
}

pub fn read_file(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = read_file(path)?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn load_tensor(path: &Path) -> anyhow::Result<CubicForm> {
    let text = read_file(path)?;
    CubicForm::from_json_str(&text).with_context(|| format!("loading tensor {}", path.display()))
}

pub fn print_json(value: &serde_json::Value) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

pub fn print_csv<T: Serialize>(rows: &[T]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(std::io::stdout().lock());
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_error(kind: &str, message: &str) {
    let obj = serde_json::json!({ "error": { "kind": kind, "message": message } });
    eprintln!("{obj}");
}

/// Variant name of the innermost library error, or a coarse category.
fn error_kind(e: &anyhow::Error) -> String {
    for cause in e.chain() {
        if let Some(le) = cause.downcast_ref::<lagdelta::Error>() {
            let dbg = format!("{le:?}");
            let end = dbg.find([' ', '(', '{']).unwrap_or(dbg.len());
            return dbg[..end].to_string();
        }
        if let Some(je) = cause.downcast_ref::<serde_json::Error>() {
            return if je.is_io() { "Io" } else { "Parse" }.into();
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return "Io".into();
        }
    }
    "Input".into()
}

/// Output closed early by the reader, e.g. piped into `head`.
pub fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<std::io::Error>()
            .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
            || c.downcast_ref::<serde_json::Error>()
                .and_then(|j| j.io_error_kind())
                .is_some_and(|k| k == std::io::ErrorKind::BrokenPipe)
            || c.downcast_ref::<csv::Error>().is_some_and(|ce| {
                matches!(ce.kind(), csv::ErrorKind::Io(io) if io.kind() == std::io::ErrorKind::BrokenPipe)
            })
    })
}

pub fn report_error(e: &anyhow::Error) {
    emit_error(&error_kind(e), &format!("{e:#}"));
}
