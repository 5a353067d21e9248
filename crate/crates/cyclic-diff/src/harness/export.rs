//! Deterministic CSV and JSON export. All floats are written as
//! 17-significant-digit decimals, which round-trip 64-bit values exactly.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use super::RunRecord;
use crate::error::{Error, Result};

/// 17 significant digits: one leading digit plus 16 after the point.
fn fmt_f64(value: f64) -> String {
    format!("{value:.16e}")
}

pub(super) fn write_csv(record: &RunRecord, path: &Path) -> Result<()> {
    let d = record.config.d;
    let mut out = String::new();
    out.push_str("t,label");
    for a in 0..d {
        out.push_str(&format!(",axis{a}"));
    }
    out.push_str(",logmag\n");
    for snap in &record.snapshots {
        for label in 0..record.config.n {
            out.push_str(&format!("{},{label}", snap.t));
            for a in 0..d {
                out.push(',');
                out.push_str(&fmt_f64(snap.coords[label * d + a]));
            }
            out.push(',');
            out.push_str(&fmt_f64(snap.logmag));
            out.push('\n');
        }
    }
    write_file(path, out.as_bytes())
}

/// JSON formatter that emits every f64 in scientific notation with 17
/// significant digits instead of the default shortest representation.
struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{value:.16e}")
    }
}

pub(super) fn to_json_string(record: &RunRecord) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    record
        .serialize(&mut ser)
        .map_err(|e| Error::JsonEncode(e.to_string()))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::JsonEncode(e.to_string()))
}

pub(super) fn write_json(record: &RunRecord, path: &Path) -> Result<()> {
    let body = to_json_string(record)?;
    write_file(path, body.as_bytes())
}

pub(super) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
