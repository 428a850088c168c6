//! Tab-separated snippet records: `url<TAB>domain<TAB>text`, one per line.
//!
//! Tabs, newlines, carriage returns and backslashes inside a field are
//! written as `\t`, `\n`, `\r` and `\\`.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// A search hit as stored in a corpus or cache file.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SnippetRecord {
    pub url: String,
    pub domain: String,
    pub text: String,
}

impl SnippetRecord {
    pub fn new(url: impl Into<String>, domain: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            url: url.into(),
            domain: domain.into(),
            text: text.into(),
        }
    }
}

pub fn escape_field(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

pub fn unescape_field(s: &str) -> std::result::Result<String, String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some(other) => return Err(format!("unknown escape \\{other}")),
            None => return Err("dangling backslash".to_string()),
        }
    }
    Ok(out)
}

pub fn format_record(r: &SnippetRecord) -> String {
    format!(
        "{}\t{}\t{}",
        escape_field(&r.url),
        escape_field(&r.domain),
        escape_field(&r.text)
    )
}

pub fn parse_record(line: &str, line_no: usize) -> Result<SnippetRecord> {
    let line = line.strip_suffix('\r').unwrap_or(line);
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 3 {
        return Err(Error::parse(
            line_no,
            format!("expected 3 tab-separated fields, found {}", fields.len()),
        ));
    }
    let field = |i: usize| unescape_field(fields[i]).map_err(|m| Error::parse(line_no, m));
    let record = SnippetRecord {
        url: field(0)?,
        domain: field(1)?.to_lowercase(),
        text: field(2)?,
    };
    if record.domain.is_empty() {
        return Err(Error::parse(line_no, "empty domain"));
    }
    Ok(record)
}

/// Reads records, skipping blank lines. Line numbers in errors are 1-based
/// and count from `first_line`.
pub fn read_records<R: BufRead>(reader: R, first_line: usize) -> Result<Vec<SnippetRecord>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = first_line + i;
        let line = line.map_err(|e| match e.kind() {
            std::io::ErrorKind::InvalidData => Error::parse(line_no, "invalid UTF-8"),
            _ => Error::Io(e),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_record(&line, line_no)?);
    }
    Ok(out)
}

pub fn write_records<W: Write>(mut w: W, records: &[SnippetRecord]) -> Result<()> {
    for r in records {
        writeln!(w, "{}", format_record(r))?;
    }
    Ok(())
}
