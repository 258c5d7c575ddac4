use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use super::{Alignment, Alphabet, Sequence, GAP};
use crate::{Error, Result};

const CLUSTAL_WIDTH: usize = 60;
const CLUSTAL_HEADER: &str = "CLUSTAL multiple sequence alignment";

/// Alignment output formats.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    AlignedFasta,
    Clustal,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "afasta" | "fasta" | "aligned-fasta" => Ok(Self::AlignedFasta),
            "clustal" | "clustal-like" | "aln" => Ok(Self::Clustal),
            other => Err(Error::Parse(format!("unknown format `{other}`"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::AlignedFasta => "afasta",
            Self::Clustal => "clustal",
        })
    }
}

struct Record {
    id: String,
    body: Vec<u8>,
}

fn fasta_records(text: &str) -> Result<Vec<Record>> {
    let mut records: Vec<Record> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('>') {
            let id = header.split_whitespace().next().unwrap_or("").to_string();
            if id.is_empty() {
                return Err(Error::Parse(format!("line {}: header without an id", lineno + 1)));
            }
            records.push(Record { id, body: Vec::new() });
        } else {
            let rec = records
                .last_mut()
                .ok_or_else(|| Error::Parse(format!("line {}: sequence data before the first header", lineno + 1)))?;
            rec.body
                .extend(line.bytes().filter(|b| !b.is_ascii_whitespace()).map(|b| b.to_ascii_uppercase()));
        }
    }
    let mut seen = HashSet::new();
    for r in &records {
        if r.body.is_empty() {
            return Err(Error::EmptyRecord(r.id.clone()));
        }
        if !seen.insert(r.id.as_str()) {
            return Err(Error::DuplicateId(r.id.clone()));
        }
    }
    if records.is_empty() {
        return Err(Error::Parse("no FASTA records".into()));
    }
    Ok(records)
}

fn check_residues(id: &str, body: &[u8], alphabet: &Alphabet, gaps: bool) -> Result<()> {
    match body.iter().find(|&&b| !(alphabet.accepts(b) || (gaps && b == GAP))) {
        Some(&b) => Err(Error::InvalidResidue {
            id: id.to_string(),
            residue: b as char,
        }),
        None => Ok(()),
    }
}

/// Parses ungapped FASTA records; residues are uppercased and validated.
pub fn parse_fasta(text: &str, alphabet: &Alphabet) -> Result<Vec<Sequence>> {
    fasta_records(text)?
        .into_iter()
        .map(|r| {
            check_residues(&r.id, &r.body, alphabet, false)?;
            Sequence::new(r.id, r.body)
        })
        .collect()
}

/// Parses gapped FASTA rows into an alignment.
pub fn parse_aligned_fasta(text: &str, alphabet: &Alphabet) -> Result<Alignment> {
    let records = fasta_records(text)?;
    for r in &records {
        check_residues(&r.id, &r.body, alphabet, true)?;
    }
    let (ids, rows) = records.into_iter().map(|r| (r.id, r.body)).unzip();
    Alignment::new(ids, rows)
}

/// Parses the clustal-like block format written by [`emit_alignment`].
pub fn parse_clustal(text: &str, alphabet: &Alphabet) -> Result<Alignment> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.starts_with("CLUSTAL") => {}
        _ => return Err(Error::Parse("missing CLUSTAL header".into())),
    }
    let mut ids: Vec<String> = Vec::new();
    let mut rows: Vec<Vec<u8>> = Vec::new();
    let mut block_row = 0;
    for line in lines {
        if line.trim().is_empty() {
            block_row = 0;
            continue;
        }
        if line.starts_with(char::is_whitespace) {
            // conservation line
            continue;
        }
        let (id, body) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| Error::Parse(format!("block line without sequence: `{line}`")))?;
        let chunk: Vec<u8> = body
            .bytes()
            .filter(|b| !b.is_ascii_whitespace())
            .map(|b| b.to_ascii_uppercase())
            .collect();
        match ids.iter().position(|x| x == id) {
            Some(k) => {
                if k != block_row {
                    return Err(Error::Parse(format!("row `{id}` out of order")));
                }
                rows[k].extend(chunk);
            }
            None => {
                if block_row != ids.len() {
                    return Err(Error::Parse(format!("unexpected new row `{id}`")));
                }
                ids.push(id.to_string());
                rows.push(chunk);
            }
        }
        block_row += 1;
    }
    if ids.is_empty() {
        return Err(Error::Parse("alignment has no rows".into()));
    }
    for (id, row) in ids.iter().zip(&rows) {
        check_residues(id, row, alphabet, true)?;
    }
    Alignment::new(ids, rows)
}

/// Parses either format, detected from the first line.
pub fn parse_alignment(text: &str, alphabet: &Alphabet) -> Result<Alignment> {
    if text.trim_start().starts_with("CLUSTAL") {
        parse_clustal(text.trim_start(), alphabet)
    } else {
        parse_aligned_fasta(text, alphabet)
    }
}

/// Renders an alignment. Aligned FASTA writes one unwrapped line per row;
/// the clustal-like format writes 60-column blocks with padded ids followed
/// by two spaces.
pub fn emit_alignment(a: &Alignment, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::AlignedFasta => {
            for (id, row) in a.ids().iter().zip(a.rows()) {
                out.push('>');
                out.push_str(id);
                out.push('\n');
                out.push_str(std::str::from_utf8(row).expect("ascii rows"));
                out.push('\n');
            }
        }
        Format::Clustal => {
            let pad = a.ids().iter().map(String::len).max().unwrap_or(0);
            out.push_str(CLUSTAL_HEADER);
            out.push('\n');
            let mut start = 0;
            while start < a.width() {
                let end = (start + CLUSTAL_WIDTH).min(a.width());
                out.push('\n');
                for (id, row) in a.ids().iter().zip(a.rows()) {
                    out.push_str(&format!("{id:<pad$}  "));
                    out.push_str(std::str::from_utf8(&row[start..end]).expect("ascii rows"));
                    out.push('\n');
                }
                start = end;
            }
        }
    }
    out
}
