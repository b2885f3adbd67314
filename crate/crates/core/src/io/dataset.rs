//! CSV forms of triple and pair datasets.
//!
//! Headers are fixed: `alpha,a1,a2,a3` and
//! `group,alpha,t_first,t_second,out_first,out_second`. Outcomes are the
//! literals `+1` and `-1`.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use csv::{ReaderBuilder, StringRecord, WriterBuilder};

use crate::error::{Error, Result};
use crate::model::{GroupLabel, Outcome, PairDataset, PairRun, TripleDataset, TripleRun};

pub const TRIPLE_HEADER: [&str; 4] = ["alpha", "a1", "a2", "a3"];
pub const PAIR_HEADER: [&str; 6] = ["group", "alpha", "t_first", "t_second", "out_first", "out_second"];

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn csv_error(err: csv::Error) -> Error {
    let line = err.position().map_or(0, |p| p.line() as usize);
    parse_error(line, err.to_string())
}

fn parse_outcome(field: &str, line: usize) -> Result<Outcome> {
    match field {
        "+1" => Ok(Outcome::Plus),
        "-1" => Ok(Outcome::Minus),
        other => Err(parse_error(line, format!("invalid outcome {other:?}"))),
    }
}

fn parse_alpha(field: &str, line: usize) -> Result<usize> {
    field
        .parse()
        .map_err(|_| parse_error(line, format!("invalid run index {field:?}")))
}

fn records<R: Read>(input: R, header: &[&str]) -> Result<Vec<(usize, StringRecord)>> {
    let mut reader = ReaderBuilder::new().has_headers(false).from_reader(input);
    let mut rows = reader.records();
    let first = match rows.next() {
        Some(r) => r.map_err(csv_error)?,
        None => return Err(parse_error(1, "missing header")),
    };
    if first.iter().ne(header.iter().copied()) {
        return Err(parse_error(
            1,
            format!("header must be exactly `{}`", header.join(",")),
        ));
    }
    rows.map(|r| {
        let r = r.map_err(csv_error)?;
        let line = r.position().map_or(0, |p| p.line() as usize);
        if r.len() != header.len() {
            return Err(parse_error(
                line,
                format!("expected {} fields, found {}", header.len(), r.len()),
            ));
        }
        Ok((line, r))
    })
    .collect()
}

pub fn read_triples<R: Read>(input: R) -> Result<TripleDataset> {
    let mut runs = Vec::new();
    for (line, rec) in records(input, &TRIPLE_HEADER)? {
        let alpha = parse_alpha(&rec[0], line)?;
        if alpha != runs.len() + 1 {
            return Err(Error::NonContiguousRuns {
                expected: runs.len() + 1,
                found: alpha,
            });
        }
        let outcomes = [
            parse_outcome(&rec[1], line)?,
            parse_outcome(&rec[2], line)?,
            parse_outcome(&rec[3], line)?,
        ];
        runs.push(TripleRun { alpha, outcomes });
    }
    TripleDataset::new(runs)
}

pub fn parse_triples(path: impl AsRef<Path>) -> Result<TripleDataset> {
    read_triples(File::open(path)?)
}

fn parse_time(field: &str, line: usize) -> Result<Option<f64>> {
    if field.is_empty() {
        return Ok(None);
    }
    let t: f64 = field
        .parse()
        .map_err(|_| parse_error(line, format!("invalid time stamp {field:?}")))?;
    if !t.is_finite() {
        return Err(parse_error(line, format!("invalid time stamp {field:?}")));
    }
    Ok(Some(t))
}

pub fn read_pairs<R: Read>(input: R) -> Result<PairDataset> {
    let mut runs = Vec::new();
    let mut next_alpha = [1usize; 3];
    for (line, rec) in records(input, &PAIR_HEADER)? {
        let group = GroupLabel::from_code(&rec[0])
            .map_err(|_| parse_error(line, format!("invalid group {:?}", &rec[0])))?;
        let alpha = parse_alpha(&rec[1], line)?;
        let expected = next_alpha[group.position()];
        if alpha != expected {
            return Err(Error::NonContiguousRuns {
                expected,
                found: alpha,
            });
        }
        next_alpha[group.position()] += 1;
        let times = match (parse_time(&rec[2], line)?, parse_time(&rec[3], line)?) {
            (Some(a), Some(b)) => {
                if a > b {
                    return Err(parse_error(line, format!("timestamps out of order: {a} > {b}")));
                }
                Some((a, b))
            }
            (None, None) => None,
            _ => return Err(parse_error(line, "incomplete timestamps")),
        };
        runs.push(PairRun {
            group,
            alpha,
            out_first: parse_outcome(&rec[4], line)?,
            out_second: parse_outcome(&rec[5], line)?,
            times,
        });
    }
    PairDataset::from_runs(runs)
}

pub fn parse_pairs(path: impl AsRef<Path>) -> Result<PairDataset> {
    read_pairs(File::open(path)?)
}

fn io_error(err: impl std::fmt::Display) -> Error {
    Error::Io(err.to_string())
}

pub fn write_triples<W: Write>(ds: &TripleDataset, out: W) -> Result<()> {
    let mut w = WriterBuilder::new().from_writer(out);
    w.write_record(TRIPLE_HEADER).map_err(io_error)?;
    for run in ds.runs() {
        w.write_record([
            run.alpha.to_string(),
            run.a1().to_string(),
            run.a2().to_string(),
            run.a3().to_string(),
        ])
        .map_err(io_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Time stamps use Rust's shortest round-trip float formatting.
pub fn write_pairs<W: Write>(ds: &PairDataset, out: W) -> Result<()> {
    let mut w = WriterBuilder::new().from_writer(out);
    w.write_record(PAIR_HEADER).map_err(io_error)?;
    for run in ds.iter() {
        let (t1, t2) = match run.times {
            Some((a, b)) => (a.to_string(), b.to_string()),
            None => (String::new(), String::new()),
        };
        w.write_record([
            run.group.code().to_string(),
            run.alpha.to_string(),
            t1,
            t2,
            run.out_first.to_string(),
            run.out_second.to_string(),
        ])
        .map_err(io_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn triples_to_string(ds: &TripleDataset) -> String {
    let mut buf = Vec::new();
    write_triples(ds, &mut buf).expect("in-memory write");
    String::from_utf8(buf).expect("ascii")
}

pub fn pairs_to_string(ds: &PairDataset) -> String {
    let mut buf = Vec::new();
    write_pairs(ds, &mut buf).expect("in-memory write");
    String::from_utf8(buf).expect("ascii")
}
