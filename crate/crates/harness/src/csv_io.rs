//! CSV emission and parsing for objective-per-epoch series.
//!
//! Layout: one row per (run, epoch), grouped by (algo, schedule) with the
//! per-seed rows of a group followed by its across-seed mean rows (seed
//! column `"mean"`, diverged runs excluded). Floats are written in exponent
//! form, which round-trips exactly, and the same input always yields the
//! same bytes.

use std::io::Write;

use crate::runner::RunRecord;
use crate::{Error, Result};

pub const CSV_HEADER: [&str; 5] = ["algo", "schedule", "seed", "epoch", "objective"];

/// Label used in the seed column for across-seed mean rows.
pub const MEAN_SEED: &str = "mean";

/// One parsed CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub algo: String,
    pub schedule: String,
    pub seed: String,
    pub epoch: usize,
    pub objective: f64,
}

impl CsvRow {
    pub fn is_mean(&self) -> bool {
        self.seed == MEAN_SEED
    }
}

/// Render records (already in emission order) to CSV text.
pub fn render_csv(records: &[RunRecord]) -> Result<String> {
    let mut out = Vec::new();
    write_csv(records, &mut out)?;
    Ok(String::from_utf8(out).expect("csv output is ascii"))
}

/// Stream records to a writer; see the module docs for the layout.
pub fn write_csv<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(CSV_HEADER)?;

    let mut start = 0;
    for end in 1..=records.len() {
        let closes_group = end == records.len()
            || records[end].algo != records[start].algo
            || records[end].schedule != records[start].schedule;
        if !closes_group {
            continue;
        }
        let group = &records[start..end];
        for r in group {
            let seed = r.seed.to_string();
            for (epoch, obj) in r.objective_per_epoch.iter().enumerate() {
                write_row(&mut wtr, &r.algo, &r.schedule, &seed, epoch, *obj)?;
            }
        }
        let usable: Vec<&RunRecord> = group.iter().filter(|r| !r.diverged).collect();
        if let Some(first) = usable.first() {
            for epoch in 0..first.objective_per_epoch.len() {
                let mean = usable
                    .iter()
                    .map(|r| r.objective_per_epoch[epoch])
                    .sum::<f64>()
                    / usable.len() as f64;
                write_row(
                    &mut wtr,
                    &group[0].algo,
                    &group[0].schedule,
                    MEAN_SEED,
                    epoch,
                    mean,
                )?;
            }
        }
        start = end;
    }
    wtr.flush().map_err(Error::from_csv_io)?;
    Ok(())
}

fn write_row<W: Write>(
    wtr: &mut csv::Writer<W>,
    algo: &str,
    schedule: &str,
    seed: &str,
    epoch: usize,
    objective: f64,
) -> Result<()> {
    wtr.write_record([
        algo,
        schedule,
        seed,
        &epoch.to_string(),
        &format!("{objective:e}"),
    ])?;
    Ok(())
}

/// Parse CSV text previously produced by [`write_csv`] (or shaped like it).
pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Config(format!(
            "unexpected csv header {:?}, want {:?}",
            header.iter().collect::<Vec<_>>(),
            CSV_HEADER
        )));
    }
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let field = |i: usize| record.get(i).unwrap_or_default();
        let epoch: usize = field(3)
            .parse()
            .map_err(|e| Error::Config(format!("bad epoch {:?}: {e}", field(3))))?;
        let objective: f64 = field(4)
            .parse()
            .map_err(|e| Error::Config(format!("bad objective {:?}: {e}", field(4))))?;
        rows.push(CsvRow {
            algo: field(0).to_string(),
            schedule: field(1).to_string(),
            seed: field(2).to_string(),
            epoch,
            objective,
        });
    }
    Ok(rows)
}

type EpochPoints = Vec<(usize, f64)>;

/// The mean series of each (algo, schedule) group, in first-appearance
/// order, as objective values indexed by epoch.
pub fn mean_series(rows: &[CsvRow]) -> Vec<(String, String, Vec<f64>)> {
    let mut groups: Vec<(String, String, EpochPoints)> = Vec::new();
    for row in rows.iter().filter(|r| r.is_mean()) {
        let key = (&row.algo, &row.schedule);
        let group = match groups.iter_mut().find(|(a, s, _)| (a, s) == key) {
            Some(g) => g,
            None => {
                groups.push((row.algo.clone(), row.schedule.clone(), Vec::new()));
                groups.last_mut().expect("just pushed")
            }
        };
        group.2.push((row.epoch, row.objective));
    }
    groups
        .into_iter()
        .map(|(algo, schedule, mut pts)| {
            pts.sort_by_key(|&(epoch, _)| epoch);
            (algo, schedule, pts.into_iter().map(|(_, v)| v).collect())
        })
        .collect()
}

impl Error {
    fn from_csv_io(e: std::io::Error) -> Self {
        Error::Csv(csv::Error::from(e))
    }
}
