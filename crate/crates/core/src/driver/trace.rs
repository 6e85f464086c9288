//! Time–quality traces, their CSV form, and cross-run reporting.

use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

pub const CSV_HEADER: &str = "elapsed_s,best_weight,event";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    Init,
    LocalSearch,
    Relink,
    Improve,
    Stagnate,
    Final,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Init => "init",
            EventKind::LocalSearch => "local-search",
            EventKind::Relink => "relink",
            EventKind::Improve => "improve",
            EventKind::Stagnate => "stagnate",
            EventKind::Final => "final",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EventKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "init" => EventKind::Init,
            "local-search" => EventKind::LocalSearch,
            "relink" => EventKind::Relink,
            "improve" => EventKind::Improve,
            "stagnate" => EventKind::Stagnate,
            "final" => EventKind::Final,
            other => return Err(format!("unknown trace event '{other}'")),
        })
    }
}

/// Relinking limits in force after an iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelinkState {
    pub f: f64,
    pub c_n: f64,
    pub c_p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEvent {
    /// Elapsed time in whole microseconds, strictly increasing along a trace.
    pub micros: u64,
    pub best_weight: f64,
    pub kind: EventKind,
    pub relink: Option<RelinkState>,
}

impl TraceEvent {
    pub fn elapsed(&self) -> f64 {
        self.micros as f64 / 1e6
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    events: Vec<TraceEvent>,
}

impl Trace {
    pub fn new() -> Self {
        Trace::default()
    }

    /// Appends an event; timestamps are bumped by a microsecond where
    /// needed to keep them strictly increasing.
    pub fn push(&mut self, elapsed: f64, best_weight: f64, kind: EventKind, relink: Option<RelinkState>) {
        let mut micros = (elapsed * 1e6).round().max(0.0) as u64;
        if let Some(last) = self.events.last() {
            micros = micros.max(last.micros + 1);
        }
        self.events.push(TraceEvent {
            micros,
            best_weight,
            kind,
            relink,
        });
    }

    pub fn events(&self) -> &[TraceEvent] {
        &self.events
    }

    pub fn last(&self) -> Option<&TraceEvent> {
        self.events.last()
    }

    pub fn points(&self) -> Vec<TracePoint> {
        self.events
            .iter()
            .map(|e| TracePoint {
                elapsed: e.elapsed(),
                best_weight: e.best_weight,
                kind: e.kind,
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for e in &self.events {
            writeln!(out, "{}.{:06},{},{}", e.micros / 1_000_000, e.micros % 1_000_000, e.best_weight, e.kind)?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}

/// One parsed CSV row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub elapsed: f64,
    pub best_weight: f64,
    pub kind: EventKind,
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub fn parse_csv<R: BufRead>(reader: R) -> Result<Vec<TracePoint>, TraceError> {
    let mut points = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let err = |msg: String| TraceError::Parse { line: lineno, msg };
        if idx == 0 {
            if line.trim() != CSV_HEADER {
                return Err(err(format!("expected header '{CSV_HEADER}'")));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim().split(',').collect();
        let [t, w, kind] = fields.as_slice() else {
            return Err(err(format!("expected 3 fields, found {}", fields.len())));
        };
        points.push(TracePoint {
            elapsed: t.parse().map_err(|_| err(format!("bad time '{t}'")))?,
            best_weight: w.parse().map_err(|_| err(format!("bad weight '{w}'")))?,
            kind: kind.parse().map_err(err)?,
        });
    }
    Ok(points)
}

/// Best weight recorded at or before `t`.
pub fn weight_at(points: &[TracePoint], t: f64) -> Option<f64> {
    points.iter().take_while(|p| p.elapsed <= t).last().map(|p| p.best_weight)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TStarReport {
    /// Target value `s`.
    pub threshold: f64,
    /// Index of the run with the best final value (the earliest on ties).
    pub best_run: usize,
    pub best_final_weight: f64,
    /// Earliest time the best run reaches `s`, if it does.
    pub t_star: Option<f64>,
    pub final_weights: Vec<f64>,
}

/// Cross-run `t*`: `s` defaults to the smallest final value over all runs;
/// `t*` is the first time the run with the best final value reaches `s`.
pub fn t_star(runs: &[Vec<TracePoint>], threshold: Option<f64>) -> Option<TStarReport> {
    let finals: Vec<f64> = runs.iter().map(|r| r.last().map(|p| p.best_weight)).collect::<Option<_>>()?;
    let threshold = threshold.unwrap_or_else(|| finals.iter().copied().fold(f64::INFINITY, f64::min));
    let (best_run, &best_final_weight) = finals
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.total_cmp(b).then(j.cmp(i)))?;
    let t_star = runs[best_run]
        .iter()
        .find(|p| p.best_weight >= threshold)
        .map(|p| p.elapsed);
    Some(TStarReport {
        threshold,
        best_run,
        best_final_weight,
        t_star,
        final_weights: finals,
    })
}
