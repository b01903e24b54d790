//! Cause-effect pair benchmark: loads a directory of two-column sample
//! files with a weighted metadata index, orients every pair, and sweeps the
//! ranked decisions into an accuracy-versus-decision-rate curve.

use std::path::Path;

use rayon::prelude::*;
use statrs::distribution::{Beta, ContinuousCDF};

use crate::discovery::{infer_direction, Direction};
use crate::error::{Error, Result};
use crate::regression::RegressionMethod;
use crate::rng::{derive_seed, rng_from_seed};
use rand::Rng;

/// Pairs longer than this are subsampled to this many rows, with a seed
/// derived from the pair id so reloads are identical.
pub const PAIR_N_CAP: usize = 2000;

/// Ground-truth orientation of a pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairTruth {
    XCausesY,
    YCausesX,
}

/// One benchmark pair. Multivariate pairs are kept for bookkeeping but
/// marked skipped and their sample files are never read.
#[derive(Clone, Debug)]
pub struct PairRecord {
    pub id: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Downweights repeated measurements of the same mechanism; in (0, 1].
    pub weight: f64,
    pub truth: PairTruth,
    pub skipped: bool,
}

/// Accuracy curve over ranked prefixes, one point per decision taken.
#[derive(Clone, Copy, Debug)]
pub struct CurvePoint {
    pub decision_rate: f64,
    pub accuracy: f64,
    pub ci68_low: f64,
    pub ci68_high: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
}

#[derive(Clone, Debug)]
pub struct AccuracyCurve {
    pub points: Vec<CurvePoint>,
}

fn meta_err(line: usize, msg: String) -> Error {
    Error::PairMeta { line, msg }
}

/// Reads `pairmeta.txt` from `dir` and loads every listed pair. Metadata
/// rows are `id x_first x_last y_first y_last weight` with 1-based column
/// ranges into the sample file `pair<id>.txt` (or `<id>.txt`). A range wider
/// than one column marks the pair skipped.
pub fn load_pairs(dir: &Path) -> Result<Vec<PairRecord>> {
    let meta_path = dir.join("pairmeta.txt");
    if !meta_path.is_file() {
        return Err(meta_err(0, format!("metadata file {} not found", meta_path.display())));
    }
    let meta = std::fs::read_to_string(&meta_path)?;
    let mut records = Vec::new();
    for (idx, raw) in meta.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(meta_err(lineno, format!("expected 6 fields, got {}", fields.len())));
        }
        let id = fields[0].to_string();
        let col = |i: usize| -> Result<usize> {
            fields[i]
                .parse::<usize>()
                .map_err(|_| meta_err(lineno, format!("bad column index `{}`", fields[i])))
        };
        let (x_first, x_last, y_first, y_last) = (col(1)?, col(2)?, col(3)?, col(4)?);
        let weight: f64 = fields[5]
            .parse()
            .map_err(|_| meta_err(lineno, format!("bad weight `{}`", fields[5])))?;
        if !(weight > 0.0 && weight <= 1.0) {
            return Err(meta_err(lineno, format!("weight must be in (0, 1], got {weight}")));
        }
        if x_first == 0 || y_first == 0 || x_last < x_first || y_last < y_first {
            return Err(meta_err(lineno, "column ranges must be 1-based and ordered".into()));
        }
        // x/y are always file columns 1/2; truth records where the cause sits.
        let truth = if x_first < y_first { PairTruth::XCausesY } else { PairTruth::YCausesX };
        if x_last > x_first || y_last > y_first {
            records.push(PairRecord { id, x: Vec::new(), y: Vec::new(), weight, truth, skipped: true });
            continue;
        }
        if (x_first.min(y_first), x_first.max(y_first)) != (1, 2) {
            return Err(meta_err(lineno, format!("univariate pair `{id}` must use columns 1 and 2")));
        }
        let path = {
            let a = dir.join(format!("pair{id}.txt"));
            if a.is_file() { a } else { dir.join(format!("{id}.txt")) }
        };
        if !path.is_file() {
            return Err(Error::PairFileMissing(id));
        }
        let body = std::fs::read_to_string(&path)?;
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (ridx, rline) in body.lines().enumerate() {
            let t = rline.trim();
            if t.is_empty() {
                continue;
            }
            let vals: Vec<&str> = t.split_whitespace().collect();
            if vals.len() != 2 {
                return Err(Error::PairSample {
                    id,
                    line: ridx + 1,
                    msg: format!("expected 2 columns, got {}", vals.len()),
                });
            }
            let mut parsed = [0.0f64; 2];
            for (k, v) in vals.iter().enumerate() {
                parsed[k] = v.parse::<f64>().map_err(|_| Error::PairSample {
                    id: id.clone(),
                    line: ridx + 1,
                    msg: format!("bad number `{v}`"),
                })?;
                if !parsed[k].is_finite() {
                    return Err(Error::PairSample {
                        id: id.clone(),
                        line: ridx + 1,
                        msg: format!("non-finite value `{v}`"),
                    });
                }
            }
            x.push(parsed[0]);
            y.push(parsed[1]);
        }
        if x.len() > PAIR_N_CAP {
            let keep = subsample_indices(x.len(), PAIR_N_CAP, &id);
            x = keep.iter().map(|&i| x[i]).collect();
            y = keep.iter().map(|&i| y[i]).collect();
        }
        records.push(PairRecord { id, x, y, weight, truth, skipped: false });
    }
    Ok(records)
}

// Partial Fisher-Yates over row indices, seeded from the id bytes; sorted
// so the retained rows keep their original order.
fn subsample_indices(n: usize, take: usize, id: &str) -> Vec<usize> {
    let seed = id.bytes().fold(0u64, |acc, b| derive_seed(acc, &[u64::from(b)]));
    let mut rng = rng_from_seed(seed);
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..take {
        let j = rng.gen_range(i..n);
        idx.swap(i, j);
    }
    idx.truncate(take);
    idx.sort_unstable();
    idx
}

/// Exact binomial confidence interval for s successes in n trials at the
/// given two-sided coverage.
pub fn clopper_pearson(s: u64, n: u64, coverage: f64) -> (f64, f64) {
    let alpha = 1.0 - coverage;
    let (s, n) = (s.min(n), n.max(1));
    let lo = if s == 0 {
        0.0
    } else {
        Beta::new(s as f64, (n - s + 1) as f64).unwrap().inverse_cdf(alpha / 2.0)
    };
    let hi = if s == n {
        1.0
    } else {
        Beta::new((s + 1) as f64, (n - s) as f64).unwrap().inverse_cdf(1.0 - alpha / 2.0)
    };
    (lo, hi)
}

/// Orients every non-skipped pair, ranks decisions by confidence (largest
/// of the two independence p-values first, ties by id), and sweeps ranked
/// prefixes into weighted accuracy and decision-rate points with
/// Clopper-Pearson 68% and 95% intervals on rounded effective counts.
pub fn rank_and_curve(records: &[PairRecord], rm: RegressionMethod) -> Result<AccuracyCurve> {
    let active: Vec<&PairRecord> = records.iter().filter(|r| !r.skipped).collect();
    if active.is_empty() {
        return Err(Error::NoUsablePairs);
    }
    let mut ranked: Vec<(f64, &str, f64, bool)> = active
        .par_iter()
        .map(|r| {
            let v = infer_direction(&r.x, &r.y, rm)?;
            let correct = match (r.truth, v.decision) {
                (PairTruth::XCausesY, Direction::XCausesY) => true,
                (PairTruth::YCausesX, Direction::YCausesX) => true,
                _ => false,
            };
            Ok((v.rank_key, r.id.as_str(), r.weight, correct))
        })
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));

    let total_weight: f64 = ranked.iter().map(|r| r.2).sum();
    let mut taken = 0.0;
    let mut won = 0.0;
    let mut points = Vec::with_capacity(ranked.len());
    for (_, _, w, correct) in &ranked {
        taken += w;
        if *correct {
            won += w;
        }
        // Fractional weights have no exact binomial law; counts are rounded
        // to the nearest integers (at least one trial) for the intervals.
        let n_eff = (taken.round() as u64).max(1);
        let s_eff = (won.round() as u64).min(n_eff);
        let (ci68_low, ci68_high) = clopper_pearson(s_eff, n_eff, 0.68);
        let (ci95_low, ci95_high) = clopper_pearson(s_eff, n_eff, 0.95);
        points.push(CurvePoint {
            decision_rate: taken / total_weight,
            accuracy: won / taken,
            ci68_low,
            ci68_high,
            ci95_low,
            ci95_high,
        });
    }
    Ok(AccuracyCurve { points })
}
