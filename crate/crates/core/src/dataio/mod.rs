//! The `.mts` text container, per-class random splits and a synthetic
//! generator.
//!
//! Format (UTF-8, LF line endings, trailing newline required):
//!
//! ```text
//! n d1 d2 c
//! <label of observation 1>
//! <d1 lines of d2 space-separated values>
//! <label of observation 2>
//! ...
//! ```
//!
//! Values are written with 17 significant digits so that a save/load round
//! trip is exact. `inf` and `nan` are rejected.

pub mod rng;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, ParseErrorKind, Result};
use crate::matalg::Mat;
use crate::scatter::MtsDataset;
use rng::SplitMix64;

pub fn load_mts(path: impl AsRef<Path>) -> Result<MtsDataset> {
    let text = fs::read_to_string(path)?;
    parse_mts(&text)
}

pub fn save_mts(path: impl AsRef<Path>, data: &MtsDataset) -> Result<()> {
    fs::write(path, format_mts(data))?;
    Ok(())
}

pub fn format_mts(data: &MtsDataset) -> String {
    let (d1, d2) = data.dims();
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {} {}", data.len(), d1, d2, data.n_classes());
    for (x, &y) in data.observations().iter().zip(data.labels()) {
        let _ = writeln!(out, "{y}");
        for r in 0..d1 {
            for c in 0..d2 {
                if c > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{:.16e}", x[(r, c)]);
            }
            out.push('\n');
        }
    }
    out
}

fn parse_err(line: usize, kind: ParseErrorKind) -> Error {
    Error::Parse { line, kind }
}

fn parse_value(token: &str, line: usize) -> Result<f64> {
    let v: f64 = token
        .parse()
        .map_err(|_| parse_err(line, ParseErrorKind::InvalidNumber(token.to_string())))?;
    if !v.is_finite() {
        return Err(parse_err(line, ParseErrorKind::NonFinite(token.to_string())));
    }
    Ok(v)
}

pub fn parse_mts(text: &str) -> Result<MtsDataset> {
    let mut lines = text.split('\n').enumerate().map(|(i, l)| (i + 1, l));

    let (_, header) = lines.next().unwrap_or((1, ""));
    let fields: Vec<&str> = header.split(' ').collect();
    let parsed: Vec<usize> = fields.iter().filter_map(|f| f.parse().ok()).collect();
    if fields.len() != 4 || parsed.len() != 4 {
        return Err(parse_err(1, ParseErrorKind::MalformedHeader(header.to_string())));
    }
    let (n, d1, d2, c) = (parsed[0], parsed[1], parsed[2], parsed[3]);
    if d1 == 0 || d2 == 0 || c == 0 {
        return Err(parse_err(
            1,
            ParseErrorKind::MalformedHeader("dimensions and class count must be positive".into()),
        ));
    }

    let mut observations = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    let mut last_line = 1;
    for obs in 0..n {
        let (line_no, label_line) = lines
            .next()
            .filter(|(_, l)| !l.is_empty())
            .ok_or_else(|| parse_err(last_line + 1, ParseErrorKind::UnexpectedEof { observation: obs + 1 }))?;
        let label: i64 = label_line
            .trim()
            .parse()
            .map_err(|_| parse_err(line_no, ParseErrorKind::InvalidLabel(label_line.to_string())))?;
        if label < 0 || label as usize >= c {
            return Err(parse_err(line_no, ParseErrorKind::LabelOutOfRange { label, n_classes: c }));
        }
        let mut x = Mat::zeros(d1, d2);
        last_line = line_no;
        for r in 0..d1 {
            let (line_no, row) = lines
                .next()
                .filter(|(_, l)| !l.is_empty())
                .ok_or_else(|| parse_err(last_line + 1, ParseErrorKind::UnexpectedEof { observation: obs + 1 }))?;
            let tokens: Vec<&str> = row.split(' ').collect();
            if tokens.len() != d2 {
                return Err(parse_err(
                    line_no,
                    ParseErrorKind::WrongColumnCount {
                        expected: d2,
                        found: tokens.len(),
                    },
                ));
            }
            for (col, tok) in tokens.iter().enumerate() {
                x[(r, col)] = parse_value(tok, line_no)?;
            }
            last_line = line_no;
        }
        observations.push(x);
        labels.push(label as usize);
    }

    // The text must end with exactly one newline after the last row.
    match lines.next() {
        Some((_, "")) => {
            if let Some((line_no, _)) = lines.next() {
                return Err(parse_err(line_no, ParseErrorKind::TrailingContent));
            }
        }
        Some((line_no, _)) => return Err(parse_err(line_no, ParseErrorKind::TrailingContent)),
        None => return Err(parse_err(last_line, ParseErrorKind::MissingTrailingNewline)),
    }

    let data = MtsDataset::new(d1, d2, c, observations, labels)?;
    if let Some(err) = data.empty_class_parse_error(1) {
        return Err(err);
    }
    Ok(data)
}

/// Training proportion as an exact fraction, so per-class counts are
/// `floor(num * n_k / den)` without rounding surprises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Proportion {
    num: u64,
    den: u64,
}

impl Proportion {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 || num == 0 || num > den {
            return Err(Error::input(format!("proportion {num}/{den} outside (0, 1]")));
        }
        Ok(Self { num, den })
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `max(1, floor(p * count))`, capped at `count`.
    pub fn train_count(self, count: usize) -> usize {
        let k = (self.num as u128 * count as u128 / self.den as u128) as usize;
        k.max(1).min(count)
    }
}

impl FromStr for Proportion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::input(format!("invalid proportion `{s}`"));
        if let Some((a, b)) = s.split_once('/') {
            let num = a.trim().parse().map_err(|_| bad())?;
            let den = b.trim().parse().map_err(|_| bad())?;
            return Proportion::new(num, den);
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.len() > 12 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let den = 10u64.pow(frac.len() as u32);
        let frac_val: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let num = int.checked_mul(den).and_then(|v| v.checked_add(frac_val)).ok_or_else(bad)?;
        let g = gcd(num, den);
        Proportion::new(num / g.max(1), den / g.max(1))
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl std::fmt::Display for Proportion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl TryFrom<String> for Proportion {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Proportion> for String {
    fn from(p: Proportion) -> String {
        p.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitSpec {
    pub proportion: Proportion,
    pub seed: u64,
}

/// Per-class random split; returns `(train, test)` indices, each ascending.
pub fn split_indices(labels: &[usize], n_classes: usize, spec: SplitSpec) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut by_class = vec![Vec::new(); n_classes];
    for (i, &y) in labels.iter().enumerate() {
        by_class[y].push(i);
    }
    if let Some(k) = by_class.iter().position(Vec::is_empty) {
        return Err(Error::input(format!("class {k} has no observations to split")));
    }
    let mut rng = SplitMix64::new(spec.seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for mut members in by_class {
        rng.shuffle(&mut members);
        let k = spec.proportion.train_count(members.len());
        train.extend_from_slice(&members[..k]);
        test.extend_from_slice(&members[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

pub fn random_split(data: &MtsDataset, spec: SplitSpec) -> Result<(MtsDataset, MtsDataset)> {
    let (train, test) = split_indices(data.labels(), data.n_classes(), spec)?;
    Ok((data.subset(&train), data.subset(&test)))
}

/// Fixed `d1 x d2` pattern with unit-magnitude entries, alternating sign
/// along the rows: `P[i][j] = (-1)^i`.
pub fn synth_pattern(d1: usize, d2: usize) -> Mat {
    Mat::from_fn(d1, d2, |r, _| if r % 2 == 0 { 1.0 } else { -1.0 })
}

/// Classes with mean `mean_gap * k * P` plus i.i.d. `N(0, noise_sigma²)`
/// entries. Observations are ordered by class.
pub fn synth_separable(
    d1: usize,
    d2: usize,
    n_per_class: usize,
    n_classes: usize,
    mean_gap: f64,
    noise_sigma: f64,
    seed: u64,
) -> Result<MtsDataset> {
    if !(mean_gap >= 0.0) || !(noise_sigma > 0.0) {
        return Err(Error::input("need mean_gap >= 0 and noise_sigma > 0"));
    }
    if n_per_class == 0 || n_classes == 0 {
        return Err(Error::input("need at least one class and one observation per class"));
    }
    let pattern = synth_pattern(d1, d2);
    let mut rng = SplitMix64::new(seed);
    let mut observations = Vec::with_capacity(n_per_class * n_classes);
    let mut labels = Vec::with_capacity(n_per_class * n_classes);
    for k in 0..n_classes {
        let mean = &pattern * (mean_gap * k as f64);
        for _ in 0..n_per_class {
            let noise = Mat::from_fn(d1, d2, |_, _| noise_sigma * rng.next_gaussian());
            observations.push(&mean + noise);
            labels.push(k);
        }
    }
    MtsDataset::new(d1, d2, n_classes, observations, labels)
}
