//! Likert survey ingestion, aggregate tables and the paired Wilcoxon
//! signed-rank test.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const BUNDLED_SURVEY: &str = include_str!("../data/survey_synthetic.csv");

/// Above this many nonzero differences the normal approximation is used.
pub const EXACT_MAX_N: usize = 20;

pub const LIKERT_LABELS: [&str; 5] = ["SD", "D", "N", "A", "SA"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Survey {
    Pre,
    Post,
}

impl std::str::FromStr for Survey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "pre" => Ok(Survey::Pre),
            "post" => Ok(Survey::Post),
            other => Err(Error::InvalidData(format!("unknown survey {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LikertRecord {
    pub subject_id: String,
    pub survey: Survey,
    pub question: u32,
    /// 1 = strongly disagree … 5 = strongly agree.
    pub response: u8,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LikertDataset {
    pub records: Vec<LikertRecord>,
}

impl LikertDataset {
    pub fn subjects(&self) -> BTreeSet<&str> {
        self.records.iter().map(|r| r.subject_id.as_str()).collect()
    }

    pub fn response(&self, subject: &str, survey: Survey, question: u32) -> Option<u8> {
        self.records
            .iter()
            .find(|r| r.subject_id == subject && r.survey == survey && r.question == question)
            .map(|r| r.response)
    }
}

/// Parse `subject_id,survey,question,response` rows. Row numbers in errors
/// count the header as row 1.
pub fn ingest_likert<R: Read>(stream: R) -> Result<LikertDataset> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(stream);
    let headers = reader.headers().map_err(|e| Error::InvalidData(format!("header: {e}")))?;
    if headers.iter().collect::<Vec<_>>() != ["subject_id", "survey", "question", "response"] {
        return Err(Error::MalformedHeader(format!(
            "expected subject_id,survey,question,response, got {}",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut seen = HashSet::new();
    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| Error::InvalidData(format!("row {line}: {e}")))?;
        if row.len() != 4 {
            return Err(Error::InvalidData(format!("row {line}: expected 4 fields, found {}", row.len())));
        }
        let bad = |what: &str, v: &str| Error::InvalidData(format!("row {line}: invalid {what} {v:?}"));
        let subject_id = row[0].to_string();
        if subject_id.is_empty() {
            return Err(bad("subject_id", &row[0]));
        }
        let survey: Survey = row[1].parse().map_err(|_| bad("survey", &row[1]))?;
        let question: u32 = row[2].parse().map_err(|_| bad("question", &row[2]))?;
        let response: u8 = row[3].parse().map_err(|_| bad("response", &row[3]))?;
        if !(1..=5).contains(&response) {
            return Err(Error::InvalidData(format!("row {line}: response {response} outside 1..5")));
        }
        if !seen.insert((subject_id.clone(), survey, question)) {
            return Err(Error::InvalidData(format!(
                "row {line}: duplicate response for ({subject_id}, {survey:?}, {question})"
            )));
        }
        records.push(LikertRecord { subject_id, survey, question, response });
    }
    Ok(LikertDataset { records })
}

/// Seventeen synthetic respondents whose per-question totals reproduce the
/// published pre/post tables. Individual pairings are illustrative.
pub fn bundled_dataset() -> LikertDataset {
    ingest_likert(BUNDLED_SURVEY.as_bytes()).expect("bundled survey is valid")
}

/// Counts over the five levels for one question; absent questions are zero.
pub fn question_counts(ds: &LikertDataset, survey: Survey, question: u32) -> [usize; 5] {
    let mut c = [0; 5];
    for r in ds.records.iter().filter(|r| r.survey == survey && r.question == question) {
        c[usize::from(r.response - 1)] += 1;
    }
    c
}

pub fn aggregate_counts(ds: &LikertDataset, survey: Survey) -> BTreeMap<u32, [usize; 5]> {
    let questions: BTreeSet<u32> = ds.records.iter().filter(|r| r.survey == survey).map(|r| r.question).collect();
    questions.into_iter().map(|q| (q, question_counts(ds, survey, q))).collect()
}

pub fn format_counts_table(counts: &BTreeMap<u32, [usize; 5]>) -> String {
    let mut s = format!("{:>8}", "Question");
    for l in LIKERT_LABELS {
        let _ = write!(s, " {l:>4}");
    }
    s.push('\n');
    for (q, c) in counts {
        let _ = write!(s, "{q:>8}");
        for v in c {
            let _ = write!(s, " {v:>4}");
        }
        s.push('\n');
    }
    s
}

/// Responses of every subject who answered both items, ordered by subject id.
pub fn paired_responses(ds: &LikertDataset, first: (Survey, u32), second: (Survey, u32)) -> (Vec<f64>, Vec<f64>) {
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for s in ds.subjects() {
        if let (Some(a), Some(b)) = (ds.response(s, first.0, first.1), ds.response(s, second.0, second.1)) {
            x.push(f64::from(a));
            y.push(f64::from(b));
        }
    }
    (x, y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alternative {
    /// `y` tends to exceed `x`.
    Greater,
    Less,
    TwoSided,
}

impl std::str::FromStr for Alternative {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greater" => Ok(Alternative::Greater),
            "less" => Ok(Alternative::Less),
            "two_sided" | "two-sided" => Ok(Alternative::TwoSided),
            other => Err(Error::param("alternative", format!("unknown alternative {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestMethod {
    Exact,
    NormalApprox,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub n_effective: usize,
    pub w_plus: f64,
    pub w_minus: f64,
    pub p: f64,
    pub alternative: Alternative,
    pub method: TestMethod,
}

/// Average ranks of `|d|` (1-based), ties sharing the mean of their span.
fn tied_ranks(abs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..abs.len()).collect();
    order.sort_by(|&a, &b| abs[a].total_cmp(&abs[b]));
    let mut ranks = vec![0.0; abs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && abs[order[j]] == abs[order[i]] {
            j += 1;
        }
        let r = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = r;
        }
        i = j;
    }
    ranks
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Tail probabilities `(P(W⁺ ≥ w), P(W⁺ ≤ w))` by counting the `2ⁿ` sign
/// assignments over the observed ranks. Ranks are half-integers, so the
/// subset-sum table runs over doubled ranks.
fn exact_tails(ranks: &[f64], w_plus: f64) -> (f64, f64) {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut ways = vec![0f64; total + 1];
    ways[0] = 1.0;
    for &r in &doubled {
        for s in (r..=total).rev() {
            ways[s] += ways[s - r];
        }
    }
    let all = 2f64.powi(ranks.len() as i32);
    let w = (2.0 * w_plus).round() as usize;
    let upper: f64 = ways[w..].iter().sum();
    let lower: f64 = ways[..=w].iter().sum();
    (upper / all, lower / all)
}

fn normal_tails(ranks: &[f64], abs: &[f64], w_plus: f64) -> (f64, f64) {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut ties: BTreeMap<u64, usize> = BTreeMap::new();
    for a in abs {
        *ties.entry(a.to_bits()).or_default() += 1;
    }
    let tie_term: f64 = ties.values().map(|&t| (t * t * t - t) as f64).sum::<f64>() / 48.0;
    let sd = (n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term).sqrt();
    let upper = 1.0 - normal_cdf((w_plus - mean - 0.5) / sd);
    let lower = normal_cdf((w_plus - mean + 0.5) / sd);
    (upper, lower)
}

/// Paired signed-rank test on `d = y − x`. Zero differences are dropped;
/// the exact null distribution is used up to [`EXACT_MAX_N`] nonzero pairs.
pub fn wilcoxon_signed_rank(x: &[f64], y: &[f64], alternative: Alternative) -> Result<TestResult> {
    wilcoxon_with_method(x, y, alternative, None)
}

/// As [`wilcoxon_signed_rank`], optionally forcing the method.
pub fn wilcoxon_with_method(
    x: &[f64],
    y: &[f64],
    alternative: Alternative,
    method: Option<TestMethod>,
) -> Result<TestResult> {
    if x.len() != y.len() || x.is_empty() {
        return Err(Error::param("x, y", format!("need equal non-zero lengths, got {} and {}", x.len(), y.len())));
    }
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| b - a).filter(|d| *d != 0.0).collect();
    if d.is_empty() {
        return Err(Error::Degenerate("all paired differences are zero".into()));
    }
    let abs: Vec<f64> = d.iter().map(|v| v.abs()).collect();
    let ranks = tied_ranks(&abs);
    let w_plus: f64 = ranks.iter().zip(&d).filter(|(_, d)| **d > 0.0).map(|(r, _)| r).sum();
    let n = d.len();
    let w_minus = (n * (n + 1)) as f64 / 2.0 - w_plus;
    let method = method.unwrap_or(if n <= EXACT_MAX_N { TestMethod::Exact } else { TestMethod::NormalApprox });
    let (upper, lower) = match method {
        TestMethod::Exact => exact_tails(&ranks, w_plus),
        TestMethod::NormalApprox => normal_tails(&ranks, &abs, w_plus),
    };
    let p = match alternative {
        Alternative::Greater => upper,
        Alternative::Less => lower,
        Alternative::TwoSided => (2.0 * upper.min(lower)).min(1.0),
    };
    Ok(TestResult { n_effective: n, w_plus, w_minus, p, alternative, method })
}
