//! Set families, parameter sweeps and annealing search for extremal sets.

use std::collections::BTreeSet;
use std::io::Write;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cert2d;
use crate::energy::{self, ceil_log2};
use crate::error::{Error, Result};
use crate::ledger::Ledger;
use crate::numset::{self, NumberSet, SetStats};
use crate::rat::{sig12, Rat};

/// Default cap on the `|A|²` pairs enumerated per sweep row.
pub const SWEEP_DEFAULT_BUDGET: u128 = 1 << 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Interval,
    Ap,
    Gp,
    Randint,
    UnionAp,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "interval" => Family::Interval,
            "ap" => Family::Ap,
            "gp" => Family::Gp,
            "randint" => Family::Randint,
            "union_ap" | "union-ap" => Family::UnionAp,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown family '{other}' (expected interval, ap, gp, randint, union_ap)"
                )))
            }
        })
    }
}

/// A parametrized family of sets. Fields not used by a family are ignored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilySpec {
    pub kind: Family,
    pub n: usize,
    pub start: Rat,
    pub step: Rat,
    /// Common ratio of `gp`; must exceed 1.
    pub ratio: Rat,
    /// `randint` draws from `1..=range`.
    pub range: u64,
    pub seed: u64,
}

impl FamilySpec {
    pub fn new(kind: Family, n: usize) -> Self {
        FamilySpec {
            kind,
            n,
            start: Rat::one(),
            step: Rat::one(),
            ratio: Rat::from(2u64),
            range: 1000,
            seed: 0,
        }
    }

    pub fn with_n(&self, n: usize) -> Self {
        FamilySpec { n, ..self.clone() }
    }
}

/// The set described by `spec`; always exactly `spec.n` elements.
///
/// `union_ap` is `{s, s+d, …}` (`⌈n/2⌉` terms) together with the terms of
/// `{s + (d+1), s + 2(d+1), …}` needed to reach `n` distinct elements.
pub fn generate(spec: &FamilySpec) -> Result<NumberSet> {
    let n = spec.n;
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let positive = |what: &str, v: &Rat| {
        if v.is_positive() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "{what} must be positive, got {v}"
            )))
        }
    };
    let ap = |start: &Rat, step: &Rat, len: usize| -> Vec<Rat> {
        let mut out = Vec::with_capacity(len);
        let mut x = start.clone();
        for _ in 0..len {
            out.push(x.clone());
            x = &x + step;
        }
        out
    };
    let elements = match spec.kind {
        Family::Interval => ap(&Rat::one(), &Rat::one(), n),
        Family::Ap => {
            positive("start", &spec.start)?;
            positive("step", &spec.step)?;
            ap(&spec.start, &spec.step, n)
        }
        Family::Gp => {
            positive("start", &spec.start)?;
            if spec.ratio <= Rat::one() {
                return Err(Error::InvalidParameter(format!(
                    "gp ratio must exceed 1, got {}",
                    spec.ratio
                )));
            }
            let mut out = Vec::with_capacity(n);
            let mut x = spec.start.clone();
            for _ in 0..n {
                out.push(x.clone());
                x = &x * &spec.ratio;
            }
            out
        }
        Family::Randint => {
            if spec.range < n as u64 {
                return Err(Error::InvalidParameter(format!(
                    "randint range {} is smaller than n = {n}",
                    spec.range
                )));
            }
            let range = usize::try_from(spec.range)
                .map_err(|_| Error::InvalidParameter("randint range too large".into()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            index::sample(&mut rng, range, n)
                .into_iter()
                .map(|i| Rat::from(i as u64 + 1))
                .collect()
        }
        Family::UnionAp => {
            positive("start", &spec.start)?;
            positive("step", &spec.step)?;
            let mut set: BTreeSet<Rat> = ap(&spec.start, &spec.step, n.div_ceil(2))
                .into_iter()
                .collect();
            let step2 = &spec.step + &Rat::one();
            let mut x = &spec.start + &step2;
            while set.len() < n {
                set.insert(x.clone());
                x = &x + &step2;
            }
            set.into_iter().collect()
        }
    };
    NumberSet::new(elements)
}

/// One row of a sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub stats: SetStats,
    pub energy: u64,
    /// `|AA| |A+A|²`.
    pub thm_lhs: Rat,
    /// `|A|⁴ / (4⌈log₂|A|⌉)`.
    pub thm_rhs: Rat,
    pub thm_ratio: Rat,
    /// `max(|A+A|,|AA|)³ · 8⌈log₂|A|⌉ / |A|⁴`.
    pub corollary_slack: Rat,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepTable {
    pub family: FamilySpec,
    pub rows: Vec<SweepRow>,
    /// `(n, required pairs)` of the first size skipped for exceeding the
    /// budget; later sizes are not attempted.
    pub truncated: Option<(usize, u128)>,
    pub budget: u128,
}

pub const SWEEP_HEADER: [&str; 11] = [
    "n",
    "size",
    "sumset",
    "productset",
    "energy",
    "thm_lhs",
    "thm_rhs",
    "thm_ratio",
    "thm_ratio_decimal",
    "corollary_slack",
    "corollary_slack_decimal",
];

impl SweepTable {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(SWEEP_HEADER).map_err(csv_err)?;
        for r in &self.rows {
            out.write_record([
                r.n.to_string(),
                r.stats.size.to_string(),
                r.stats.sumset.to_string(),
                r.stats.productset.to_string(),
                r.energy.to_string(),
                r.thm_lhs.to_string(),
                r.thm_rhs.to_fraction_string(),
                r.thm_ratio.to_fraction_string(),
                sig12(r.thm_ratio.to_f64()),
                r.corollary_slack.to_fraction_string(),
                sig12(r.corollary_slack.to_f64()),
            ])
            .map_err(csv_err)?;
        }
        if let Some((n, required)) = self.truncated {
            let mut marker = vec![n.to_string(), "budget_exceeded".to_string()];
            marker.push(format!("{required} pairs > budget {}", self.budget));
            marker.resize(SWEEP_HEADER.len(), String::new());
            out.write_record(&marker).map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
    }
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

/// Sweep row for one set with `|A| ≥ 2`.
pub fn sweep_row(a: &NumberSet) -> Result<SweepRow> {
    let stats = numset::stats(a)?;
    let e = energy::energy(a)?;
    let n = a.len() as u64;
    let n4 = Rat::from(n) * Rat::from(n) * Rat::from(n) * Rat::from(n);
    let log = ceil_log2(a.len()) as u64;
    let ss = Rat::from(stats.sumset as u64);
    let thm_lhs = &(&Rat::from(stats.productset as u64) * &ss) * &ss;
    let thm_rhs = &n4 / &Rat::from(4 * log);
    let mx = Rat::from(stats.sumset.max(stats.productset) as u64);
    let corollary_slack = &(&(&mx * &mx) * &mx) * &Rat::from(8 * log) / n4;
    Ok(SweepRow {
        n: a.len(),
        thm_ratio: &thm_lhs / &thm_rhs,
        stats,
        energy: e,
        thm_lhs,
        thm_rhs,
        corollary_slack,
    })
}

/// Evaluates the family at each size in `ns`, stopping at the first size
/// whose `|A|²` pair count exceeds `budget`.
pub fn sweep(family: &FamilySpec, ns: &[usize], budget: u128) -> Result<SweepTable> {
    let mut rows = Vec::new();
    let mut truncated = None;
    for &n in ns {
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "sweep sizes must be at least 2, got {n}"
            )));
        }
        let required = (n as u128) * (n as u128);
        if required > budget {
            truncated = Some((n, required));
            break;
        }
        rows.push(sweep_row(&generate(&family.with_n(n))?)?);
    }
    Ok(SweepTable {
        family: family.clone(),
        rows,
        truncated,
        budget,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// `max(|A+A|, |AA|) / |A|^{4/3}`.
    MaxsideRatio,
    /// `|AA||A+A|² · 4⌈log₂|A|⌉ / |A|⁴`, the slack in the main theorem.
    ThmMainTightness,
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "maxside_ratio" | "maxside-ratio" | "maxside" => Ok(Objective::MaxsideRatio),
            "thm_main_tightness" | "thm-main-tightness" => Ok(Objective::ThmMainTightness),
            other => Err(Error::InvalidParameter(format!(
                "unknown objective '{other}' (expected maxside_ratio or thm_main_tightness)"
            ))),
        }
    }
}

/// Objective of an integer set: an exact key for comparisons and its real
/// value for the acceptance rule. For fixed `n`, ordering by key and by
/// value agree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Score {
    key: Rat,
}

fn sorted_pair_count(a: &[u64], op: fn(u64, u64) -> u64) -> usize {
    let mut v: Vec<u64> = Vec::with_capacity(a.len() * (a.len() + 1) / 2);
    for (i, &x) in a.iter().enumerate() {
        for &y in &a[i..] {
            v.push(op(x, y));
        }
    }
    v.sort_unstable();
    v.dedup();
    v.len()
}

impl Objective {
    fn score(self, a: &[u64]) -> Score {
        let ss = sorted_pair_count(a, |x, y| x + y) as u64;
        let pp = sorted_pair_count(a, |x, y| x * y) as u64;
        let key = match self {
            Objective::MaxsideRatio => Rat::from(ss.max(pp)),
            Objective::ThmMainTightness => {
                let n = a.len() as u64;
                Rat::new(pp * ss * ss * 4 * ceil_log2(a.len()) as u64, n * n * n * n)
            }
        };
        Score { key }
    }

    fn value(self, s: &Score, n: usize) -> f64 {
        match self {
            Objective::MaxsideRatio => s.key.to_f64() / (n as f64).powf(4.0 / 3.0),
            Objective::ThmMainTightness => s.key.to_f64(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchConfig {
    pub n: usize,
    /// Elements are drawn from `1..=range`.
    pub range: u64,
    pub objective: Objective,
    pub iterations: usize,
    pub initial_temperature: f64,
    pub cooling: f64,
    pub seed: u64,
    pub chains: usize,
}

impl SearchConfig {
    pub fn new(n: usize, range: u64, objective: Objective, seed: u64) -> Self {
        SearchConfig {
            n,
            range,
            objective,
            iterations: 10_000,
            initial_temperature: 1.0,
            cooling: 0.995,
            seed,
            chains: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TracePoint {
    pub iteration: usize,
    #[serde(serialize_with = "ser_sig12")]
    pub current: f64,
    #[serde(serialize_with = "ser_sig12")]
    pub best: f64,
}

fn ser_sig12<S: serde::Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&sig12(*x))
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchAudit {
    pub stats: SetStats,
    pub energy: u64,
    pub cs_lower_bound: Rat,
    pub inequalities: Ledger,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub config: SearchConfig,
    pub best: NumberSet,
    /// Exact objective key: `max(|A+A|,|AA|)` or the tightness ratio.
    pub best_key: Rat,
    #[serde(serialize_with = "ser_sig12")]
    pub best_value: f64,
    /// Chain that found the best set.
    pub chain: usize,
    /// Per-chain traces, one point per iteration plus the start.
    pub traces: Vec<Vec<TracePoint>>,
    pub audit: SearchAudit,
}

/// Seed of chain `i`, derived from the configured seed.
fn chain_seed(seed: u64, i: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    rng.gen()
}

fn run_chain(cfg: &SearchConfig, chain: usize) -> (Vec<u64>, Score, Vec<TracePoint>) {
    let mut rng = ChaCha8Rng::seed_from_u64(chain_seed(cfg.seed, chain));
    let n = cfg.n;
    let obj = cfg.objective;
    let mut cur: Vec<u64> = (1..=n as u64).collect();
    let mut cur_score = obj.score(&cur);
    let mut best = (cur.clone(), cur_score.clone());
    let mut trace = Vec::with_capacity(cfg.iterations + 1);
    trace.push(TracePoint {
        iteration: 0,
        current: obj.value(&cur_score, n),
        best: obj.value(&cur_score, n),
    });
    let mut temp = cfg.initial_temperature;
    let movable = cfg.range > n as u64;
    for it in 1..=cfg.iterations {
        if movable {
            let pos = rng.gen_range(0..n);
            let new = loop {
                let x = rng.gen_range(1..=cfg.range);
                if cur.binary_search(&x).is_err() {
                    break x;
                }
            };
            let mut cand = cur.clone();
            cand[pos] = new;
            cand.sort_unstable();
            let s = obj.score(&cand);
            let delta = obj.value(&s, n) - obj.value(&cur_score, n);
            let u: f64 = rng.gen();
            if delta <= 0.0 || u < (-delta / temp).exp() {
                cur = cand;
                cur_score = s;
                if (&cur_score, &cur) < (&best.1, &best.0) {
                    best = (cur.clone(), cur_score.clone());
                }
            }
        }
        temp *= cfg.cooling;
        trace.push(TracePoint {
            iteration: it,
            current: obj.value(&cur_score, n),
            best: obj.value(&best.1, n),
        });
    }
    (best.0, best.1, trace)
}

/// Simulated annealing over `n`-subsets of `1..=range` with single-element
/// replacement moves and geometric cooling, starting from `{1, …, n}`.
/// Independent chains run in parallel; the best set wins, ties going to
/// the lexicographically smallest set.
pub fn anneal(cfg: &SearchConfig) -> Result<SearchResult> {
    if cfg.n < 4 {
        return Err(Error::InvalidParameter(format!(
            "search needs n >= 4, got {}",
            cfg.n
        )));
    }
    if cfg.range < cfg.n as u64 {
        return Err(Error::InvalidParameter(format!(
            "range {} is smaller than n = {}",
            cfg.range, cfg.n
        )));
    }
    if cfg.chains == 0 {
        return Err(Error::InvalidParameter(
            "at least one chain is required".into(),
        ));
    }
    if !(cfg.initial_temperature > 0.0 && cfg.cooling > 0.0 && cfg.cooling <= 1.0) {
        return Err(Error::InvalidParameter(
            "temperature must be positive and cooling in (0, 1]".into(),
        ));
    }
    let runs: Vec<(Vec<u64>, Score, Vec<TracePoint>)> = (0..cfg.chains)
        .into_par_iter()
        .map(|c| run_chain(cfg, c))
        .collect();
    let (chain, (set, score, _)) = runs
        .iter()
        .enumerate()
        .min_by(|(_, x), (_, y)| (&x.1, &x.0).cmp(&(&y.1, &y.0)))
        .expect("at least one chain");
    let best = NumberSet::from_integers(set)?;
    let audit = audit(&best)?;
    Ok(SearchResult {
        config: cfg.clone(),
        best_value: cfg.objective.value(score, cfg.n),
        best_key: score.key.clone(),
        best,
        chain,
        traces: runs.into_iter().map(|r| r.2).collect(),
        audit,
    })
}

/// Statistics and theorem checks of a search result.
pub fn audit(a: &NumberSet) -> Result<SearchAudit> {
    let stats = numset::stats(a)?;
    let e = energy::energy(a)?;
    let (cs, cs_holds) = energy::cs_lower_bound(a)?;
    let inequalities = cert2d::verify_theorem_main(a)?;
    assert!(
        inequalities.all_binding_hold() && cs_holds,
        "theorem check failed on {a}: {inequalities}"
    );
    Ok(SearchAudit {
        stats,
        energy: e,
        cs_lower_bound: cs,
        inequalities,
    })
}

/// Exhaustive minimum of the objective over all `n`-subsets of `1..=range`,
/// with the lexicographically smallest minimizer.
pub fn exhaustive_best(n: usize, range: u64, objective: Objective) -> (NumberSet, Rat) {
    let mut best: Option<(Score, Vec<u64>)> = None;
    let mut cur: Vec<u64> = (1..=n as u64).collect();
    loop {
        let s = objective.score(&cur);
        if best.as_ref().is_none_or(|(b, _)| s < *b) {
            best = Some((s, cur.clone()));
        }
        // next combination in lexicographic order
        let mut i = n;
        loop {
            if i == 0 {
                let (s, v) = best.expect("at least one subset");
                return (NumberSet::from_integers(&v).expect("positive"), s.key);
            }
            i -= 1;
            if cur[i] < range - (n - 1 - i) as u64 {
                cur[i] += 1;
                for j in i + 1..n {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}
