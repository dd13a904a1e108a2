//! k-fold triangulation certificate.
//!
//! Covers `×^k A` by lines through the origin, keeps the heavy lines, maps
//! them to points of the affine chart, triangulates, and checks that the
//! k-fold vector sums over the simplices are disjoint and of product size,
//! which bounds `|kA|^k` from below.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::energy;
use crate::error::{Error, Result};
use crate::geomkd::{
    placing_triangulation, symmetry_check, validate_triangulation, ChartPoint, LineKD,
    Triangulation, TriangulationReport,
};
use crate::kernel::{self, with_image, Image, Int};
use crate::ledger::{Ledger, Relation};
use crate::numset::{self, NumberSet};
use crate::rat::{sig12, Rat};

/// Default cap on enumerated points, both for `×^k A` and for the simplex
/// sums.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// Above this many lines the JSON carries a count histogram instead of the
/// full cover.
pub const COVER_LISTING_LIMIT: usize = 10_000;

pub const DEGENERATE_STATUS: &str = "degenerate: affine hull dimension < k-1";

/// Lines through the origin with the number of points of `×^k A` on each,
/// in lexicographic order of their chart points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineCover {
    pub k: usize,
    pub lines: Vec<LineKD>,
}

impl LineCover {
    pub fn total(&self) -> u128 {
        self.lines.iter().map(|l| l.count as u128).sum()
    }

    pub fn max_count(&self) -> u64 {
        self.lines.iter().map(|l| l.count).max().unwrap_or(0)
    }
}

fn real<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&sig12(*x))
}

fn big<S: Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn opt_real<S: Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_str(&sig12(*v)),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct KFoldParameters {
    pub k: usize,
    pub set_size: usize,
    pub ratioset_size: usize,
    pub productset_size: usize,
    /// `|A/A| = |A|^{1+2ε*}`.
    #[serde(serialize_with = "real")]
    pub epsilon_star: f64,
    /// `|A|^k / (2 |A/A|^{k-1})`.
    pub threshold: Rat,
    #[serde(serialize_with = "big")]
    pub threshold_ceil: BigInt,
    /// `(k · 2^{k+1})^{-1/k}`.
    #[serde(serialize_with = "real")]
    pub c_k: f64,
    /// `2(k-1)ε*`.
    #[serde(serialize_with = "real")]
    pub delta: f64,
    /// `ε* / ε_AA` where `|AA| = |A|^{1+ε_AA}`; a Plünnecke-type inequality
    /// predicts at most 1. Absent when `ε_AA = 0`.
    #[serde(serialize_with = "opt_real")]
    pub plunnecke_ratio: Option<f64>,
}

impl KFoldParameters {
    pub fn new(a: &NumberSet, k: usize) -> Result<Self> {
        check_k(k)?;
        a.ensure_nonempty()?;
        let n = a.len();
        let rs = numset::ratioset_size(a, a)?;
        let ps = numset::productset_size(a, a)?;
        let nf = n as f64;
        let epsilon_star = if n > 1 {
            ((rs as f64).ln() / nf.ln() - 1.0) / 2.0
        } else {
            0.0
        };
        let eps_aa = if n > 1 {
            (ps as f64).ln() / nf.ln() - 1.0
        } else {
            0.0
        };
        let threshold = Rat::from_integer(BigInt::from(n).pow(k as u32))
            / Rat::from_integer(BigInt::from(2) * BigInt::from(rs).pow(k as u32 - 1));
        let kf = k as f64;
        Ok(KFoldParameters {
            k,
            set_size: n,
            ratioset_size: rs,
            productset_size: ps,
            epsilon_star,
            threshold_ceil: threshold.ceil(),
            threshold,
            c_k: (kf * 2f64.powi(k as i32 + 1)).powf(-1.0 / kf),
            delta: 2.0 * (kf - 1.0) * epsilon_star,
            plunnecke_ratio: (eps_aa > 0.0).then(|| epsilon_star / eps_aa),
        })
    }
}

fn check_k(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "k must be at least 2, got {k}"
        )));
    }
    Ok(())
}

/// Largest `n` with `n^k ≤ budget`.
fn suggested_size(budget: u128, k: usize) -> usize {
    let mut n = (budget as f64).powf(1.0 / k as f64) as u128 + 1;
    while n > 0 && n.checked_pow(k as u32).is_none_or(|p| p > budget) {
        n -= 1;
    }
    n as usize
}

fn check_budget(n: usize, k: usize, budget: u128) -> Result<()> {
    let required = (n as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if required > budget {
        return Err(Error::BudgetExceeded {
            required,
            budget,
            suggested: suggested_size(budget, k),
        });
    }
    Ok(())
}

fn primitive<T: Int>(v: &[T]) -> Vec<T> {
    let g = v.iter().fold(T::zero(), |g, x| g.gcd(x));
    v.iter().map(|x| x.clone() / g.clone()).collect()
}

/// Odometer over `k`-tuples of indices below `n` whose first index is `i0`.
fn for_each_tuple(i0: usize, n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut idx = vec![0; k];
    idx[0] = i0;
    loop {
        f(&idx);
        let mut j = k;
        loop {
            j -= 1;
            if j == 0 {
                return;
            }
            idx[j] += 1;
            if idx[j] < n {
                break;
            }
            idx[j] = 0;
        }
    }
}

/// Primitive integer directions of `×^k vals` with multiplicities.
fn cover_counts<T: Int>(vals: &[T], k: usize) -> Vec<(Vec<T>, u64)> {
    let n = vals.len();
    let merged = (0..n)
        .into_par_iter()
        .fold(HashMap::<Vec<T>, u64>::new, |mut acc, i0| {
            let mut v = Vec::with_capacity(k);
            for_each_tuple(i0, n, k, |idx| {
                v.clear();
                v.extend(idx.iter().map(|&i| vals[i].clone()));
                *acc.entry(primitive(&v)).or_insert(0) += 1;
            });
            acc
        })
        .reduce(HashMap::new, |a, b| {
            if a.len() < b.len() {
                return merge(b, a);
            }
            merge(a, b)
        });
    merged.into_iter().collect()
}

fn merge<T: Int>(mut a: HashMap<Vec<T>, u64>, b: HashMap<Vec<T>, u64>) -> HashMap<Vec<T>, u64> {
    for (key, c) in b {
        *a.entry(key).or_insert(0) += c;
    }
    a
}

fn big_direction<T: Int>(u: &[T]) -> Vec<BigInt> {
    u.iter().map(|x| BigInt::from(kernel::to_big(x))).collect()
}

fn line_from_direction<T: Int>(u: &[T], count: u64) -> LineKD {
    let b = big_direction(u);
    LineKD {
        direction: b
            .iter()
            .map(|x| Rat::new(x.clone(), b[0].clone()))
            .collect(),
        count,
    }
}

/// Covers `×^k A` by lines through the origin; each point lies on the line
/// with direction `(1, a₂/a₁, …, a_k/a₁)`.
pub fn line_cover(a: &NumberSet, k: usize) -> Result<LineCover> {
    line_cover_with_budget(a, k, DEFAULT_BUDGET)
}

pub fn line_cover_with_budget(a: &NumberSet, k: usize, budget: u128) -> Result<LineCover> {
    check_k(k)?;
    a.ensure_nonempty()?;
    check_budget(a.len(), k, budget)?;
    let img = Image::joint(&[a.elements()]);
    let mut lines: Vec<LineKD> = with_image!(&img, |vals, _scale| cover_counts(&vals[0], k)
        .into_iter()
        .map(|(u, c)| line_from_direction(&u, c))
        .collect());
    sort_lines(&mut lines);
    Ok(LineCover { k, lines })
}

fn sort_lines(lines: &mut Vec<LineKD>) {
    let mut keyed: Vec<(ChartPoint, LineKD)> =
        lines.drain(..).map(|l| (l.chart_point(), l)).collect();
    keyed.sort_by(|x, y| x.0.lex_cmp(&y.0));
    lines.extend(keyed.into_iter().map(|(_, l)| l));
}

/// Lines carrying at least `⌈T⌉` points.
pub fn heavy_lines(cover: &LineCover, params: &KFoldParameters) -> Vec<LineKD> {
    cover
        .lines
        .iter()
        .filter(|l| BigInt::from(l.count) >= params.threshold_ceil)
        .cloned()
        .collect()
}

/// Heavy-line checks shared by the complete and degenerate certificates.
fn heavy_checks(cover: &LineCover, heavy: &[LineKD], p: &KFoldParameters, ledger: &mut Ledger) {
    let k = p.k as u32;
    let n = BigInt::from(p.set_size);
    let nk = n.pow(k);
    let rk = BigInt::from(p.ratioset_size).pow(k - 1);
    let half = Rat::new(1, 2);
    ledger.count("coverConservation", cover.total(), Relation::Eq, nk.clone());
    ledger.count(
        "coverLineCount",
        cover.lines.len(),
        Relation::Le,
        rk.clone(),
    );
    ledger.count(
        "maxPointsPerLine",
        cover.max_count(),
        Relation::Le,
        n.clone(),
    );
    ledger.exact(
        "heavyThresholdIdentity",
        Rat::from_integer(&p.threshold_ceil * &rk),
        Relation::Le,
        Rat::from_integer(nk.clone()) * half.clone() + Rat::from_integer(rk),
    );
    let coverage: u128 = heavy.iter().map(|l| l.count as u128).sum();
    ledger.exact(
        "heavyCoverage",
        Rat::from_integer(coverage),
        Relation::Ge,
        Rat::from_integer(nk) * half.clone(),
    );
    ledger.exact(
        "heavyLineCount",
        Rat::from_integer(heavy.len()),
        Relation::Ge,
        Rat::from_integer(n.pow(k - 1)) * half,
    );
    let min_heavy = heavy.iter().map(|l| l.count).min().unwrap_or(0);
    ledger.count(
        "heavyMinCount",
        min_heavy,
        Relation::Ge,
        p.threshold_ceil.clone(),
    );
}

/// Summary of the cover for serialization.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CoverSummary {
    pub lines: usize,
    pub points: u128,
    pub max_count: u64,
    /// Full cover as `[direction, count]`, present up to
    /// [`COVER_LISTING_LIMIT`] lines.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<(Vec<Rat>, u64)>>,
    /// `[count, number of lines]`, ascending; present above the limit.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub histogram: Option<Vec<(u64, usize)>>,
}

impl CoverSummary {
    fn new(cover: &LineCover) -> Self {
        let (entries, histogram) = if cover.lines.len() <= COVER_LISTING_LIMIT {
            let e = cover
                .lines
                .iter()
                .map(|l| (l.direction.clone(), l.count))
                .collect();
            (Some(e), None)
        } else {
            let mut h: BTreeMap<u64, usize> = BTreeMap::new();
            for l in &cover.lines {
                *h.entry(l.count).or_insert(0) += 1;
            }
            (None, Some(h.into_iter().collect()))
        };
        CoverSummary {
            lines: cover.lines.len(),
            points: cover.total(),
            max_count: cover.max_count(),
            entries,
            histogram,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CertificateKD {
    pub set: NumberSet,
    pub k: usize,
    pub params: KFoldParameters,
    pub cover: LineCover,
    pub heavy: Vec<LineKD>,
    /// Chart points of the heavy lines, in the vertex order of `tau`.
    pub points: Vec<ChartPoint>,
    pub symmetric: bool,
    /// `None` when the heavy lines do not span the chart.
    pub tau: Option<Triangulation>,
    pub tau_report: Option<TriangulationReport>,
    /// `(product of line counts, size of the k-fold sum set)` per simplex.
    pub simplex_sums: Vec<(u128, usize)>,
    pub kfold_sumset_size: usize,
    pub status: String,
    pub checks: Ledger,
}

impl CertificateKD {
    pub fn passes(&self) -> bool {
        self.tau.is_some() && self.checks.all_binding_hold()
    }

    pub fn is_degenerate(&self) -> bool {
        self.tau.is_none()
    }

    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        #[serde(rename_all = "camelCase")]
        struct Json<'a> {
            set: &'a NumberSet,
            k: usize,
            status: &'a str,
            params: &'a KFoldParameters,
            cover: CoverSummary,
            heavy_lines: usize,
            heavy_coverage: u128,
            #[serde(rename = "P")]
            points: &'a [ChartPoint],
            symmetric: bool,
            triangulation_method: &'static str,
            simplices: Option<&'a [Vec<usize>]>,
            simplex_sizes: Vec<[u128; 2]>,
            triangulation: Option<&'a TriangulationReport>,
            kfold_sumset_size: usize,
            inequalities: &'a Ledger,
        }
        let j = Json {
            set: &self.set,
            k: self.k,
            status: &self.status,
            params: &self.params,
            cover: CoverSummary::new(&self.cover),
            heavy_lines: self.heavy.len(),
            heavy_coverage: self.heavy.iter().map(|l| l.count as u128).sum(),
            points: &self.points,
            symmetric: self.symmetric,
            triangulation_method: "placing, lexicographic insertion",
            simplices: self.tau.as_ref().map(|t| t.simplices.as_slice()),
            simplex_sizes: self
                .simplex_sums
                .iter()
                .map(|&(p, s)| [p, s as u128])
                .collect(),
            triangulation: self.tau_report.as_ref(),
            kfold_sumset_size: self.kfold_sumset_size,
            inequalities: &self.checks,
        };
        Ok(serde_json::to_string_pretty(&j)?)
    }
}

/// Points `t·u` of the line with primitive direction `u` whose coordinates
/// all lie in `vals`.
fn line_points<T: Int>(u: &[T], members: &HashSet<T>, vals: &[T]) -> Vec<Vec<T>> {
    vals.iter()
        .filter(|a| a.is_multiple_of(&u[0]))
        .map(|a| a.clone() / u[0].clone())
        .map(|t| u.iter().map(|x| x.clone() * t.clone()).collect::<Vec<T>>())
        .filter(|p| p.iter().all(|x| members.contains(x)))
        .collect()
}

/// Sorted, distinct `{p₁ + … + p_k : p_i ∈ lines[i]}`.
fn vector_sums<T: Int>(lines: &[&[Vec<T>]]) -> Vec<Vec<T>> {
    let dim = lines[0].first().map_or(0, |p| p.len());
    let mut acc: Vec<Vec<T>> = vec![vec![T::zero(); dim]];
    for pts in lines {
        let mut next = Vec::with_capacity(acc.len() * pts.len());
        for s in &acc {
            for p in pts.iter() {
                next.push(
                    s.iter()
                        .zip(p)
                        .map(|(x, y)| x.clone() + y.clone())
                        .collect(),
                );
            }
        }
        acc = next;
    }
    acc.sort_unstable();
    acc.dedup();
    acc
}

struct SumChecks {
    sizes: Vec<(u128, usize)>,
    collisions: usize,
    outside: usize,
}

fn simplex_sum_checks<T: Int>(
    vals: &[T],
    kfold: &HashSet<T>,
    heavy_dirs: &[Vec<T>],
    simplices: &[Vec<usize>],
) -> SumChecks {
    let members: HashSet<T> = vals.iter().cloned().collect();
    let points: Vec<Vec<Vec<T>>> = heavy_dirs
        .par_iter()
        .map(|u| line_points(u, &members, vals))
        .collect();
    let sums: Vec<Vec<Vec<T>>> = simplices
        .par_iter()
        .map(|s| {
            let lines: Vec<&[Vec<T>]> = s.iter().map(|&v| points[v].as_slice()).collect();
            vector_sums(&lines)
        })
        .collect();
    let sizes = simplices
        .iter()
        .zip(&sums)
        .map(|(s, sum)| {
            let prod: u128 = s.iter().map(|&v| points[v].len() as u128).product();
            (prod, sum.len())
        })
        .collect();
    let outside = sums
        .par_iter()
        .map(|sum| {
            sum.iter()
                .filter(|p| p.iter().any(|x| !kfold.contains(x)))
                .count()
        })
        .sum();
    let mut owner: HashMap<&[T], usize> = HashMap::new();
    let mut collisions = 0;
    for (id, sum) in sums.iter().enumerate() {
        for p in sum {
            if owner.insert(p.as_slice(), id).is_some() {
                collisions += 1;
            }
        }
    }
    SumChecks {
        sizes,
        collisions,
        outside,
    }
}

/// Primitive integer direction of a heavy line in the common scale of `vals`.
fn scaled_direction<T: Int>(line: &LineKD) -> Vec<T> {
    line.chart_point()
        .homogeneous()
        .iter()
        .map(|x| {
            let b: BigUint = x.to_biguint().expect("positive direction");
            T::from_big(&b).expect("direction fits the image width")
        })
        .collect()
}

/// Runs the full k-fold pipeline on `A`.
pub fn build_kfold_certificate(a: &NumberSet, k: usize) -> Result<CertificateKD> {
    build_kfold_certificate_with_budget(a, k, DEFAULT_BUDGET)
}

pub fn build_kfold_certificate_with_budget(
    a: &NumberSet,
    k: usize,
    budget: u128,
) -> Result<CertificateKD> {
    check_k(k)?;
    a.ensure_nonempty()?;
    if a.len() < 2 {
        return Err(Error::NotApplicable(
            "the k-fold certificate needs |A| >= 2".into(),
        ));
    }
    let params = KFoldParameters::new(a, k)?;
    let cover = line_cover_with_budget(a, k, budget)?;
    let heavy = heavy_lines(&cover, &params);
    let mut checks = Ledger::new();
    heavy_checks(&cover, &heavy, &params, &mut checks);
    if k == 2 {
        let profile = energy::ratio_profile(a)?;
        let ceil = params.threshold_ceil.to_u64().unwrap_or(u64::MAX);
        let expected: HashSet<Rat> = profile
            .entries_where(|m| m >= ceil)
            .into_iter()
            .map(|(r, _)| r)
            .collect();
        let got: HashSet<Rat> = heavy.iter().map(|l| l.direction[1].clone()).collect();
        checks.count(
            "heavySlopesVsRatioProfile",
            expected.symmetric_difference(&got).count(),
            Relation::Eq,
            0,
        );
    }

    let points: Vec<ChartPoint> = heavy.iter().map(|l| l.chart_point()).collect();
    let symmetric = symmetry_check(&points, k);
    checks.count("chartPointsSymmetric", symmetric as u8, Relation::Eq, 1);

    let kfold = numset::kfold_sumset(a, k)?;
    let kfold_size = kfold.len();
    let tau = match placing_triangulation(&points, k - 1) {
        Ok(t) => t,
        Err(Error::DegeneratePointSet { .. }) => {
            return Ok(CertificateKD {
                set: a.clone(),
                k,
                params,
                cover,
                heavy,
                points,
                symmetric,
                tau: None,
                tau_report: None,
                simplex_sums: Vec::new(),
                kfold_sumset_size: kfold_size,
                status: DEGENERATE_STATUS.to_string(),
                checks,
            });
        }
        Err(e) => return Err(e),
    };
    // placing sorts and deduplicates; heavy lines are already in that order
    debug_assert_eq!(tau.vertices, points);
    let report = validate_triangulation(&tau);
    checks.count(
        "triangulationFailures",
        report.failures.len(),
        Relation::Eq,
        0,
    );
    checks.count(
        "simplexCountBound",
        tau.simplices.len() + (k - 1),
        Relation::Ge,
        points.len(),
    );

    let products: u128 = tau
        .simplices
        .iter()
        .map(|s| s.iter().map(|&v| heavy[v].count as u128).product::<u128>())
        .sum();
    if products > budget {
        return Err(Error::BudgetExceeded {
            required: products,
            budget,
            suggested: suggested_size(budget, k),
        });
    }

    let img = Image::joint(&[a.elements(), kfold.elements()]);
    let sums = with_image!(&img, |vals, _scale| {
        let kf: HashSet<_> = vals[1].iter().cloned().collect();
        let dirs: Vec<Vec<_>> = heavy.iter().map(scaled_direction).collect();
        simplex_sum_checks(&vals[0], &kf, &dirs, &tau.simplices)
    });
    let violations = sums.sizes.iter().filter(|(p, s)| *p != *s as u128).count();
    let counts_match = tau
        .simplices
        .iter()
        .zip(&sums.sizes)
        .all(|(s, (p, _))| *p == s.iter().map(|&v| heavy[v].count as u128).product::<u128>());
    checks.count(
        "linePointCountsMatchCover",
        counts_match as u8,
        Relation::Eq,
        1,
    );
    checks.count("productRuleViolations", violations, Relation::Eq, 0);
    checks.count("simplexSumCollisions", sums.collisions, Relation::Eq, 0);
    checks.count("simplexSumsOutsideKfoldGrid", sums.outside, Relation::Eq, 0);
    let total: u128 = sums.sizes.iter().map(|&(_, s)| s as u128).sum();
    checks.count(
        "simplexSumTotal",
        total,
        Relation::Le,
        BigInt::from(kfold_size).pow(k as u32),
    );

    let n = a.len() as f64;
    let kf = k as f64;
    // c_k |A|^{2 - 1/k - 2(k-1)ε*}, with |A|^{2ε*} = |A/A|/|A|
    let log_rhs = params.c_k.ln() + (2.0 - 1.0 / kf) * n.ln()
        - (kf - 1.0) * ((params.ratioset_size as f64).ln() - n.ln());
    checks.real(
        "kfoldFinalBound",
        kfold_size as f64,
        Relation::Ge,
        log_rhs.exp(),
    );

    Ok(CertificateKD {
        set: a.clone(),
        k,
        params,
        cover,
        heavy,
        points,
        symmetric,
        tau: Some(tau),
        tau_report: Some(report),
        simplex_sums: sums.sizes,
        kfold_sumset_size: kfold_size,
        status: "complete".to_string(),
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn set(v: &[u64]) -> NumberSet {
        NumberSet::from_integers(v).unwrap()
    }

    #[test]
    fn cover_of_1_2_cubed() {
        let c = line_cover(&set(&[1, 2]), 3).unwrap();
        assert_eq!(c.lines.len(), 7);
        let mut counts: Vec<u64> = c.lines.iter().map(|l| l.count).collect();
        counts.sort_unstable_by(|a, b| b.cmp(a));
        assert_eq!(counts, vec![2, 1, 1, 1, 1, 1, 1]);
        let diag = c.lines.iter().find(|l| l.count == 2).unwrap();
        assert_eq!(diag.direction, vec![Rat::one(); 3]);
    }

    #[test]
    fn singleton_cover_and_threshold() {
        let a = set(&[5]);
        let c = line_cover(&a, 2).unwrap();
        assert_eq!(c.lines.len(), 1);
        assert_eq!(c.lines[0].count, 1);
        let p = KFoldParameters::new(&a, 2).unwrap();
        assert_eq!(p.threshold, Rat::new(1, 2));
        assert_eq!(heavy_lines(&c, &p).len(), 1);
        assert!(matches!(
            build_kfold_certificate(&a, 3),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn parameters() {
        let p = KFoldParameters::new(&set(&[1, 2]), 3).unwrap();
        assert_eq!(p.threshold, Rat::new(4, 9));
        assert_eq!(p.threshold_ceil, BigInt::one());
        let p2 = KFoldParameters::new(&set(&[1, 2, 3]), 2).unwrap();
        assert!((p2.c_k - 0.25).abs() < 1e-15);
        assert!(KFoldParameters::new(&set(&[1, 2]), 1).is_err());
    }

    #[test]
    fn gp_diagonal_carries_every_point() {
        let a = set(&[1, 3, 9, 27, 81]);
        let c = line_cover(&a, 2).unwrap();
        let diag = c
            .lines
            .iter()
            .find(|l| l.direction == vec![Rat::one(), Rat::one()])
            .unwrap();
        assert_eq!(diag.count, 5);
    }

    #[test]
    fn interval_eight_coverage() {
        let a = NumberSet::interval(8);
        let p = KFoldParameters::new(&a, 2).unwrap();
        let c = line_cover(&a, 2).unwrap();
        let h = heavy_lines(&c, &p);
        let coverage: u64 = h.iter().map(|l| l.count).sum();
        assert!(coverage >= 32);
    }

    #[test]
    fn certificate_1_2_k3() {
        let cert = build_kfold_certificate(&set(&[1, 2]), 3).unwrap();
        assert_eq!(cert.points.len(), 7);
        assert_eq!(cert.heavy.len(), 7);
        assert!(cert.tau.is_some());
        assert!(cert.passes(), "{}", cert.checks);
    }

    #[test]
    fn certificate_interval_six_k3() {
        let cert = build_kfold_certificate(&NumberSet::interval(6), 3).unwrap();
        assert!(cert.passes(), "{}", cert.checks);
        assert!(cert.symmetric);
    }

    #[test]
    fn certificate_k2_matches_ratio_profile() {
        for a in [set(&[1, 2, 3, 4, 6, 8, 12]), set(&[2, 3, 5, 7, 11])] {
            let cert = build_kfold_certificate(&a, 2).unwrap();
            assert_eq!(cert.checks.holds("heavySlopesVsRatioProfile"), Some(true));
            assert!(cert.passes(), "{}", cert.checks);
        }
    }

    #[test]
    fn rational_set_certificate() {
        let a =
            NumberSet::new([Rat::new(1, 2), Rat::new(2, 3), Rat::one(), Rat::new(3, 2)]).unwrap();
        let cert = build_kfold_certificate(&a, 3).unwrap();
        assert!(cert.passes(), "{}", cert.checks);
    }

    #[test]
    fn budget_is_enforced() {
        let r = line_cover_with_budget(&NumberSet::interval(30), 3, 1000);
        match r {
            Err(Error::BudgetExceeded { suggested, .. }) => assert_eq!(suggested, 10),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn json_is_deterministic() {
        let a = set(&[1, 2, 3, 5]);
        let x = build_kfold_certificate(&a, 3).unwrap().to_json().unwrap();
        let y = build_kfold_certificate(&a, 3).unwrap().to_json().unwrap();
        assert_eq!(x, y);
        assert!(x.contains("\"P\""));
    }
}
