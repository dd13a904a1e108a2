//! Dyadic ray decomposition certificate.
//!
//! Picks the dyadic class `I` carrying the largest share of `E(A)`, takes the
//! lines `y = s_j x` through the origin for its ratios `s₁ < … < s_m`, adds
//! the vertical line `x = a₁`, and forms the vector sumsets of consecutive
//! line pairs. Every claimed property (sizes, product rule, disjointness,
//! containment in `(A+A) × (A+A)`, the counting chain) is evaluated exactly
//! and recorded, including overlap witnesses where pair sumsets meet.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::Serialize;

use crate::energy::{self, ceil_log2};
use crate::error::{Error, Result};
use crate::kernel::{self, with_image, Image, Int};
use crate::ledger::{Ledger, Relation};
use crate::numset::{self, NumberSet};
use crate::rat::Rat;

pub type Point2 = (Rat, Rat);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Slope {
    Finite(Rat),
    Vertical,
}

impl Serialize for Slope {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Slope::Finite(r) => r.serialize(s),
            Slope::Vertical => s.serialize_str("vertical"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OverlapWitness {
    /// 1-based index of the other pair.
    pub with: usize,
    pub points: Vec<Point2>,
}

/// Points of `A × A` on two lines and the vector sumset between them.
#[derive(Clone, Debug)]
pub struct LinePair2D {
    /// 1-based; pair `i` joins lines `i` and `i + 1`.
    pub i: usize,
    pub line_low: Slope,
    pub line_high: Slope,
    pub points_low: Vec<Point2>,
    pub points_high: Vec<Point2>,
    /// Sorted, distinct.
    pub pair_sumset: Vec<Point2>,
    pub overlap_witnesses: Vec<OverlapWitness>,
}

impl LinePair2D {
    pub fn is_finite(&self) -> bool {
        matches!(self.line_high, Slope::Finite(_))
    }

    pub fn product_rule_holds(&self) -> bool {
        self.pair_sumset.len() == self.points_low.len() * self.points_high.len()
    }
}

#[derive(Clone, Debug)]
pub struct Certificate2D {
    pub set: NumberSet,
    pub energy: u64,
    pub index: usize,
    pub ratios: Vec<Rat>,
    pub m: usize,
    pub class_sum: u64,
    /// `a₁`; the vertical line carries `(a₁, y)` for every `y ∈ A`.
    pub vertical_x: Rat,
    pub vertical_points: Vec<Point2>,
    pub pairs: Vec<LinePair2D>,
    pub union_size: usize,
    pub sumset_size: usize,
    pub productset_size: usize,
    /// Sums lying outside `(A+A) × (A+A)`; always expected empty.
    pub outside_points: Vec<Point2>,
    pub inequalities: Ledger,
}

impl Certificate2D {
    pub fn passes(&self) -> bool {
        self.inequalities.all_binding_hold()
    }

    /// Overlap witnesses between pairs `i` and `j` (1-based).
    pub fn overlap(&self, i: usize, j: usize) -> Vec<Point2> {
        self.pairs
            .get(i.wrapping_sub(1))
            .and_then(|p| p.overlap_witnesses.iter().find(|w| w.with == j))
            .map(|w| w.points.clone())
            .unwrap_or_default()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&CertificateJson::from(self))?)
    }
}

#[derive(Serialize)]
struct PairJson<'a> {
    i: usize,
    slopes: [&'a Slope; 2],
    /// `[|points on low line|, |points on high line|, |pair sumset|]`
    sizes: [usize; 3],
    #[serde(rename = "overlapWitnesses")]
    overlap_witnesses: &'a [OverlapWitness],
}

#[derive(Serialize)]
struct VerticalJson<'a> {
    x: &'a Rat,
    points: usize,
}

#[derive(Serialize)]
struct CertificateJson<'a> {
    set: &'a NumberSet,
    energy: u64,
    #[serde(rename = "I")]
    index: usize,
    #[serde(rename = "D")]
    ratios: &'a [Rat],
    m: usize,
    #[serde(rename = "classSum")]
    class_sum: u64,
    #[serde(rename = "verticalLine")]
    vertical: VerticalJson<'a>,
    pairs: Vec<PairJson<'a>>,
    #[serde(rename = "unionSize")]
    union_size: usize,
    #[serde(rename = "sumsetSize")]
    sumset_size: usize,
    #[serde(rename = "productsetSize")]
    productset_size: usize,
    inequalities: &'a Ledger,
}

impl<'a> From<&'a Certificate2D> for CertificateJson<'a> {
    fn from(c: &'a Certificate2D) -> Self {
        CertificateJson {
            set: &c.set,
            energy: c.energy,
            index: c.index,
            ratios: &c.ratios,
            m: c.m,
            class_sum: c.class_sum,
            vertical: VerticalJson {
                x: &c.vertical_x,
                points: c.vertical_points.len(),
            },
            pairs: c
                .pairs
                .iter()
                .map(|p| PairJson {
                    i: p.i,
                    slopes: [&p.line_low, &p.line_high],
                    sizes: [p.points_low.len(), p.points_high.len(), p.pair_sumset.len()],
                    overlap_witnesses: &p.overlap_witnesses,
                })
                .collect(),
            union_size: c.union_size,
            sumset_size: c.sumset_size,
            productset_size: c.productset_size,
            inequalities: &c.inequalities,
        }
    }
}

fn require_applicable(a: &NumberSet) -> Result<()> {
    if a.len() < 2 {
        Err(Error::NotApplicable(format!(
            "|A| = {} < 2 makes ⌈log₂|A|⌉ = 0",
            a.len()
        )))
    } else {
        Ok(())
    }
}

type IPoint<T> = (T, T);

/// Integer-scaled geometry of the construction.
struct Geometry<T> {
    lines: Vec<Vec<IPoint<T>>>,
    vertical: Vec<IPoint<T>>,
    pair_sums: Vec<Vec<IPoint<T>>>,
    /// point -> 0-based indices of the pairs whose sumset contains it
    incidence: BTreeMap<IPoint<T>, Vec<usize>>,
    outside: Vec<IPoint<T>>,
}

fn line_points<T: Int>(vals: &[T], p: &T, q: &T) -> Vec<IPoint<T>> {
    vals.iter()
        .filter(|b| (*b).is_multiple_of(q))
        .filter_map(|b| {
            let y = b.clone() / q.clone() * p.clone();
            vals.binary_search(&y).ok().map(|_| (b.clone(), y))
        })
        .collect()
}

fn build_geometry<T: Int>(vals: &[T], slopes: &[(BigUint, BigUint)]) -> Geometry<T> {
    let lines: Vec<Vec<IPoint<T>>> = slopes
        .iter()
        .map(|(p, q)| {
            let p = T::from_big(p).expect("ratio fits the kernel width");
            let q = T::from_big(q).expect("ratio fits the kernel width");
            line_points(vals, &p, &q)
        })
        .collect();
    let a1 = vals[0].clone();
    let vertical: Vec<IPoint<T>> = vals.iter().map(|y| (a1.clone(), y.clone())).collect();

    let m = lines.len();
    let mut pair_sums = Vec::with_capacity(m);
    for i in 0..m {
        let low = &lines[i];
        let high = if i + 1 < m { &lines[i + 1] } else { &vertical };
        let mut sums: Vec<IPoint<T>> = low
            .iter()
            .flat_map(|(x1, y1)| {
                high.iter()
                    .map(move |(x2, y2)| (x1.clone() + x2.clone(), y1.clone() + y2.clone()))
            })
            .collect();
        sums.sort_unstable();
        sums.dedup();
        pair_sums.push(sums);
    }

    let mut incidence: BTreeMap<IPoint<T>, Vec<usize>> = BTreeMap::new();
    for (i, sums) in pair_sums.iter().enumerate() {
        for pt in sums {
            incidence.entry(pt.clone()).or_default().push(i);
        }
    }

    let grid = kernel::pair_combine(vals, vals, kernel::add);
    let outside = incidence
        .keys()
        .filter(|(x, y)| grid.binary_search(x).is_err() || grid.binary_search(y).is_err())
        .cloned()
        .collect();

    Geometry {
        lines,
        vertical,
        pair_sums,
        incidence,
        outside,
    }
}

fn to_point<T: Int>(p: &IPoint<T>, scale: &BigUint) -> Point2 {
    (kernel::unscale(&p.0, scale), kernel::unscale(&p.1, scale))
}

struct Assembled {
    vertical_points: Vec<Point2>,
    pairs: Vec<LinePair2D>,
    union_size: usize,
    outside_points: Vec<Point2>,
    overlap_incidences: usize,
}

fn assemble<T: Int>(vals: &[T], scale: &BigUint, ratios: &[Rat]) -> Assembled {
    let slopes: Vec<(BigUint, BigUint)> = ratios
        .iter()
        .map(|r| {
            (
                r.numer().to_biguint().expect("positive"),
                r.denom().to_biguint().expect("positive"),
            )
        })
        .collect();
    let g = build_geometry(vals, &slopes);
    let m = g.lines.len();

    let mut witnesses: Vec<BTreeMap<usize, Vec<Point2>>> = vec![BTreeMap::new(); m];
    let mut overlap_incidences = 0usize;
    for (pt, owners) in &g.incidence {
        if owners.len() < 2 {
            continue;
        }
        let rp = to_point(pt, scale);
        for (x, &i) in owners.iter().enumerate() {
            for &j in &owners[x + 1..] {
                overlap_incidences += 1;
                witnesses[i].entry(j + 1).or_default().push(rp.clone());
                witnesses[j].entry(i + 1).or_default().push(rp.clone());
            }
        }
    }

    let conv = |pts: &[IPoint<T>]| pts.iter().map(|p| to_point(p, scale)).collect::<Vec<_>>();
    let vertical_points = conv(&g.vertical);
    let pairs = (0..m)
        .map(|i| LinePair2D {
            i: i + 1,
            line_low: Slope::Finite(ratios[i].clone()),
            line_high: if i + 1 < m {
                Slope::Finite(ratios[i + 1].clone())
            } else {
                Slope::Vertical
            },
            points_low: conv(&g.lines[i]),
            points_high: if i + 1 < m {
                conv(&g.lines[i + 1])
            } else {
                vertical_points.clone()
            },
            pair_sumset: conv(&g.pair_sums[i]),
            overlap_witnesses: std::mem::take(&mut witnesses[i])
                .into_iter()
                .map(|(with, points)| OverlapWitness { with, points })
                .collect(),
        })
        .collect();
    Assembled {
        vertical_points,
        pairs,
        union_size: g.incidence.len(),
        outside_points: g.outside.iter().map(|p| to_point(p, scale)).collect(),
        overlap_incidences,
    }
}

/// Builds and checks the full dyadic ray construction for `A`.
pub fn build_certificate(a: &NumberSet) -> Result<Certificate2D> {
    require_applicable(a)?;
    let profile = energy::ratio_profile(a)?;
    let e = profile.energy();
    let dec = energy::dyadic_decompose(&profile);
    let dominant = energy::dominant_class(&dec, e, a.len())?;
    let nonempty = dec.nonempty_classes();
    let index = dominant.index;
    let ratios = dominant.ratios.clone();
    let m = ratios.len();

    let img = Image::joint(&[a.elements()]);
    let asm = with_image!(&img, |vals, scale| assemble(&vals[0], scale, &ratios));

    let n = a.len() as u64;
    let ss = numset::sumset_size(a, a)? as u64;
    let pp = numset::productset_size(a, a)? as u64;
    let log = ceil_log2(a.len()) as u64;
    let lo = 1u64 << (2 * index);
    let hi = 1u64 << (2 * index + 2);

    let mut led = Ledger::new();

    // Dominant class bound, in log form and in pigeonhole form
    led.exact_advisory(
        "dominantClassLogForm",
        Rat::new(e, log),
        Relation::Le,
        Rat::from(dominant.class_sum),
    );
    led.exact(
        "dominantClassPigeonhole",
        Rat::new(e, nonempty as u64),
        Relation::Le,
        Rat::from(dominant.class_sum),
    );
    led.count(
        "dominantClassSumBelowM4I",
        dominant.class_sum,
        Relation::Lt,
        m as u64 * hi,
    );

    let line_lo = 1usize << index;
    let line_hi = 1usize << (index + 1);
    let line_counts_ok = asm
        .pairs
        .iter()
        .all(|p| (line_lo..line_hi).contains(&p.points_low.len()));
    led.count(
        "lineCountsOutsideClass",
        asm.pairs
            .iter()
            .filter(|p| !(line_lo..line_hi).contains(&p.points_low.len()))
            .count() as u64,
        Relation::Eq,
        0u64,
    );
    debug_assert!(line_counts_ok);

    let finite: Vec<&LinePair2D> = asm.pairs.iter().filter(|p| p.is_finite()).collect();
    if let (Some(min), Some(max)) = (
        finite.iter().map(|p| p.pair_sumset.len()).min(),
        finite.iter().map(|p| p.pair_sumset.len()).max(),
    ) {
        led.count("finitePairSizeMin", min as u64, Relation::Ge, lo);
        led.count("finitePairSizeMax", max as u64, Relation::Lt, hi);
    }
    let vertical = asm.pairs.last().expect("m >= 1");
    led.count(
        "verticalPairSizeMin",
        vertical.pair_sumset.len() as u64,
        Relation::Ge,
        lo,
    );

    led.count(
        "productRuleViolations",
        asm.pairs.iter().filter(|p| !p.product_rule_holds()).count() as u64,
        Relation::Eq,
        0u64,
    );

    let finite_overlaps: usize = finite
        .iter()
        .map(|p| {
            p.overlap_witnesses
                .iter()
                .filter(|w| w.with < m && w.with > p.i)
                .map(|w| w.points.len())
                .sum::<usize>()
        })
        .sum();
    led.count(
        "finitePairOverlaps",
        finite_overlaps as u64,
        Relation::Eq,
        0u64,
    );
    let vertical_overlaps: usize = vertical
        .overlap_witnesses
        .iter()
        .map(|w| w.points.len())
        .sum();
    led.exact_advisory(
        "verticalPairOverlaps",
        Rat::from(vertical_overlaps as u64),
        Relation::Eq,
        Rat::zero(),
    );

    led.count(
        "sumsOutsideSumsetGrid",
        asm.outside_points.len() as u64,
        Relation::Eq,
        0u64,
    );

    let total: u64 = asm.pairs.iter().map(|p| p.pair_sumset.len() as u64).sum();
    led.count(
        "unionVsOverlapCount",
        asm.union_size as u64 + asm.overlap_incidences as u64,
        Relation::Ge,
        total,
    );
    led.count(
        "chainLower",
        m as u64 * lo,
        Relation::Le,
        asm.union_size as u64,
    );
    led.count("chainUpper", asm.union_size as u64, Relation::Le, ss * ss);

    led.exact(
        "lemmaEnergy",
        Rat::new(e, log),
        Relation::Le,
        Rat::from(4 * ss * ss),
    );
    led.exact(
        "theoremMain",
        Rat::from(pp * ss * ss),
        Relation::Ge,
        Rat::new(n.pow(4), 4 * log),
    );

    Ok(Certificate2D {
        set: a.clone(),
        energy: e,
        index,
        ratios,
        m,
        class_sum: dominant.class_sum,
        vertical_x: a.min().expect("nonempty").clone(),
        vertical_points: asm.vertical_points,
        pairs: asm.pairs,
        union_size: asm.union_size,
        sumset_size: ss as usize,
        productset_size: pp as usize,
        outside_points: asm.outside_points,
        inequalities: led,
    })
}

/// Exact check of `|AA||A+A|² ≥ |A|⁴ / (4⌈log₂|A|⌉)`.
pub fn verify_theorem_main(a: &NumberSet) -> Result<Ledger> {
    require_applicable(a)?;
    let n = a.len() as u64;
    let ss = numset::sumset_size(a, a)? as u64;
    let pp = numset::productset_size(a, a)? as u64;
    let log = ceil_log2(a.len()) as u64;
    let mut led = Ledger::new();
    led.exact(
        "theoremMain",
        Rat::from(pp) * Rat::from(ss * ss),
        Relation::Ge,
        Rat::new(n.pow(4), 4 * log),
    );
    Ok(led)
}

/// Exact check of `E(A)/⌈log₂|A|⌉ ≤ 4|A+A|²`.
pub fn verify_lemma(a: &NumberSet) -> Result<Ledger> {
    require_applicable(a)?;
    let e = energy::energy(a)?;
    let ss = numset::sumset_size(a, a)? as u64;
    let log = ceil_log2(a.len()) as u64;
    let mut led = Ledger::new();
    led.exact(
        "lemmaEnergy",
        Rat::new(e, log),
        Relation::Le,
        Rat::from(4 * ss * ss),
    );
    Ok(led)
}

/// `max(|A+A|, |AA|)³ ≥ |A|⁴ / (8⌈log₂|A|⌉)`, the cubed form of the
/// `|A|^{4/3}` corollary.
pub fn verify_corollary(a: &NumberSet) -> Result<Ledger> {
    require_applicable(a)?;
    let n = a.len() as u64;
    let ss = numset::sumset_size(a, a)? as u64;
    let pp = numset::productset_size(a, a)? as u64;
    let log = ceil_log2(a.len()) as u64;
    let mx = Rat::from(ss.max(pp));
    let mut led = Ledger::new();
    led.exact(
        "corollaryCubed",
        &(&mx * &mx) * &mx,
        Relation::Ge,
        Rat::new(n.pow(4), 8 * log),
    );
    Ok(led)
}

/// `|A|²|B|²/|AB| ≤ 4⌈log₂|B|⌉|A+A||B+B|` for `|A| ≥ |B| ≥ 2`, together
/// with `E(A,B) ≥ |A|²|B|²/|AB|`.
pub fn verify_asym(a: &NumberSet, b: &NumberSet) -> Result<Ledger> {
    if a.len() < b.len() {
        return Err(Error::SwapRequired {
            a: a.len(),
            b: b.len(),
        });
    }
    require_applicable(b)?;
    let na = a.len() as u64;
    let nb = b.len() as u64;
    let ab = numset::productset_size(a, b)? as u64;
    let lhs = Rat::new(na * na * nb * nb, ab);
    let rhs = Rat::from(
        4 * ceil_log2(b.len()) as u64
            * numset::sumset_size(a, a)? as u64
            * numset::sumset_size(b, b)? as u64,
    );
    let e = energy::energy_asym(a, b)?;
    let mut led = Ledger::new();
    led.exact("asymmetric", lhs.clone(), Relation::Le, rhs);
    led.exact("asymEnergyLowerBound", Rat::from(e), Relation::Ge, lhs);
    Ok(led)
}
