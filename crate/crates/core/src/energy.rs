//! Multiplicative energy and the ratio-multiplicity profile.
//!
//! For a set `A` the profile records, for every ratio `x ∈ A/A`, the
//! multiplicity `m(x) = |xA ∩ A|`, i.e. the number of points of the grid
//! `A × A` on the line through the origin with slope `x`. The energy is
//! `E(A) = Σ m(x)²`.

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{self, Image};
use crate::numset::{self, NumberSet};
use crate::rat::Rat;

pub const DEFAULT_ORACLE_CAP: usize = 64;

/// `⌈log₂ n⌉`, with `⌈log₂ 1⌉ = 0`.
pub fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

/// Dyadic class index `⌊log₂ m⌋`, from the bit length.
pub fn dyadic_index(m: u64) -> usize {
    debug_assert!(m > 0);
    (u64::BITS - 1 - m.leading_zeros()) as usize
}

/// A quadruple `(a, b, c, d)` with `(a, b) = λ(c, d)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicativeQuadruple {
    pub a: Rat,
    pub b: Rat,
    pub c: Rat,
    pub d: Rat,
    pub lambda: Rat,
}

impl MultiplicativeQuadruple {
    /// Returns the quadruple when `a·d = b·c`, with `λ = a/c`.
    pub fn new(a: Rat, b: Rat, c: Rat, d: Rat) -> Option<Self> {
        if &a * &d != &b * &c {
            return None;
        }
        let lambda = &a / &c;
        debug_assert_eq!(&lambda * &d, b);
        Some(MultiplicativeQuadruple { a, b, c, d, lambda })
    }
}

enum Entries {
    /// `(p << 32 | q, m)`, sorted by key.
    Packed(Vec<(u64, u64)>),
    /// `((p, q), m)`, sorted by `(p, q)`.
    Wide(Vec<((BigUint, BigUint), u64)>),
}

/// Map from each ratio `x ∈ A/A` to `m(x) = |xA ∩ A|`.
pub struct RatioProfile {
    set_size: usize,
    entries: Entries,
}

impl RatioProfile {
    /// Number of elements of the underlying set.
    pub fn set_size(&self) -> usize {
        self.set_size
    }

    /// `|A/A|`.
    pub fn len(&self) -> usize {
        match &self.entries {
            Entries::Packed(v) => v.len(),
            Entries::Wide(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `m(x)`, zero when `x ∉ A/A`.
    pub fn multiplicity(&self, x: &Rat) -> u64 {
        if !x.is_positive() {
            return 0;
        }
        let (Some(p), Some(q)) = (x.numer().to_biguint(), x.denom().to_biguint()) else {
            return 0;
        };
        match &self.entries {
            Entries::Packed(v) => {
                let (Some(p), Some(q)) = (u64::try_from(&p).ok(), u64::try_from(&q).ok()) else {
                    return 0;
                };
                if p >= 1 << 32 || q >= 1 << 32 {
                    return 0;
                }
                let key = kernel::pack(p, q);
                v.binary_search_by_key(&key, |e| e.0)
                    .map(|i| v[i].1)
                    .unwrap_or(0)
            }
            Entries::Wide(v) => {
                let key = (p, q);
                v.binary_search_by(|e| e.0.cmp(&key))
                    .map(|i| v[i].1)
                    .unwrap_or(0)
            }
        }
    }

    pub fn multiplicities(&self) -> Box<dyn Iterator<Item = u64> + '_> {
        match &self.entries {
            Entries::Packed(v) => Box::new(v.iter().map(|e| e.1)),
            Entries::Wide(v) => Box::new(v.iter().map(|e| e.1)),
        }
    }

    /// `(x, m(x))` for the entries whose multiplicity satisfies `keep`,
    /// sorted by ratio value.
    pub fn entries_where(&self, keep: impl Fn(u64) -> bool) -> Vec<(Rat, u64)> {
        let mut out: Vec<(Rat, u64)> = match &self.entries {
            Entries::Packed(v) => v
                .iter()
                .filter(|e| keep(e.1))
                .map(|&(key, m)| {
                    let (p, q) = kernel::unpack(key);
                    (Rat::new(p, q), m)
                })
                .collect(),
            Entries::Wide(v) => v
                .iter()
                .filter(|e| keep(e.1))
                .map(|((p, q), m)| (Rat::from_biguint_ratio(p.clone(), q.clone()), *m))
                .collect(),
        };
        out.sort();
        out
    }

    /// All entries sorted by ratio value.
    pub fn entries(&self) -> Vec<(Rat, u64)> {
        self.entries_where(|_| true)
    }

    /// `Σ m(x)²`.
    pub fn energy(&self) -> u64 {
        self.multiplicities().map(|m| m * m).sum()
    }
}

/// Builds the ratio profile of `A` by enumerating all pairs.
pub fn ratio_profile(a: &NumberSet) -> Result<RatioProfile> {
    a.ensure_nonempty()?;
    let img = Image::joint(&[a.elements()]);
    let entries = match &img {
        Image::Narrow { vals, .. } => {
            Entries::Packed(kernel::packed_ratio_counts(&vals[0], &vals[0]))
        }
        Image::Wide { vals, .. } => Entries::Wide(kernel::ratio_counts(&vals[0], &vals[0])),
    };
    Ok(RatioProfile {
        set_size: a.len(),
        entries,
    })
}

/// `E(A)` through the ratio profile.
pub fn energy(a: &NumberSet) -> Result<u64> {
    Ok(ratio_profile(a)?.energy())
}

/// `E(A)` by counting quadruples `(a, b, c, d) ∈ A⁴` with `a·d = b·c`.
pub fn energy_bruteforce(a: &NumberSet) -> Result<u64> {
    energy_bruteforce_capped(a, DEFAULT_ORACLE_CAP)
}

pub fn energy_bruteforce_capped(a: &NumberSet, cap: usize) -> Result<u64> {
    a.ensure_nonempty()?;
    if a.len() > cap {
        return Err(Error::OracleCapExceeded { size: a.len(), cap });
    }
    let el = a.elements();
    let n = el.len();
    // prod[i * n + j] = a_i * a_j
    let prod: Vec<Rat> = el
        .iter()
        .flat_map(|x| el.iter().map(move |y| x * y))
        .collect();
    let mut count = 0u64;
    for ia in 0..n {
        for ib in 0..n {
            for ic in 0..n {
                for id in 0..n {
                    if prod[ia * n + id] == prod[ib * n + ic] {
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(count)
}

/// `E(A, B)`: quadruples `(a, b, c, d) ∈ A × B × A × B` with `a·d = b·c`,
/// computed as `Σ_r |{(a, b) : a/b = r}|²`.
pub fn energy_asym(a: &NumberSet, b: &NumberSet) -> Result<u64> {
    a.ensure_nonempty()?;
    b.ensure_nonempty()?;
    let img = Image::joint(&[a.elements(), b.elements()]);
    Ok(match &img {
        Image::Narrow { vals, .. } => kernel::packed_ratio_counts(&vals[0], &vals[1])
            .iter()
            .map(|e| e.1 * e.1)
            .sum(),
        Image::Wide { vals, .. } => kernel::ratio_counts(&vals[0], &vals[1])
            .iter()
            .map(|e| e.1 * e.1)
            .sum(),
    })
}

/// Partition of `A/A` by `2^i ≤ m(x) < 2^{i+1}`.
pub struct DyadicDecomposition<'a> {
    profile: &'a RatioProfile,
    /// `Σ m(x)²` over class `i`.
    pub class_sums: Vec<u64>,
    /// Number of ratios in class `i`.
    pub class_sizes: Vec<usize>,
}

impl DyadicDecomposition<'_> {
    pub fn profile(&self) -> &RatioProfile {
        self.profile
    }

    pub fn num_classes(&self) -> usize {
        self.class_sums.len()
    }

    pub fn nonempty_classes(&self) -> usize {
        self.class_sizes.iter().filter(|&&c| c > 0).count()
    }

    /// Ratios of class `i`, ascending.
    pub fn class(&self, i: usize) -> Vec<Rat> {
        self.profile
            .entries_where(|m| dyadic_index(m) == i)
            .into_iter()
            .map(|e| e.0)
            .collect()
    }
}

pub fn dyadic_decompose(profile: &RatioProfile) -> DyadicDecomposition<'_> {
    let classes = dyadic_index(profile.set_size().max(1) as u64) + 1;
    let mut class_sums = vec![0u64; classes];
    let mut class_sizes = vec![0usize; classes];
    for m in profile.multiplicities() {
        let i = dyadic_index(m);
        class_sums[i] += m * m;
        class_sizes[i] += 1;
    }
    DyadicDecomposition {
        profile,
        class_sums,
        class_sizes,
    }
}

/// The dyadic class carrying the largest share of the energy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DominantClass {
    #[serde(rename = "I")]
    pub index: usize,
    /// `s₁ < s₂ < … < s_m`.
    #[serde(rename = "D")]
    pub ratios: Vec<Rat>,
    pub m: usize,
    #[serde(rename = "classSum")]
    pub class_sum: u64,
    /// `classSum · #nonempty ≥ E`.
    #[serde(rename = "pigeonholeHolds")]
    pub pigeonhole_holds: bool,
    /// `classSum · ⌈log₂ n⌉ ≥ E`; `None` when `n = 1`.
    #[serde(rename = "logFormHolds")]
    pub log_form_holds: Option<bool>,
}

pub fn dominant_class(d: &DyadicDecomposition<'_>, energy: u64, n: usize) -> Result<DominantClass> {
    let mut best: Option<usize> = None;
    for (i, &s) in d.class_sums.iter().enumerate() {
        if d.class_sizes[i] == 0 {
            continue;
        }
        // strict comparison keeps the smallest index on ties
        if best.is_none_or(|b| s > d.class_sums[b]) {
            best = Some(i);
        }
    }
    let index = best.ok_or(Error::EmptySet)?;
    let class_sum = d.class_sums[index];
    let ratios = d.class(index);
    let nonempty = d.nonempty_classes() as u128;
    let log = ceil_log2(n) as u128;
    Ok(DominantClass {
        index,
        m: ratios.len(),
        ratios,
        class_sum,
        pigeonhole_holds: class_sum as u128 * nonempty >= energy as u128,
        log_form_holds: (log > 0).then(|| class_sum as u128 * log >= energy as u128),
    })
}

/// `|A|⁴ / |AA|` and whether `E(A)` reaches it.
pub fn cs_lower_bound(a: &NumberSet) -> Result<(Rat, bool)> {
    let n = Rat::from(a.len() as u64);
    let bound = &(&(&n * &n) * &n) * &n / Rat::from(numset::productset_size(a, a)? as u64);
    let e = Rat::from(energy(a)?);
    let holds = e >= bound;
    Ok((bound, holds))
}

#[derive(Clone, Debug, Serialize)]
pub struct EnergyReport {
    #[serde(rename = "E")]
    pub energy: u64,
    pub size: usize,
    pub productset: usize,
    pub sumset: usize,
    #[serde(rename = "csLowerBound")]
    pub cs_lower_bound: Rat,
    #[serde(rename = "csHolds")]
    pub cs_holds: bool,
    /// `4|A+A|²·⌈log₂|A|⌉`.
    #[serde(rename = "lemmaRHS")]
    pub lemma_rhs: Rat,
    #[serde(rename = "classSums")]
    pub class_sums: Vec<u64>,
    pub dominant: DominantClass,
}

pub fn energy_report(a: &NumberSet) -> Result<EnergyReport> {
    let profile = ratio_profile(a)?;
    let e = profile.energy();
    let dec = dyadic_decompose(&profile);
    let dominant = dominant_class(&dec, e, a.len())?;
    let n = a.len() as u64;
    let aa = numset::productset_size(a, a)?;
    let ss = numset::sumset_size(a, a)?;
    let cs = Rat::new(n * n * n * n, aa as u64);
    let lemma_rhs = Rat::from(4 * (ss as u64) * (ss as u64) * ceil_log2(a.len()) as u64);
    Ok(EnergyReport {
        energy: e,
        size: a.len(),
        productset: aa,
        sumset: ss,
        cs_holds: Rat::from(e) >= cs,
        cs_lower_bound: cs,
        lemma_rhs,
        class_sums: dec.class_sums.clone(),
        dominant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[u64]) -> NumberSet {
        NumberSet::from_integers(v).unwrap()
    }

    fn r(p: i64, q: i64) -> Rat {
        Rat::new(p, q)
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(4), 2);
        assert_eq!(ceil_log2(5), 3);
        assert_eq!(ceil_log2(4096), 12);
        assert_eq!(ceil_log2(4097), 13);
    }

    #[test]
    fn profile_examples() {
        let p = ratio_profile(&set(&[1, 2, 3])).unwrap();
        assert_eq!(p.len(), 7);
        assert_eq!(p.multiplicity(&Rat::one()), 3);
        for x in [r(1, 3), r(1, 2), r(2, 3), r(3, 2), r(2, 1), r(3, 1)] {
            assert_eq!(p.multiplicity(&x), 1);
        }
        let p = ratio_profile(&set(&[1, 2, 4])).unwrap();
        assert_eq!(
            p.entries(),
            vec![
                (r(1, 4), 1),
                (r(1, 2), 2),
                (r(1, 1), 3),
                (r(2, 1), 2),
                (r(4, 1), 1)
            ]
        );
        let p = ratio_profile(&set(&[7])).unwrap();
        assert_eq!(p.entries(), vec![(Rat::one(), 1)]);
        assert_eq!(p.multiplicity(&r(2, 1)), 0);
    }

    #[test]
    fn energy_examples() {
        assert_eq!(energy(&set(&[1, 2, 3])).unwrap(), 15);
        assert_eq!(energy(&set(&[1, 2, 4])).unwrap(), 19);
        assert_eq!(energy(&set(&[1, 2, 4, 8])).unwrap(), 44);
        assert_eq!(energy_bruteforce(&set(&[9])).unwrap(), 1);
        assert_eq!(energy_bruteforce(&set(&[1, 2])).unwrap(), 6);
        assert_eq!(energy_bruteforce(&set(&[1, 2, 3])).unwrap(), 15);
    }

    #[test]
    fn oracle_cap_is_enforced() {
        let a = NumberSet::interval(10);
        assert!(matches!(
            energy_bruteforce_capped(&a, 8),
            Err(Error::OracleCapExceeded { size: 10, cap: 8 })
        ));
        assert!(matches!(
            energy(&NumberSet::default()),
            Err(Error::EmptySet)
        ));
    }

    #[test]
    fn asym_examples() {
        let a = set(&[1, 2, 4]);
        assert_eq!(energy_asym(&a, &a).unwrap(), energy(&a).unwrap());
        assert_eq!(energy_asym(&set(&[1, 2]), &set(&[1, 3])).unwrap(), 4);
        assert_eq!(energy_asym(&set(&[3]), &set(&[5])).unwrap(), 1);
    }

    #[test]
    fn dyadic_examples() {
        let p = ratio_profile(&set(&[1, 2, 3])).unwrap();
        let d = dyadic_decompose(&p);
        assert_eq!(d.class_sums, vec![6, 9]);
        assert_eq!(d.class_sizes, vec![6, 1]);
        assert_eq!(d.class(1), vec![Rat::one()]);

        let p = ratio_profile(&set(&[1, 2, 4])).unwrap();
        let d = dyadic_decompose(&p);
        assert_eq!(d.class_sums, vec![2, 17]);
        assert_eq!(d.class(0), vec![r(1, 4), r(4, 1)]);
        assert_eq!(d.class(1), vec![r(1, 2), r(1, 1), r(2, 1)]);

        let p = ratio_profile(&set(&[5])).unwrap();
        let d = dyadic_decompose(&p);
        assert_eq!(d.class_sums, vec![1]);
    }

    #[test]
    fn dominant_examples() {
        let a = set(&[1, 2, 3]);
        let p = ratio_profile(&a).unwrap();
        let d = dominant_class(&dyadic_decompose(&p), 15, 3).unwrap();
        assert_eq!((d.index, d.m, d.class_sum), (1, 1, 9));
        assert_eq!(d.ratios, vec![Rat::one()]);
        assert!(d.pigeonhole_holds);
        assert_eq!(d.log_form_holds, Some(true));

        let a = set(&[1, 2, 4]);
        let p = ratio_profile(&a).unwrap();
        let d = dominant_class(&dyadic_decompose(&p), 19, 3).unwrap();
        assert_eq!((d.index, d.m, d.class_sum), (1, 3, 17));
        assert_eq!(d.ratios, vec![r(1, 2), r(1, 1), r(2, 1)]);

        let a = set(&[4]);
        let p = ratio_profile(&a).unwrap();
        let d = dominant_class(&dyadic_decompose(&p), 1, 1).unwrap();
        assert_eq!((d.index, d.m), (0, 1));
        assert_eq!(d.log_form_holds, None);
    }

    #[test]
    fn log_form_can_fail_at_powers_of_two() {
        // {1,2}: E = 6, classes {1/2, 2} (sum 2) and {1} (sum 4), ⌈log₂ 2⌉ = 1
        let a = set(&[1, 2]);
        let p = ratio_profile(&a).unwrap();
        let d = dominant_class(&dyadic_decompose(&p), 6, 2).unwrap();
        assert!(d.pigeonhole_holds);
        assert_eq!(d.log_form_holds, Some(false));
    }

    #[test]
    fn dominant_ties_pick_smallest_index() {
        // {1,2,3,6}: m(1)=4, m(2)=m(1/2)=m(3)=m(1/3)=2, the rest 1.
        // class 1 sum 16, class 2 sum 16
        let a = set(&[1, 2, 3, 6]);
        let p = ratio_profile(&a).unwrap();
        let dec = dyadic_decompose(&p);
        assert_eq!(dec.class_sums[1], dec.class_sums[2]);
        let d = dominant_class(&dec, p.energy(), 4).unwrap();
        assert_eq!(d.index, 1);
    }

    #[test]
    fn cs_examples() {
        assert_eq!(cs_lower_bound(&set(&[1, 2, 3])).unwrap(), (r(27, 2), true));
        assert_eq!(cs_lower_bound(&set(&[1, 2, 4])).unwrap(), (r(81, 5), true));
        assert_eq!(cs_lower_bound(&set(&[8])).unwrap(), (Rat::one(), true));
    }

    #[test]
    fn quadruple_carries_lambda() {
        let q = MultiplicativeQuadruple::new(r(4, 1), r(2, 1), r(2, 1), r(1, 1)).unwrap();
        assert_eq!(q.lambda, r(2, 1));
        assert!(MultiplicativeQuadruple::new(r(4, 1), r(3, 1), r(2, 1), r(1, 1)).is_none());
    }
}
