//! Finite sets of positive rationals and their sum, product and ratio sets.

use std::fmt;
use std::path::Path;

use num_bigint::BigUint;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::kernel::{self, with_image, Image, Int};
use crate::rat::Rat;

/// A finite set of positive rationals, stored sorted ascending without
/// duplicates. The first element is the minimum `a₁`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct NumberSet {
    elements: Vec<Rat>,
}

impl NumberSet {
    /// Builds a set, silently dropping duplicates. Non-positive values are
    /// rejected.
    pub fn new(values: impl IntoIterator<Item = Rat>) -> Result<Self> {
        let mut elements: Vec<Rat> = values.into_iter().collect();
        if let Some(bad) = elements.iter().find(|r| !r.is_positive()) {
            return Err(Error::NonPositive(bad.to_string()));
        }
        elements.sort();
        elements.dedup();
        Ok(NumberSet { elements })
    }

    pub fn from_integers(values: &[u64]) -> Result<Self> {
        NumberSet::new(values.iter().map(|&v| Rat::from(v)))
    }

    /// `{1, 2, ..., n}`.
    pub fn interval(n: u64) -> Self {
        NumberSet {
            elements: (1..=n).map(Rat::from).collect(),
        }
    }

    /// Caller guarantees the input is sorted, unique and positive.
    pub(crate) fn from_sorted_unchecked(elements: Vec<Rat>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        NumberSet { elements }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Rat] {
        &self.elements
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rat> {
        self.elements.iter()
    }

    pub fn min(&self) -> Option<&Rat> {
        self.elements.first()
    }

    pub fn contains(&self, x: &Rat) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    pub fn intersection(&self, other: &NumberSet) -> NumberSet {
        NumberSet {
            elements: self
                .elements
                .iter()
                .filter(|x| other.contains(x))
                .cloned()
                .collect(),
        }
    }

    pub(crate) fn ensure_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::EmptySet)
        } else {
            Ok(())
        }
    }

    /// Parses the set file format: one value per line, either an integer or
    /// `p/q`; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let lineno = idx + 1;
            let r: Rat = line.parse().map_err(|e| Error::Parse {
                line: lineno,
                msg: format!("{e}"),
            })?;
            if !r.is_positive() {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("value {r} is not positive"),
                });
            }
            values.push(r);
        }
        let set = NumberSet::new(values)?;
        set.ensure_nonempty()?;
        Ok(set)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        NumberSet::parse(&std::fs::read_to_string(path)?)
    }

    /// One value per line, integers bare and fractions as `p/q`.
    pub fn to_file_string(&self) -> String {
        let mut s = String::new();
        for r in &self.elements {
            s.push_str(&r.to_string());
            s.push('\n');
        }
        s
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_file_string())?;
        Ok(())
    }
}

impl fmt::Display for NumberSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, r) in self.elements.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for NumberSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.elements.serialize(s)
    }
}

impl<'a> IntoIterator for &'a NumberSet {
    type Item = &'a Rat;
    type IntoIter = std::slice::Iter<'a, Rat>;
    fn into_iter(self) -> Self::IntoIter {
        self.elements.iter()
    }
}

fn combine_to_set<T: Int>(a: &[T], b: &[T], op: fn(&T, &T) -> T, scale: &BigUint) -> NumberSet {
    NumberSet::from_sorted_unchecked(
        kernel::pair_combine(a, b, op)
            .iter()
            .map(|v| kernel::unscale(v, scale))
            .collect(),
    )
}

/// `A + B`.
pub fn sumset(a: &NumberSet, b: &NumberSet) -> Result<NumberSet> {
    a.ensure_nonempty()?;
    b.ensure_nonempty()?;
    let img = Image::joint(&[a.elements(), b.elements()]);
    Ok(with_image!(&img, |vals, scale| combine_to_set(
        &vals[0],
        &vals[1],
        kernel::add,
        scale
    )))
}

/// `AB`.
pub fn productset(a: &NumberSet, b: &NumberSet) -> Result<NumberSet> {
    a.ensure_nonempty()?;
    b.ensure_nonempty()?;
    let img = Image::joint(&[a.elements(), b.elements()]);
    Ok(with_image!(&img, |vals, scale| {
        let sq = scale * scale;
        combine_to_set(&vals[0], &vals[1], kernel::mul, &sq)
    }))
}

/// `A / B`.
#[allow(clippy::useless_conversion)] // the kernel yields u64 or BigUint
pub fn ratioset(a: &NumberSet, b: &NumberSet) -> Result<NumberSet> {
    a.ensure_nonempty()?;
    b.ensure_nonempty()?;
    let img = Image::joint(&[a.elements(), b.elements()]);
    let mut out: Vec<Rat> = with_image!(&img, |vals, _scale| kernel::ratio_counts(
        &vals[0], &vals[1]
    )
    .into_iter()
    .map(|((p, q), _)| Rat::from_biguint_ratio(p.into(), q.into()))
    .collect());
    out.sort();
    Ok(NumberSet::from_sorted_unchecked(out))
}

/// `|A + B|` without materializing the rationals.
pub fn sumset_size(a: &NumberSet, b: &NumberSet) -> Result<usize> {
    a.ensure_nonempty()?;
    b.ensure_nonempty()?;
    let img = Image::joint(&[a.elements(), b.elements()]);
    Ok(with_image!(&img, |vals, _s| kernel::pair_combine(
        &vals[0],
        &vals[1],
        kernel::add
    )
    .len()))
}

/// `|AB|` without materializing the rationals.
pub fn productset_size(a: &NumberSet, b: &NumberSet) -> Result<usize> {
    a.ensure_nonempty()?;
    b.ensure_nonempty()?;
    let img = Image::joint(&[a.elements(), b.elements()]);
    Ok(with_image!(&img, |vals, _s| kernel::pair_combine(
        &vals[0],
        &vals[1],
        kernel::mul
    )
    .len()))
}

/// `|A / B|` without materializing the rationals.
pub fn ratioset_size(a: &NumberSet, b: &NumberSet) -> Result<usize> {
    a.ensure_nonempty()?;
    b.ensure_nonempty()?;
    let img = Image::joint(&[a.elements(), b.elements()]);
    Ok(match &img {
        Image::Narrow { vals, .. } => kernel::packed_ratio_counts(&vals[0], &vals[1]).len(),
        Image::Wide { vals, .. } => kernel::ratio_counts(&vals[0], &vals[1]).len(),
    })
}

/// `xA`.
pub fn dilate(x: &Rat, a: &NumberSet) -> Result<NumberSet> {
    if !x.is_positive() {
        return Err(Error::NonPositive(x.to_string()));
    }
    Ok(NumberSet::from_sorted_unchecked(
        a.iter().map(|v| x * v).collect(),
    ))
}

/// `kA = {a₁ + … + a_k}`.
pub fn kfold_sumset(a: &NumberSet, k: usize) -> Result<NumberSet> {
    if k < 1 {
        return Err(Error::InvalidParameter(format!(
            "k = {k} must be at least 1"
        )));
    }
    a.ensure_nonempty()?;
    let img = Image::joint(&[a.elements()]);
    Ok(with_image!(&img, |vals, scale| {
        let mut acc = vals[0].clone();
        for _ in 1..k {
            acc = kernel::pair_combine(&acc, &vals[0], kernel::add);
        }
        NumberSet::from_sorted_unchecked(acc.iter().map(|v| kernel::unscale(v, scale)).collect())
    }))
}

/// Sizes of the basic derived sets of `A`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SetStats {
    pub size: usize,
    pub sumset: usize,
    pub productset: usize,
    pub ratioset: usize,
}

pub fn stats(a: &NumberSet) -> Result<SetStats> {
    Ok(SetStats {
        size: a.len(),
        sumset: sumset_size(a, a)?,
        productset: productset_size(a, a)?,
        ratioset: ratioset_size(a, a)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[u64]) -> NumberSet {
        NumberSet::from_integers(v).unwrap()
    }

    fn rset(v: &[(i64, i64)]) -> NumberSet {
        NumberSet::new(v.iter().map(|&(p, q)| Rat::new(p, q))).unwrap()
    }

    #[test]
    fn sumset_examples() {
        assert_eq!(sumset(&set(&[5]), &set(&[7])).unwrap(), set(&[12]));
        assert_eq!(
            sumset(&set(&[1, 2, 3]), &set(&[1, 2, 3])).unwrap(),
            set(&[2, 3, 4, 5, 6])
        );
        assert_eq!(
            sumset(&set(&[1, 2, 4]), &set(&[1, 2, 4])).unwrap(),
            set(&[2, 3, 4, 5, 6, 8])
        );
    }

    #[test]
    fn productset_examples() {
        assert_eq!(productset(&set(&[5]), &set(&[7])).unwrap(), set(&[35]));
        assert_eq!(
            productset(&set(&[1, 2, 3]), &set(&[1, 2, 3])).unwrap(),
            set(&[1, 2, 3, 4, 6, 9])
        );
        assert_eq!(
            productset(&set(&[1, 2, 4]), &set(&[1, 2, 4])).unwrap(),
            set(&[1, 2, 4, 8, 16])
        );
    }

    #[test]
    fn ratioset_examples() {
        assert_eq!(ratioset(&set(&[3]), &set(&[3])).unwrap(), set(&[1]));
        assert_eq!(
            ratioset(&set(&[1, 2, 3]), &set(&[1, 2, 3])).unwrap(),
            rset(&[(1, 3), (1, 2), (2, 3), (1, 1), (3, 2), (2, 1), (3, 1)])
        );
        assert_eq!(
            ratioset(&set(&[1, 2, 4]), &set(&[1, 2, 4])).unwrap(),
            rset(&[(1, 4), (1, 2), (1, 1), (2, 1), (4, 1)])
        );
    }

    #[test]
    fn dilate_examples() {
        let a = set(&[1, 2, 3]);
        assert_eq!(dilate(&Rat::one(), &a).unwrap(), a);
        assert_eq!(dilate(&Rat::from(2u64), &a).unwrap(), set(&[2, 4, 6]));
        assert_eq!(
            dilate(&Rat::new(1, 2), &set(&[2, 4])).unwrap(),
            set(&[1, 2])
        );
        assert!(dilate(&Rat::zero(), &a).is_err());
        assert!(dilate(&Rat::new(-1, 2), &a).is_err());
    }

    #[test]
    fn kfold_examples() {
        assert_eq!(kfold_sumset(&set(&[1, 2]), 3).unwrap(), set(&[3, 4, 5, 6]));
        assert_eq!(
            kfold_sumset(&set(&[1, 2, 3]), 2).unwrap(),
            sumset(&set(&[1, 2, 3]), &set(&[1, 2, 3])).unwrap()
        );
        assert_eq!(kfold_sumset(&NumberSet::interval(5), 3).unwrap().len(), 13);
        assert!(kfold_sumset(&set(&[1]), 0).is_err());
    }

    #[test]
    fn empty_inputs_are_rejected() {
        let e = NumberSet::default();
        let a = set(&[1]);
        assert!(matches!(sumset(&e, &a), Err(Error::EmptySet)));
        assert!(matches!(productset(&a, &e), Err(Error::EmptySet)));
        assert!(matches!(ratioset(&e, &e), Err(Error::EmptySet)));
        assert!(matches!(kfold_sumset(&e, 2), Err(Error::EmptySet)));
    }

    #[test]
    fn rational_sets_use_exact_scaling() {
        let a = rset(&[(1, 2), (1, 3)]);
        assert_eq!(sumset(&a, &a).unwrap(), rset(&[(2, 3), (5, 6), (1, 1)]));
        assert_eq!(productset(&a, &a).unwrap(), rset(&[(1, 9), (1, 6), (1, 4)]));
        assert_eq!(sumset_size(&a, &a).unwrap(), 3);
    }

    #[test]
    fn wide_kernel_matches_narrow_semantics() {
        let big = 1u64 << 40;
        let a = set(&[big, 2 * big, 3 * big]);
        let s = sumset(&a, &a).unwrap();
        assert_eq!(s.len(), 5);
        assert_eq!(s.min().unwrap(), &Rat::from(2 * big));
        assert_eq!(productset_size(&a, &a).unwrap(), 6);
        assert_eq!(ratioset_size(&a, &a).unwrap(), 7);
    }

    #[test]
    fn parse_format() {
        let s = NumberSet::parse("# header\n3\n\n1/2\n  4/2 \n2\n").unwrap();
        assert_eq!(s, rset(&[(1, 2), (2, 1), (3, 1)]));
        assert_eq!(s.to_file_string(), "1/2\n2\n3\n");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match NumberSet::parse("1\n2\n0\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        match NumberSet::parse("1\n\n-3/4\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        match NumberSet::parse("# c\nx\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(NumberSet::parse("# only\n"), Err(Error::EmptySet)));
    }
}
