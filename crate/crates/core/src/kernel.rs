//! Integer images of rational sets.
//!
//! A finite set of positive rationals `A` is written as `A = A' / L` with `L`
//! the lcm of the denominators and `A'` a set of positive integers. Sums,
//! products and ratios of `A` are then computed on `A'` and rescaled. When
//! every scaled value is below 2^32 the kernel runs on `u64` (all pairwise
//! sums and products fit), otherwise it falls back to `BigUint`.

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;

use crate::rat::Rat;

/// Pair spaces at least this large are enumerated in parallel.
pub(crate) const PAR_THRESHOLD: usize = 1 << 15;

pub(crate) trait Int:
    Clone + Ord + Hash + Eq + Send + Sync + Debug + Integer + Into<BigUint> + 'static
{
    fn from_big(v: &BigUint) -> Option<Self>;
}

impl Int for u64 {
    fn from_big(v: &BigUint) -> Option<Self> {
        v.to_u64()
    }
}

impl Int for BigUint {
    fn from_big(v: &BigUint) -> Option<Self> {
        Some(v.clone())
    }
}

pub(crate) enum Image {
    Narrow {
        scale: BigUint,
        vals: Vec<Vec<u64>>,
    },
    Wide {
        scale: BigUint,
        vals: Vec<Vec<BigUint>>,
    },
}

/// Runs `$body` with `$vals: &Vec<Vec<T>>` bound to the image values and
/// `$scale: &BigUint`, for whichever integer width the image uses.
macro_rules! with_image {
    ($img:expr, |$vals:ident, $scale:ident| $body:expr) => {
        match $img {
            $crate::kernel::Image::Narrow {
                vals: $vals,
                scale: $scale,
            } => $body,
            $crate::kernel::Image::Wide {
                vals: $vals,
                scale: $scale,
            } => $body,
        }
    };
}
pub(crate) use with_image;

impl Image {
    /// Joint image of several sets with one common scale.
    pub(crate) fn joint(sets: &[&[Rat]]) -> Image {
        let mut scale = BigInt::one();
        for s in sets {
            for r in s.iter() {
                scale = scale.lcm(r.denom());
            }
        }
        let scaled: Vec<Vec<BigUint>> = sets
            .iter()
            .map(|s| {
                s.iter()
                    .map(|r| {
                        (r.numer() * (&scale / r.denom()))
                            .to_biguint()
                            .expect("positive elements")
                    })
                    .collect()
            })
            .collect();
        let scale = scale.to_biguint().expect("positive scale");
        let narrow = scaled
            .iter()
            .flatten()
            .all(|v| v.to_u64().is_some_and(|x| x < (1u64 << 32)));
        if narrow {
            Image::Narrow {
                scale,
                vals: scaled
                    .into_iter()
                    .map(|s| s.into_iter().map(|v| v.to_u64().unwrap()).collect())
                    .collect(),
            }
        } else {
            Image::Wide {
                scale,
                vals: scaled,
            }
        }
    }
}

pub(crate) fn to_big<T: Int>(v: &T) -> BigUint {
    v.clone().into()
}

/// `v / scale` as a rational.
pub(crate) fn unscale<T: Int>(v: &T, scale: &BigUint) -> Rat {
    Rat::from_biguint_ratio(to_big(v), scale.clone())
}

/// Sorted, deduplicated `{op(x, y) : x in a, y in b}`.
pub(crate) fn pair_combine<T: Int>(a: &[T], b: &[T], op: fn(&T, &T) -> T) -> Vec<T> {
    let mut out: Vec<T> = if a.len().saturating_mul(b.len()) >= PAR_THRESHOLD {
        a.par_iter()
            .flat_map_iter(|x| b.iter().map(move |y| op(x, y)))
            .collect()
    } else {
        a.iter()
            .flat_map(|x| b.iter().map(move |y| op(x, y)))
            .collect()
    };
    if out.len() >= PAR_THRESHOLD {
        out.par_sort_unstable();
    } else {
        out.sort_unstable();
    }
    out.dedup();
    out
}

pub(crate) fn add<T: Int>(x: &T, y: &T) -> T {
    x.clone() + y.clone()
}

pub(crate) fn mul<T: Int>(x: &T, y: &T) -> T {
    x.clone() * y.clone()
}

/// Reduced `(p, q)` with `p/q = x/y`.
pub(crate) fn reduce<T: Int>(x: &T, y: &T) -> (T, T) {
    let g = x.gcd(y);
    (x.clone() / g.clone(), y.clone() / g)
}

/// Counts of every reduced ratio `x/y` over `x in a`, `y in b`.
///
/// The returned list is sorted by the reduced pair `(p, q)`, which is a
/// canonical (not value) order.
pub(crate) fn ratio_counts<T: Int>(a: &[T], b: &[T]) -> Vec<((T, T), u64)> {
    let mut keys: Vec<(T, T)> = if a.len().saturating_mul(b.len()) >= PAR_THRESHOLD {
        a.par_iter()
            .flat_map_iter(|x| b.iter().map(move |y| reduce(x, y)))
            .collect()
    } else {
        a.iter()
            .flat_map(|x| b.iter().map(move |y| reduce(x, y)))
            .collect()
    };
    if keys.len() >= PAR_THRESHOLD {
        keys.par_sort_unstable();
    } else {
        keys.sort_unstable();
    }
    run_lengths(keys)
}

/// Narrow specialization of [`ratio_counts`] with `(p, q)` packed as
/// `p << 32 | q`; much lighter on memory for large sets.
pub(crate) fn packed_ratio_counts(a: &[u64], b: &[u64]) -> Vec<(u64, u64)> {
    let pack = |x: &u64, y: &u64| {
        let g = x.gcd(y);
        ((x / g) << 32) | (y / g)
    };
    let mut keys: Vec<u64> = if a.len().saturating_mul(b.len()) >= PAR_THRESHOLD {
        a.par_iter()
            .flat_map_iter(|x| b.iter().map(move |y| pack(x, y)))
            .collect()
    } else {
        a.iter()
            .flat_map(|x| b.iter().map(move |y| pack(x, y)))
            .collect()
    };
    if keys.len() >= PAR_THRESHOLD {
        keys.par_sort_unstable();
    } else {
        keys.sort_unstable();
    }
    run_lengths(keys)
}

pub(crate) fn unpack(key: u64) -> (u64, u64) {
    (key >> 32, key & 0xffff_ffff)
}

pub(crate) fn pack(p: u64, q: u64) -> u64 {
    (p << 32) | q
}

fn run_lengths<K: PartialEq>(sorted: Vec<K>) -> Vec<(K, u64)> {
    let mut out: Vec<(K, u64)> = Vec::new();
    for k in sorted {
        match out.last_mut() {
            Some((last, c)) if *last == k => *c += 1,
            _ => out.push((k, 1)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rats(v: &[(i64, i64)]) -> Vec<Rat> {
        v.iter().map(|&(p, q)| Rat::new(p, q)).collect()
    }

    #[test]
    fn joint_image_uses_common_scale() {
        let a = rats(&[(1, 2), (1, 1)]);
        let b = rats(&[(1, 3)]);
        match Image::joint(&[&a, &b]) {
            Image::Narrow { scale, vals } => {
                assert_eq!(scale, BigUint::from(6u32));
                assert_eq!(vals, vec![vec![3, 6], vec![2]]);
            }
            Image::Wide { .. } => panic!("expected narrow image"),
        }
    }

    #[test]
    fn wide_image_for_large_values() {
        let a = vec![Rat::from_integer(1u64 << 40)];
        assert!(matches!(Image::joint(&[&a]), Image::Wide { .. }));
    }

    #[test]
    fn packed_and_generic_ratio_counts_agree() {
        let a = [1u64, 2, 3, 4, 6];
        let generic = ratio_counts(&a, &a);
        let packed = packed_ratio_counts(&a, &a);
        assert_eq!(generic.len(), packed.len());
        for (((p, q), c), (key, c2)) in generic.iter().zip(&packed) {
            assert_eq!((*p, *q), unpack(*key));
            assert_eq!(c, c2);
        }
    }
}
