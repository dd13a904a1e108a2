//! Exact geometry of lines through the origin.
//!
//! Lines through the origin in the all-positive orthant are points of
//! projective space; fixing the first coordinate to 1 puts them in one affine
//! chart, where they are triangulated.

mod hull;
mod placing;
pub mod predicates;
mod validate;

use std::cmp::Ordering;
use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rat::Rat;

pub use placing::placing_triangulation;
pub use predicates::Sign;
pub use validate::{validate_triangulation, TriangulationReport};

/// A point of the affine chart, stored as the primitive homogeneous integer
/// vector `(w, w·x₁, …, w·x_d)` with `w > 0`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ChartPoint {
    hom: Vec<BigInt>,
}

impl ChartPoint {
    pub fn new(coords: &[Rat]) -> Self {
        let mut w = BigInt::one();
        for c in coords {
            w = w.lcm(c.denom());
        }
        let mut hom = Vec::with_capacity(coords.len() + 1);
        hom.push(w.clone());
        for c in coords {
            hom.push(c.numer() * (&w / c.denom()));
        }
        ChartPoint::normalized(hom)
    }

    pub fn from_integers(coords: &[i64]) -> Self {
        let mut hom = vec![BigInt::one()];
        hom.extend(coords.iter().map(|&c| BigInt::from(c)));
        ChartPoint { hom }
    }

    /// Point of the chart for the direction `v`; `v[0]` must be positive.
    pub fn from_direction(v: Vec<BigInt>) -> Result<Self> {
        if v.is_empty() || !v[0].is_positive() {
            return Err(Error::InvalidParameter(
                "direction must have a positive first coordinate".into(),
            ));
        }
        Ok(ChartPoint::normalized(v))
    }

    fn normalized(mut hom: Vec<BigInt>) -> Self {
        let g = hom.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
        if !g.is_one() && !g.is_zero() {
            for v in hom.iter_mut() {
                *v = &*v / &g;
            }
        }
        ChartPoint { hom }
    }

    pub fn dim(&self) -> usize {
        self.hom.len() - 1
    }

    pub fn homogeneous(&self) -> &[BigInt] {
        &self.hom
    }

    pub fn coords(&self) -> Vec<Rat> {
        self.hom[1..]
            .iter()
            .map(|x| Rat::new(x.clone(), self.hom[0].clone()))
            .collect()
    }

    pub fn coord(&self, i: usize) -> Rat {
        Rat::new(self.hom[i + 1].clone(), self.hom[0].clone())
    }

    /// Lexicographic comparison of the chart coordinates.
    pub fn lex_cmp(&self, other: &ChartPoint) -> Ordering {
        for i in 1..self.hom.len().min(other.hom.len()) {
            let l = &self.hom[i] * &other.hom[0];
            let r = &other.hom[i] * &self.hom[0];
            match l.cmp(&r) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.hom.len().cmp(&other.hom.len())
    }
}

impl Serialize for ChartPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

/// A line through the origin with direction normalized to a leading 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LineKD {
    pub direction: Vec<Rat>,
    /// Points of `×^k A` on the line.
    pub count: u64,
}

impl LineKD {
    pub fn chart_point(&self) -> ChartPoint {
        ChartPoint::new(&self.direction[1..])
    }
}

/// Sign of the affine orientation determinant of `d + 1` points in dimension
/// `d`.
pub fn orientation(points: &[ChartPoint]) -> Result<Sign> {
    let d = points.len().saturating_sub(1);
    if points.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        });
    }
    if let Some(p) = points.iter().find(|p| p.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: p.dim(),
        });
    }
    let rows: Vec<&[BigInt]> = points.iter().map(|p| p.homogeneous()).collect();
    Ok(predicates::det_sign(&rows))
}

/// `d!`-normalized volume of a simplex given by `d + 1` homogeneous rows.
pub(crate) fn simplex_volume(rows: &[&[BigInt]]) -> Rat {
    let d = rows.len() - 1;
    let det = predicates::det(rows).abs();
    let mut den: BigInt = (1..=d as u64).map(BigInt::from).product();
    for r in rows {
        den *= &r[0];
    }
    Rat::new(det, den)
}

/// Whether the directions behind `points` are closed under permuting their
/// `k` coordinates (followed by renormalization to a leading 1).
pub fn symmetry_check(points: &[ChartPoint], k: usize) -> bool {
    if points.iter().any(|p| p.dim() + 1 != k) {
        return false;
    }
    if k < 2 {
        return true;
    }
    let set: HashSet<&[BigInt]> = points.iter().map(|p| p.homogeneous()).collect();
    // a transposition and a k-cycle generate S_k
    let transpose = |v: &[BigInt]| {
        let mut w = v.to_vec();
        w.swap(0, 1);
        w
    };
    let rotate = |v: &[BigInt]| {
        let mut w = v.to_vec();
        w.rotate_left(1);
        w
    };
    points.iter().all(|p| {
        [transpose(p.homogeneous()), rotate(p.homogeneous())]
            .into_iter()
            .all(|w| w[0].is_positive() && set.contains(w.as_slice()))
    })
}

/// A simplicial decomposition of the convex hull of `vertices`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Triangulation {
    pub dim: usize,
    pub vertices: Vec<ChartPoint>,
    /// Each simplex lists `dim + 1` vertex indices in ascending order.
    pub simplices: Vec<Vec<usize>>,
}

impl Triangulation {
    pub fn simplex_rows(&self, s: &[usize]) -> Vec<&[BigInt]> {
        s.iter().map(|&i| self.vertices[i].homogeneous()).collect()
    }

    pub fn volume(&self) -> Rat {
        self.simplices
            .iter()
            .map(|s| simplex_volume(&self.simplex_rows(s)))
            .fold(Rat::zero(), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> ChartPoint {
        ChartPoint::from_integers(c)
    }

    #[test]
    fn orientation_examples() {
        assert_eq!(
            orientation(&[p(&[0, 0]), p(&[1, 0]), p(&[0, 1])]).unwrap(),
            Sign::Positive
        );
        assert_eq!(
            orientation(&[p(&[0, 0]), p(&[1, 1]), p(&[2, 2])]).unwrap(),
            Sign::Zero
        );
        assert_eq!(
            orientation(&[p(&[0, 0, 0]), p(&[1, 0, 0]), p(&[0, 1, 0]), p(&[0, 0, 1])]).unwrap(),
            Sign::Positive
        );
        assert_eq!(
            orientation(&[p(&[0, 0]), p(&[0, 1]), p(&[1, 0])]).unwrap(),
            Sign::Negative
        );
    }

    #[test]
    fn orientation_dimension_mismatch() {
        assert!(matches!(
            orientation(&[p(&[0, 0]), p(&[1, 0])]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(orientation(&[]).is_err());
    }

    #[test]
    fn chart_point_normalization() {
        let a = ChartPoint::new(&[Rat::new(1, 2), Rat::new(2, 3)]);
        assert_eq!(a.homogeneous(), &[6, 3, 4].map(BigInt::from));
        assert_eq!(a.coords(), vec![Rat::new(1, 2), Rat::new(2, 3)]);
        let b = ChartPoint::from_direction([2, 1, 4].map(BigInt::from).to_vec()).unwrap();
        assert_eq!(b.coords(), vec![Rat::new(1, 2), Rat::from(2u64)]);
        assert!(ChartPoint::from_direction([0, 1].map(BigInt::from).to_vec()).is_err());
    }

    #[test]
    fn lex_order() {
        let a = ChartPoint::new(&[Rat::new(1, 2), Rat::from(5u64)]);
        let b = ChartPoint::new(&[Rat::new(2, 3), Rat::from(0u64)]);
        assert_eq!(a.lex_cmp(&b), Ordering::Less);
        assert_eq!(a.lex_cmp(&a), Ordering::Equal);
    }

    #[test]
    fn symmetry_examples() {
        // directions of {1,2}^3
        let dirs: Vec<[i64; 3]> = vec![
            [1, 1, 1],
            [1, 1, 2],
            [1, 2, 1],
            [2, 1, 1],
            [1, 2, 2],
            [2, 1, 2],
            [2, 2, 1],
        ];
        let pts: Vec<ChartPoint> = dirs
            .iter()
            .map(|d| ChartPoint::from_direction(d.map(BigInt::from).to_vec()).unwrap())
            .collect();
        assert!(symmetry_check(&pts, 3));
        assert!(!symmetry_check(&pts[..6], 3));
        assert!(!symmetry_check(&[p(&[0, 0]), p(&[1, 2])], 3));
    }

    #[test]
    fn unit_simplex_volume() {
        let pts = [p(&[0, 0, 0]), p(&[1, 0, 0]), p(&[0, 1, 0]), p(&[0, 0, 1])];
        let rows: Vec<&[BigInt]> = pts.iter().map(|p| p.homogeneous()).collect();
        assert_eq!(simplex_volume(&rows), Rat::new(1, 6));
        let h = [
            ChartPoint::new(&[Rat::new(1, 2), Rat::zero()]),
            p(&[1, 0]),
            p(&[1, 1]),
        ];
        let rows: Vec<&[BigInt]> = h.iter().map(|p| p.homogeneous()).collect();
        assert_eq!(simplex_volume(&rows), Rat::new(1, 4));
    }
}
