//! Convex hull volume by pulling, independent of the placing construction.
//!
//! `vol(conv V) = Σ vol(conv(apex ∪ F))` over the hull facets `F` not
//! containing a fixed hull vertex `apex`, with each facet itself pulled
//! recursively. Facets are found by monotone chain in the plane, gift
//! wrapping in space and brute force over supporting hyperplanes above that,
//! working in a coordinate projection that is injective on the current face.

use std::cmp::Ordering;
use std::collections::HashSet;

use num_bigint::BigInt;

use super::predicates::{self, Rows, Sign};
use super::{simplex_volume, ChartPoint};
use crate::rat::Rat;

struct Pts<'a> {
    pts: &'a [ChartPoint],
    rows: Rows<'a>,
}

impl<'a> Pts<'a> {
    fn new(pts: &'a [ChartPoint]) -> Self {
        Pts {
            pts,
            rows: Rows::new(pts.iter().map(|p| p.homogeneous()).collect()),
        }
    }

    /// Homogeneous row of point `i` restricted to the coordinates `cols`
    /// (indices into the chart coordinates).
    fn row(&self, i: usize, cols: &[usize]) -> Vec<BigInt> {
        let h = self.pts[i].homogeneous();
        let mut r = Vec::with_capacity(cols.len() + 1);
        r.push(h[0].clone());
        r.extend(cols.iter().map(|&c| h[c + 1].clone()));
        r
    }

    fn orient(&self, idx: &[usize], cols: &[usize]) -> Sign {
        self.rows.orient(idx, Some(cols))
    }

    fn affine_rank(&self, idx: &[usize], cols: &[usize]) -> usize {
        let rows: Vec<Vec<BigInt>> = idx.iter().map(|&i| self.row(i, cols)).collect();
        let refs: Vec<&[BigInt]> = rows.iter().map(|r| r.as_slice()).collect();
        predicates::rank(&refs).saturating_sub(1)
    }

    fn lex_cmp(&self, a: usize, b: usize, cols: &[usize]) -> Ordering {
        let (ha, hb) = (self.pts[a].homogeneous(), self.pts[b].homogeneous());
        for &c in cols {
            let l = &ha[c + 1] * &hb[0];
            let r = &hb[c + 1] * &ha[0];
            match l.cmp(&r) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }

    /// Strict convex hull polygon (counter-clockwise) in the 2-D projection.
    fn monotone_chain(&self, idx: &[usize], cols: &[usize]) -> Vec<usize> {
        let mut v = idx.to_vec();
        v.sort_by(|&a, &b| self.lex_cmp(a, b, cols));
        v.dedup_by(|a, b| self.lex_cmp(*a, *b, cols) == Ordering::Equal);
        if v.len() < 3 {
            return v;
        }
        let mut hull: Vec<usize> = Vec::with_capacity(2 * v.len());
        for pass in 0..2 {
            let start = hull.len();
            let iter: Box<dyn Iterator<Item = &usize>> = if pass == 0 {
                Box::new(v.iter())
            } else {
                Box::new(v.iter().rev())
            };
            for &p in iter {
                while hull.len() >= start + 2 {
                    let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                    if self.orient(&[a, b, p], cols) == Sign::Positive {
                        break;
                    }
                    hull.pop();
                }
                hull.push(p);
            }
            hull.pop();
        }
        hull
    }

    /// Projection of `cols` onto `j` coordinates that keeps the affine rank
    /// of `idx` equal to `j`.
    fn injective_projection(&self, idx: &[usize], cols: &[usize], j: usize) -> Vec<usize> {
        for sub in combinations(cols.len(), j) {
            let c: Vec<usize> = sub.iter().map(|&s| cols[s]).collect();
            if self.affine_rank(idx, &c) == j {
                return c;
            }
        }
        unreachable!("a face of affine dimension j projects injectively onto some j coordinates")
    }

    /// Facets of the full-dimensional point set `idx` in the projection
    /// `cols`, each as a sorted list of the points on it.
    fn facets(&self, idx: &[usize], cols: &[usize]) -> Vec<Vec<usize>> {
        let j = cols.len();
        if j == 2 {
            let h = self.monotone_chain(idx, cols);
            return (0..h.len())
                .map(|i| {
                    let (a, b) = (h[i], h[(i + 1) % h.len()]);
                    let mut f: Vec<usize> = idx
                        .iter()
                        .copied()
                        .filter(|&p| self.orient(&[a, b, p], cols) == Sign::Zero)
                        .collect();
                    f.sort_unstable();
                    f
                })
                .collect();
        }
        if j == 3 {
            return self.gift_wrap_3d(idx, cols);
        }
        self.facets_brute(idx, cols)
    }

    /// Facets by testing every affinely independent `j`-subset as a
    /// supporting hyperplane.
    fn facets_brute(&self, idx: &[usize], cols: &[usize]) -> Vec<Vec<usize>> {
        let j = cols.len();
        let mut found: Vec<Vec<usize>> = Vec::new();
        for sub in combinations(idx.len(), j) {
            let s: Vec<usize> = sub.iter().map(|&x| idx[x]).collect();
            if found
                .iter()
                .any(|f| s.iter().all(|v| f.binary_search(v).is_ok()))
            {
                continue;
            }
            if self.affine_rank(&s, cols) != j - 1 {
                continue;
            }
            let mut side = Sign::Zero;
            let mut on: Vec<usize> = Vec::new();
            let mut supporting = true;
            for &q in idx {
                let mut t = s.clone();
                t.push(q);
                match self.orient(&t, cols) {
                    Sign::Zero => on.push(q),
                    o if side == Sign::Zero => side = o,
                    o if o != side => {
                        supporting = false;
                        break;
                    }
                    _ => {}
                }
            }
            if supporting {
                on.sort_unstable();
                found.push(on);
            }
        }
        found.sort();
        found
    }

    /// Points of `idx` on the plane through `a, b, c`, if that plane
    /// supports `idx`.
    fn supporting_plane(
        &self,
        idx: &[usize],
        cols: &[usize],
        abc: [usize; 3],
    ) -> Option<Vec<usize>> {
        let mut side = Sign::Zero;
        let mut on = Vec::new();
        for &q in idx {
            match self.orient(&[abc[0], abc[1], abc[2], q], cols) {
                Sign::Zero => on.push(q),
                o if side == Sign::Zero => side = o,
                o if o != side => return None,
                _ => {}
            }
        }
        on.sort_unstable();
        Some(on)
    }

    /// Facets of a full-dimensional 3-D point set by gift wrapping: from
    /// each known facet, rotate a plane about every polygon edge until it
    /// meets the point set again.
    fn gift_wrap_3d(&self, idx: &[usize], cols: &[usize]) -> Vec<Vec<usize>> {
        let p0 = *idx
            .iter()
            .min_by(|&&a, &&b| self.lex_cmp(a, b, cols))
            .unwrap();
        let mut first = None;
        'search: for (x, &i) in idx.iter().enumerate() {
            for &j in &idx[x + 1..] {
                if i == p0 || j == p0 || self.affine_rank(&[p0, i, j], cols) != 2 {
                    continue;
                }
                if let Some(f) = self.supporting_plane(idx, cols, [p0, i, j]) {
                    first = Some(f);
                    break 'search;
                }
            }
        }
        let first = first.expect("a full-dimensional set has a facet through its lex-min point");
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let mut queue = vec![first.clone()];
        seen.insert(first);
        let mut out = Vec::new();
        while let Some(f) = queue.pop() {
            let pc = self.injective_projection(&f, cols, 2);
            let poly = self.monotone_chain(&f, &pc);
            let plane = [poly[0], poly[1], poly[2]];
            for e in 0..poly.len() {
                let (a, b) = (poly[e], poly[(e + 1) % poly.len()]);
                let inner = poly[(e + 2) % poly.len()];
                let mut q = *idx
                    .iter()
                    .find(|&&r| self.orient(&[plane[0], plane[1], plane[2], r], cols) != Sign::Zero)
                    .expect("full-dimensional");
                for &r in idx {
                    let si = self.orient(&[a, b, q, inner], cols);
                    let sr = self.orient(&[a, b, q, r], cols);
                    if sr != Sign::Zero && sr == si.negate() {
                        q = r;
                    }
                }
                let mut g: Vec<usize> = idx
                    .iter()
                    .copied()
                    .filter(|&r| self.orient(&[a, b, q, r], cols) == Sign::Zero)
                    .collect();
                g.sort_unstable();
                if seen.insert(g.clone()) {
                    queue.push(g);
                }
            }
            out.push(f);
        }
        out.sort();
        out
    }

    /// Full-dimensional simplices (as point indices) of a pulling
    /// triangulation of `conv(idx)` in the projection `cols`.
    fn pulling(&self, idx: &[usize], cols: &[usize]) -> Vec<Vec<usize>> {
        let j = cols.len();
        if j == 1 {
            let lo = *idx
                .iter()
                .min_by(|&&a, &&b| self.lex_cmp(a, b, cols))
                .unwrap();
            let hi = *idx
                .iter()
                .max_by(|&&a, &&b| self.lex_cmp(a, b, cols))
                .unwrap();
            return vec![vec![lo, hi]];
        }
        let apex = *idx
            .iter()
            .min_by(|&&a, &&b| self.lex_cmp(a, b, cols))
            .unwrap();
        let mut out = Vec::new();
        for f in self.facets(idx, cols) {
            if f.contains(&apex) {
                continue;
            }
            let sub_cols = self.injective_projection(&f, cols, j - 1);
            for mut s in self.pulling(&f, &sub_cols) {
                s.insert(0, apex);
                out.push(s);
            }
        }
        out
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur: Option<Vec<usize>> = (k <= n).then(|| (0..k).collect());
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let c = cur.as_mut().unwrap();
        let mut i = k;
        loop {
            if i == 0 {
                cur = None;
                break;
            }
            i -= 1;
            if c[i] < n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    })
}

/// Exact volume of the convex hull of full-dimensional `pts` in dimension
/// `dim`.
pub(crate) fn hull_volume(pts: &[ChartPoint], dim: usize) -> Rat {
    if dim == 0 {
        return if pts.is_empty() {
            Rat::zero()
        } else {
            Rat::one()
        };
    }
    let p = Pts::new(pts);
    let idx: Vec<usize> = (0..pts.len()).collect();
    let cols: Vec<usize> = (0..dim).collect();
    if p.affine_rank(&idx, &cols) < dim {
        return Rat::zero();
    }
    p.pulling(&idx, &cols)
        .iter()
        .map(|s| {
            let rows: Vec<&[BigInt]> = s.iter().map(|&i| pts[i].homogeneous()).collect();
            simplex_volume(&rows)
        })
        .fold(Rat::zero(), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> ChartPoint {
        ChartPoint::from_integers(c)
    }

    #[test]
    fn combinations_enumerate() {
        let all: Vec<Vec<usize>> = combinations(4, 2).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 1]);
        assert_eq!(all[5], vec![2, 3]);
        assert_eq!(combinations(3, 0).count(), 1);
        assert_eq!(combinations(2, 3).count(), 0);
    }

    #[test]
    fn square_area_with_collinear_boundary() {
        let pts = [
            p(&[0, 0]),
            p(&[1, 0]),
            p(&[2, 0]),
            p(&[2, 2]),
            p(&[0, 2]),
            p(&[1, 1]),
        ];
        assert_eq!(hull_volume(&pts, 2), Rat::from(4u64));
    }

    #[test]
    fn cube_volume_with_coplanar_faces() {
        let mut pts = Vec::new();
        for x in 0..3 {
            for y in 0..3 {
                for z in 0..3 {
                    pts.push(p(&[x, y, z]));
                }
            }
        }
        assert_eq!(hull_volume(&pts, 3), Rat::from(8u64));
    }

    #[test]
    fn segment_length() {
        let pts = [p(&[3]), p(&[-1]), p(&[0])];
        assert_eq!(hull_volume(&pts, 1), Rat::from(4u64));
    }

    #[test]
    fn gift_wrapping_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for round in 0..20 {
            let n = 5 + round;
            let pts: Vec<ChartPoint> = (0..n)
                .map(|_| {
                    p(&[
                        rng.gen_range(0..4),
                        rng.gen_range(0..4),
                        rng.gen_range(0..4),
                    ])
                })
                .collect();
            let mut uniq = pts.clone();
            uniq.sort_by(|a, b| a.lex_cmp(b));
            uniq.dedup();
            let h = Pts::new(&uniq);
            let idx: Vec<usize> = (0..uniq.len()).collect();
            let cols = [0, 1, 2];
            if h.affine_rank(&idx, &cols) < 3 {
                continue;
            }
            assert_eq!(h.gift_wrap_3d(&idx, &cols), h.facets_brute(&idx, &cols));
        }
    }

    #[test]
    fn slanted_tetrahedron() {
        let pts = [p(&[0, 0, 0]), p(&[3, 1, 0]), p(&[1, 4, 1]), p(&[2, 2, 5])];
        let rows: Vec<&[BigInt]> = pts.iter().map(|q| q.homogeneous()).collect();
        assert_eq!(hull_volume(&pts, 3), simplex_volume(&rows));
    }
}
