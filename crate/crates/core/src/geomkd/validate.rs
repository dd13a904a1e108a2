//! Exact validation of a triangulation.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::hull::{combinations, hull_volume};
use super::predicates::{Rows, Sign};
use super::Triangulation;
use crate::rat::Rat;

/// Dimensions up to which pairwise simplex intersections are checked.
pub const PAIRWISE_MAX_DIM: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TriangulationReport {
    pub dim: usize,
    pub num_vertices: usize,
    pub num_simplices: usize,
    /// Each simplex has `dim + 1` distinct, in-range vertex indices.
    pub well_formed: bool,
    pub distinct_vertices: bool,
    pub vertex_complete: bool,
    pub nondegenerate: bool,
    pub distinct_simplices: bool,
    /// Interior facets separate their two simplices; boundary facets
    /// support the whole vertex set; no facet lies in three simplices.
    pub facets_consistent: bool,
    /// `None` above [`PAIRWISE_MAX_DIM`].
    pub proper_intersections: Option<bool>,
    pub simplex_volume: Rat,
    pub hull_volume: Rat,
    pub volume_conserved: bool,
    /// `|τ| ≥ |V| − d`.
    pub size_bound: bool,
    pub failures: Vec<String>,
}

impl TriangulationReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

struct Ctx<'a> {
    t: &'a Triangulation,
    rows: Rows<'a>,
}

impl Ctx<'_> {
    fn orient(&self, idx: &[usize]) -> Sign {
        self.rows.orient(idx, None)
    }

    /// Side of vertex `q` relative to facet `f` of simplex `s`, oriented so
    /// that the opposite vertex of `s` is positive.
    fn side(&self, s: &[usize], f: &[usize], q: usize) -> Sign {
        let opp = *s.iter().find(|v| !f.contains(v)).expect("facet of simplex");
        let mut a = f.to_vec();
        a.push(opp);
        let mut b = f.to_vec();
        b.push(q);
        let (so, sq) = (self.orient(&a), self.orient(&b));
        if so == Sign::Negative {
            sq.negate()
        } else {
            sq
        }
    }

    /// Some facet hyperplane of `s` weakly separates `s` from `t`, and the
    /// vertices of `s` and `t` on it are nested as index sets.
    fn separated_by_facet_of(&self, s: &[usize], t: &[usize]) -> bool {
        (0..s.len()).any(|j| {
            let mut f = s.to_vec();
            f.remove(j);
            let mut on_t = Vec::new();
            for &q in t {
                match self.side(s, &f, q) {
                    Sign::Positive => return false,
                    Sign::Zero => on_t.push(q),
                    Sign::Negative => {}
                }
            }
            on_t.iter().all(|q| f.contains(q)) || f.iter().all(|q| on_t.contains(q))
        })
    }

    /// Vertices of `s` and of `t` on every hyperplane weakly separating
    /// them, or `None` if no hyperplane does.
    ///
    /// Separating hyperplanes form a pointed cone whose extreme rays pass
    /// through `d` affinely independent vertices of `s ∪ t`, so enumerating
    /// those and intersecting their contact sets yields the contacts of a
    /// generic separator.
    fn minimal_contacts(&self, s: &[usize], t: &[usize]) -> Option<(Vec<usize>, Vec<usize>)> {
        let d = self.t.dim;
        let mut pool: Vec<usize> = s.iter().chain(t).copied().collect();
        pool.sort_unstable();
        pool.dedup();
        let mut contacts: Option<(Vec<usize>, Vec<usize>)> = None;
        let mut h = Vec::with_capacity(d + 1);
        'planes: for sub in combinations(pool.len(), d) {
            let (mut side_s, mut side_t) = (Sign::Zero, Sign::Zero);
            let (mut on_s, mut on_t) = (Vec::new(), Vec::new());
            for (q, is_s) in s
                .iter()
                .map(|&q| (q, true))
                .chain(t.iter().map(|&q| (q, false)))
            {
                h.clear();
                h.extend(sub.iter().map(|&i| pool[i]));
                h.push(q);
                let o = self.orient(&h);
                let (side, on) = if is_s {
                    (&mut side_s, &mut on_s)
                } else {
                    (&mut side_t, &mut on_t)
                };
                match o {
                    Sign::Zero => on.push(q),
                    o if *side == Sign::Zero => *side = o,
                    o if o != *side => continue 'planes,
                    _ => {}
                }
            }
            if side_s == Sign::Zero || side_s == side_t {
                // dependent subset, or both simplices on one side
                continue;
            }
            contacts = Some(match contacts {
                None => (on_s, on_t),
                Some((cs, ct)) => (
                    cs.into_iter().filter(|v| on_s.contains(v)).collect(),
                    ct.into_iter().filter(|v| on_t.contains(v)).collect(),
                ),
            });
        }
        contacts
    }

    /// Whether two simplices meet in a common face.
    fn intersect_properly(&self, s: &[usize], t: &[usize]) -> bool {
        if self.separated_by_facet_of(s, t) || self.separated_by_facet_of(t, s) {
            return true;
        }
        let Some((cs, ct)) = self.minimal_contacts(s, t) else {
            return false;
        };
        // both simplices meet the separator exactly in conv(cs) ∩ conv(ct)
        let nested = cs.iter().all(|v| ct.contains(v)) || ct.iter().all(|v| cs.contains(v));
        nested || !self.has_circuit(&cs, &ct)
    }

    /// Searches for a circuit `(X, Y)` with `X ⊆ s`, `Y ⊆ t`, which exists
    /// exactly when the two simplices intersect improperly.
    fn has_circuit(&self, s: &[usize], t: &[usize]) -> bool {
        let d = self.t.dim;
        for xs in 1..=s.len() {
            for x in combinations(s.len(), xs) {
                let x: Vec<usize> = x.iter().map(|&i| s[i]).collect();
                let rest: Vec<usize> = t.iter().copied().filter(|v| !x.contains(v)).collect();
                for ys in 1..=rest.len().min(d + 2 - xs) {
                    for y in combinations(rest.len(), ys) {
                        let y: Vec<usize> = y.iter().map(|&i| rest[i]).collect();
                        if self.is_circuit(&x, &y) {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    /// Whether the points `x ∪ y` have a unique affine dependence, positive
    /// on `x` and negative on `y` (up to a global sign).
    fn is_circuit(&self, x: &[usize], y: &[usize]) -> bool {
        let cols: Vec<usize> = x.iter().chain(y).copied().collect();
        let Some(v) = unique_kernel_vector(
            &cols
                .iter()
                .map(|&i| self.t.vertices[i].homogeneous())
                .collect::<Vec<_>>(),
        ) else {
            return false;
        };
        let sx = v[0].is_positive();
        v.iter()
            .enumerate()
            .all(|(i, c)| !c.is_zero() && (c.is_positive() == sx) == (i < x.len()))
    }
}

/// The kernel vector of the matrix with the given columns, when the kernel
/// is one-dimensional.
#[allow(clippy::needless_range_loop)]
fn unique_kernel_vector(columns: &[&[BigInt]]) -> Option<Vec<BigRational>> {
    let m = columns.len();
    let rows = columns.first()?.len();
    let mut a: Vec<Vec<BigRational>> = (0..rows)
        .map(|r| {
            columns
                .iter()
                .map(|c| BigRational::from_integer(c[r].clone()))
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for j in c..m {
            a[r][j] = &a[r][j] * &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..m {
                    let v = &a[r][j] * &f;
                    a[i][j] = &a[i][j] - v;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if m - pivots.len() != 1 {
        return None;
    }
    let free = (0..m).find(|c| !pivots.contains(c))?;
    let mut v = vec![BigRational::zero(); m];
    v[free] = BigRational::from_integer(1.into());
    for (row, &pc) in pivots.iter().enumerate() {
        v[pc] = -a[row][free].clone();
    }
    Some(v)
}

/// Inflated floating-point bounding boxes, used only to skip pairs that are
/// certainly disjoint.
fn bounding_box(t: &Triangulation, s: &[usize]) -> Vec<(f64, f64)> {
    (0..t.dim)
        .map(|i| {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &v in s {
                let x = t.vertices[v].coord(i).to_f64();
                lo = lo.min(x);
                hi = hi.max(x);
            }
            let pad = 1e-9 * (1.0 + lo.abs().max(hi.abs()));
            (lo - pad, hi + pad)
        })
        .collect()
}

fn boxes_overlap(a: &[(f64, f64)], b: &[(f64, f64)]) -> bool {
    a.iter().zip(b).all(|(x, y)| x.0 <= y.1 && y.0 <= x.1)
}

fn check_pairs(ctx: &Ctx, simplices: &[Vec<usize>]) -> Vec<(usize, usize)> {
    let t = ctx.t;
    let boxes: Vec<Vec<(f64, f64)>> = simplices.iter().map(|s| bounding_box(t, s)).collect();
    let mut order: Vec<usize> = (0..simplices.len()).collect();
    if t.dim > 0 {
        order.sort_by(|&a, &b| boxes[a][0].0.total_cmp(&boxes[b][0].0));
    }
    (0..order.len())
        .into_par_iter()
        .flat_map_iter(|oi| {
            let i = order[oi];
            let mut bad = Vec::new();
            for &j in &order[oi + 1..] {
                if t.dim > 0 && boxes[j][0].0 > boxes[i][0].1 {
                    break;
                }
                if !boxes_overlap(&boxes[i], &boxes[j]) {
                    continue;
                }
                if !ctx.intersect_properly(&simplices[i], &simplices[j]) {
                    bad.push((i.min(j), i.max(j)));
                }
            }
            bad
        })
        .collect()
}

/// Checks every structural property of a triangulation exactly.
pub fn validate_triangulation(t: &Triangulation) -> TriangulationReport {
    let d = t.dim;
    let n = t.vertices.len();
    let mut failures = Vec::new();

    let well_formed = t.vertices.iter().all(|v| v.dim() == d)
        && t.simplices.iter().all(|s| {
            s.len() == d + 1 && s.iter().all(|&v| v < n) && s.windows(2).all(|w| w[0] < w[1])
        });
    if !well_formed {
        failures.push("malformed simplex or vertex dimension".to_string());
        return TriangulationReport {
            dim: d,
            num_vertices: n,
            num_simplices: t.simplices.len(),
            well_formed,
            distinct_vertices: false,
            vertex_complete: false,
            nondegenerate: false,
            distinct_simplices: false,
            facets_consistent: false,
            proper_intersections: None,
            simplex_volume: Rat::zero(),
            hull_volume: Rat::zero(),
            volume_conserved: false,
            size_bound: false,
            failures,
        };
    }
    let ctx = Ctx {
        t,
        rows: Rows::new(t.vertices.iter().map(|v| v.homogeneous()).collect()),
    };

    let distinct_vertices = t.vertices.iter().collect::<HashSet<_>>().len() == n;
    if !distinct_vertices {
        failures.push("repeated vertex".to_string());
    }
    let used: HashSet<usize> = t.simplices.iter().flatten().copied().collect();
    let vertex_complete = used.len() == n;
    if !vertex_complete {
        failures.push(format!("{} vertices unused", n - used.len()));
    }
    let degenerate: Vec<usize> = t
        .simplices
        .iter()
        .enumerate()
        .filter(|(_, s)| ctx.orient(s) == Sign::Zero)
        .map(|(i, _)| i)
        .collect();
    let nondegenerate = degenerate.is_empty();
    if !nondegenerate {
        failures.push(format!("degenerate simplices {degenerate:?}"));
    }
    let distinct_simplices = t.simplices.iter().collect::<HashSet<_>>().len() == t.simplices.len();
    if !distinct_simplices {
        failures.push("repeated simplex".to_string());
    }

    let mut facets: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for (id, s) in t.simplices.iter().enumerate() {
        for j in 0..s.len() {
            let mut f = s.clone();
            f.remove(j);
            facets.entry(f).or_default().push(id);
        }
    }
    let mut facets_consistent = true;
    if nondegenerate {
        for (f, owners) in &facets {
            let ok = match owners.as_slice() {
                [a] => (0..n).all(|q| ctx.side(&t.simplices[*a], f, q) != Sign::Negative),
                [a, b] => {
                    let sa = &t.simplices[*a];
                    let ob = *t.simplices[*b].iter().find(|v| !f.contains(v)).unwrap();
                    ctx.side(sa, f, ob) == Sign::Negative
                }
                _ => false,
            };
            if !ok {
                facets_consistent = false;
                failures.push(format!("inconsistent facet {f:?} in simplices {owners:?}"));
                break;
            }
        }
    } else {
        facets_consistent = false;
    }

    let proper_intersections = (d <= PAIRWISE_MAX_DIM && nondegenerate).then(|| {
        let bad = check_pairs(&ctx, &t.simplices);
        if let Some((i, j)) = bad.first() {
            failures.push(format!(
                "simplices {i} and {j} intersect improperly ({} bad pairs)",
                bad.len()
            ));
        }
        bad.is_empty()
    });

    let simplex_volume = t.volume();
    let hull_volume = hull_volume(&t.vertices, d);
    let volume_conserved = simplex_volume == hull_volume;
    if !volume_conserved {
        failures.push(format!(
            "simplex volumes sum to {simplex_volume}, hull volume is {hull_volume}"
        ));
    }
    let size_bound = t.simplices.len() + d >= n;
    if !size_bound {
        failures.push(format!("{} simplices on {n} vertices", t.simplices.len()));
    }

    TriangulationReport {
        dim: d,
        num_vertices: n,
        num_simplices: t.simplices.len(),
        well_formed,
        distinct_vertices,
        vertex_complete,
        nondegenerate,
        distinct_simplices,
        facets_consistent,
        proper_intersections,
        simplex_volume,
        hull_volume,
        volume_conserved,
        size_bound,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geomkd::ChartPoint;

    fn p(c: &[i64]) -> ChartPoint {
        ChartPoint::from_integers(c)
    }

    fn tri(pts: &[&[i64]], simplices: Vec<Vec<usize>>) -> Triangulation {
        Triangulation {
            dim: pts[0].len(),
            vertices: pts.iter().map(|c| p(c)).collect(),
            simplices,
        }
    }

    #[test]
    fn good_square() {
        let t = tri(
            &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]],
            vec![vec![0, 1, 2], vec![1, 2, 3]],
        );
        let r = validate_triangulation(&t);
        assert!(r.is_valid(), "{r:?}");
        assert_eq!(r.proper_intersections, Some(true));
        assert_eq!(r.hull_volume, Rat::one());
    }

    #[test]
    fn overlapping_triangles_detected() {
        // both diagonals of the square: volume doubles, facets inconsistent,
        // simplices cross
        let t = tri(
            &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]],
            vec![vec![0, 1, 2], vec![1, 2, 3], vec![0, 1, 3], vec![0, 2, 3]],
        );
        let r = validate_triangulation(&t);
        assert!(!r.is_valid());
        assert_eq!(r.proper_intersections, Some(false));
        assert!(!r.volume_conserved);
    }

    #[test]
    fn crossing_pair_without_volume_defect() {
        // two triangles that overlap but do not cover the hull: volume fails
        // and the pairwise check reports the crossing
        let t = tri(
            &[&[0, 0], &[4, 0], &[0, 4], &[1, 1], &[5, 1], &[1, 5]],
            vec![vec![0, 1, 2], vec![3, 4, 5]],
        );
        let r = validate_triangulation(&t);
        assert_eq!(r.proper_intersections, Some(false));
    }

    #[test]
    fn missing_vertex_and_hole() {
        let t = tri(
            &[&[0, 0], &[2, 0], &[0, 2], &[2, 2], &[1, 1]],
            vec![vec![0, 1, 2], vec![1, 2, 3]],
        );
        let r = validate_triangulation(&t);
        assert!(!r.vertex_complete);
        let t = tri(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]], vec![vec![0, 1, 2]]);
        let r = validate_triangulation(&t);
        assert!(!r.volume_conserved);
        assert!(!r.facets_consistent);
    }

    #[test]
    fn vertex_inside_edge_is_not_face_to_face() {
        // (1,0) lies on edge 0-1 of the big triangle but is only a vertex of
        // the small ones
        let t = tri(&[&[0, 0], &[2, 0], &[1, 0], &[1, -1]], vec![vec![0, 1, 3]]);
        let r = validate_triangulation(&t);
        assert!(!r.vertex_complete);
        let t = tri(
            &[&[0, 0], &[2, 0], &[1, 2], &[1, 0], &[1, -2]],
            vec![vec![0, 1, 2], vec![0, 3, 4], vec![1, 3, 4]],
        );
        let r = validate_triangulation(&t);
        assert_eq!(r.proper_intersections, Some(false));
        assert!(!r.is_valid());
    }

    #[test]
    fn degenerate_and_malformed() {
        let t = tri(&[&[0, 0], &[1, 1], &[2, 2]], vec![vec![0, 1, 2]]);
        assert!(!validate_triangulation(&t).nondegenerate);
        let t = tri(&[&[0, 0], &[1, 0], &[0, 1]], vec![vec![0, 1]]);
        assert!(!validate_triangulation(&t).well_formed);
    }

    #[test]
    fn separator_test_agrees_with_circuit_search() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..15 {
            let pts: Vec<ChartPoint> = (0..9)
                .map(|_| {
                    p(&[
                        rng.gen_range(0..4),
                        rng.gen_range(0..4),
                        rng.gen_range(0..4),
                    ])
                })
                .collect();
            let mut simplices: Vec<Vec<usize>> = Vec::new();
            while simplices.len() < 12 {
                let mut s: Vec<usize> = (0..4).map(|_| rng.gen_range(0..9)).collect();
                s.sort_unstable();
                s.dedup();
                if s.len() == 4 {
                    simplices.push(s);
                }
            }
            let t = Triangulation {
                dim: 3,
                vertices: pts,
                simplices,
            };
            let ctx = Ctx {
                t: &t,
                rows: Rows::new(t.vertices.iter().map(|v| v.homogeneous()).collect()),
            };
            for a in &t.simplices {
                for b in &t.simplices {
                    if a == b || ctx.orient(a) == Sign::Zero || ctx.orient(b) == Sign::Zero {
                        continue;
                    }
                    let distinct = t.vertices.iter().collect::<HashSet<_>>().len() == 9;
                    if distinct {
                        assert_eq!(
                            ctx.intersect_properly(a, b),
                            !ctx.has_circuit(a, b),
                            "{a:?} {b:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn kernel_vector() {
        let cols = [[1, 0], [1, 2], [1, 1]].map(|c| c.map(BigInt::from));
        let refs: Vec<&[BigInt]> = cols.iter().map(|c| c.as_slice()).collect();
        let v = unique_kernel_vector(&refs).unwrap();
        // (0) + (2) = 2·(1)
        assert_eq!(v[0], v[1]);
        assert_eq!(v[2], -(&v[0] + &v[1]));
    }
}
