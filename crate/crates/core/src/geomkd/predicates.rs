//! Exact determinants on homogeneous integer coordinates.
//!
//! A chart point `(x₁, …, x_d)` is stored as a primitive integer vector
//! `(w, w·x₁, …, w·x_d)` with `w > 0`. The affine orientation of `d + 1`
//! points has the sign of the determinant of their homogeneous rows, since
//! each row is a positive multiple of `(1, x)`.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(v: &BigInt) -> Sign {
        if v.is_zero() {
            Sign::Zero
        } else if v.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    fn of_i128(v: i128) -> Sign {
        match v.signum() {
            0 => Sign::Zero,
            1 => Sign::Positive,
            _ => Sign::Negative,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn negate(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

/// Fraction-free Gaussian elimination in `i128`; `None` on overflow.
fn bareiss_i128(mut m: Vec<Vec<i128>>) -> Option<i128> {
    let n = m.len();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            let Some(swap) = (k + 1..n).find(|&r| m[r][k] != 0) else {
                return Some(0);
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[i][j]
                    .checked_mul(m[k][k])?
                    .checked_sub(m[i][k].checked_mul(m[k][j])?)?;
                m[i][j] = v / prev;
            }
        }
        prev = m[k][k];
    }
    m[n - 1][n - 1].checked_mul(sign)
}

fn bareiss_big(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut negate = false;
    let mut prev = BigInt::from(1);
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

/// Stack-allocated checked Bareiss for matrices up to 5×5.
fn small_det_sign(rows: &[&[i128]]) -> Option<Sign> {
    let n = rows.len();
    let mut m = [[0i128; 5]; 5];
    for (i, r) in rows.iter().enumerate() {
        m[i][..n].copy_from_slice(&r[..n]);
    }
    let mut neg = false;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            let Some(swap) = (k + 1..n).find(|&r| m[r][k] != 0) else {
                return Some(Sign::Zero);
            };
            m.swap(k, swap);
            neg = !neg;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[i][j]
                    .checked_mul(m[k][k])?
                    .checked_sub(m[i][k].checked_mul(m[k][j])?)?;
                m[i][j] = v / prev;
            }
        }
        prev = m[k][k];
    }
    let s = Sign::of_i128(m[n - 1][n - 1]);
    Some(if neg { s.negate() } else { s })
}

/// Orientation tests on a fixed list of homogeneous rows, using machine
/// integers when every entry fits in `i64`.
pub(crate) struct Rows<'a> {
    big: Vec<&'a [BigInt]>,
    small: Option<Vec<Vec<i128>>>,
}

impl<'a> Rows<'a> {
    pub(crate) fn new(big: Vec<&'a [BigInt]>) -> Self {
        let small = big
            .iter()
            .map(|r| r.iter().map(|v| v.to_i64().map(i128::from)).collect())
            .collect();
        Rows { big, small }
    }

    /// Sign of the determinant of rows `idx` restricted to the homogeneous
    /// coordinate and the chart coordinates `cols` (all when `None`).
    pub(crate) fn orient(&self, idx: &[usize], cols: Option<&[usize]>) -> Sign {
        let n = idx.len();
        let width = cols.map_or(self.big.first().map_or(0, |r| r.len()), |c| c.len() + 1);
        debug_assert_eq!(n, width);
        if n == 0 {
            return Sign::Positive;
        }
        if let (Some(small), true) = (&self.small, n <= 5) {
            let mut buf = [[0i128; 5]; 5];
            for (i, &p) in idx.iter().enumerate() {
                match cols {
                    None => buf[i][..n].copy_from_slice(&small[p][..n]),
                    Some(c) => {
                        buf[i][0] = small[p][0];
                        for (j, &cj) in c.iter().enumerate() {
                            buf[i][j + 1] = small[p][cj + 1];
                        }
                    }
                }
            }
            let rows: [&[i128]; 5] = [&buf[0], &buf[1], &buf[2], &buf[3], &buf[4]];
            if let Some(s) = small_det_sign(&rows[..n]) {
                return s;
            }
        }
        let rows: Vec<Vec<BigInt>> = idx
            .iter()
            .map(|&p| match cols {
                None => self.big[p].to_vec(),
                Some(c) => std::iter::once(self.big[p][0].clone())
                    .chain(c.iter().map(|&j| self.big[p][j + 1].clone()))
                    .collect(),
            })
            .collect();
        let refs: Vec<&[BigInt]> = rows.iter().map(|r| r.as_slice()).collect();
        det_sign(&refs)
    }
}

/// Determinant of a square integer matrix.
pub fn det(rows: &[&[BigInt]]) -> BigInt {
    let n = rows.len();
    debug_assert!(rows.iter().all(|r| r.len() == n));
    if n == 0 {
        return BigInt::from(1);
    }
    let small: Option<Vec<Vec<i128>>> = rows
        .iter()
        .map(|r| r.iter().map(|v| v.to_i128()).collect())
        .collect();
    if let Some(d) = small.and_then(bareiss_i128) {
        return BigInt::from(d);
    }
    bareiss_big(rows.iter().map(|r| r.to_vec()).collect())
}

/// Sign of the determinant, using machine integers when they suffice.
pub fn det_sign(rows: &[&[BigInt]]) -> Sign {
    let n = rows.len();
    if n == 0 {
        return Sign::Positive;
    }
    let small: Option<Vec<Vec<i128>>> = rows
        .iter()
        .map(|r| r.iter().map(|v| v.to_i128()).collect())
        .collect();
    if let Some(d) = small.and_then(bareiss_i128) {
        return Sign::of_i128(d);
    }
    Sign::of(&bareiss_big(rows.iter().map(|r| r.to_vec()).collect()))
}

/// Rank of an integer matrix (rows need not be square).
#[allow(clippy::needless_range_loop)]
pub fn rank(rows: &[&[BigInt]]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| r.to_vec()).collect();
    let nrows = m.len();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..ncols {
        let Some(piv) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, piv);
        for i in r + 1..nrows {
            if m[i][c].is_zero() {
                continue;
            }
            let (a, b) = (m[r][c].clone(), m[i][c].clone());
            for j in c..ncols {
                let v = &m[i][j] * &a - &m[r][j] * &b;
                m[i][j] = v;
            }
        }
        r += 1;
        if r == nrows {
            break;
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(v: &[&[i64]]) -> Vec<Vec<BigInt>> {
        v.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    fn refs(m: &[Vec<BigInt>]) -> Vec<&[BigInt]> {
        m.iter().map(|r| r.as_slice()).collect()
    }

    #[test]
    fn small_determinants() {
        let m = mat(&[&[2, 0, 0], &[0, 3, 0], &[0, 0, 4]]);
        assert_eq!(det(&refs(&m)), BigInt::from(24));
        let m = mat(&[&[0, 1], &[1, 0]]);
        assert_eq!(det(&refs(&m)), BigInt::from(-1));
        let m = mat(&[&[1, 2], &[2, 4]]);
        assert_eq!(det_sign(&refs(&m)), Sign::Zero);
    }

    #[test]
    fn overflow_falls_back_to_bigint() {
        let big = i64::MAX;
        let m = mat(&[&[big, 1, 0], &[1, big, 1], &[0, 1, big]]);
        let b = BigInt::from(big);
        let expected = &b * &b * &b - &b - &b;
        assert_eq!(det(&refs(&m)), expected);
        assert_eq!(det_sign(&refs(&m)), Sign::Positive);
    }

    #[test]
    fn ranks() {
        let m = mat(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&refs(&m)), 2);
        let m = mat(&[&[0, 0], &[0, 0]]);
        assert_eq!(rank(&refs(&m)), 0);
        let m = mat(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 0, 1]]);
        assert_eq!(rank(&refs(&m)), 3);
    }
}
