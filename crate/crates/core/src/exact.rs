//! Exact rational scalars and the small dense linear algebra the polyhedral
//! engine is built on.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;
pub type QVec = Vec<Rat>;

pub fn int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Exact conversion of a finite float. Non-finite input maps to zero; callers
/// validate finiteness at the API boundary.
pub fn from_f64(x: f64) -> Rat {
    Rat::from_float(x).unwrap_or_else(Rat::zero)
}

pub fn to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn vec_from_f64(xs: &[f64]) -> QVec {
    xs.iter().copied().map(from_f64).collect()
}

pub fn vec_to_f64(xs: &[Rat]) -> Vec<f64> {
    xs.iter().map(to_f64).collect()
}

pub fn zeros(n: usize) -> QVec {
    vec![Rat::zero(); n]
}

pub fn unit(n: usize, i: usize) -> QVec {
    let mut e = zeros(n);
    e[i] = Rat::one();
    e
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

pub fn add(a: &[Rat], b: &[Rat]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Rat], b: &[Rat]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(c: &Rat, a: &[Rat]) -> QVec {
    a.iter().map(|x| c * x).collect()
}

pub fn neg(a: &[Rat]) -> QVec {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero_vec(a: &[Rat]) -> bool {
    a.iter().all(Zero::is_zero)
}

/// Scales a nonzero vector by a positive factor so that its largest absolute
/// entry is one. Zero vectors are returned unchanged.
pub fn normalize_direction(a: &[Rat]) -> QVec {
    let m = a
        .iter()
        .map(|x| x.abs())
        .max()
        .unwrap_or_else(Rat::zero);
    if m.is_zero() {
        return a.to_vec();
    }
    a.iter().map(|x| x / &m).collect()
}

/// Reduced row echelon form; returns the nonzero rows and their pivot columns.
pub fn rref(rows: &[QVec], ncols: usize) -> (Vec<QVec>, Vec<usize>) {
    let mut m: Vec<QVec> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rat::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..m[i].len() {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[QVec], ncols: usize) -> usize {
    rref(rows, ncols).1.len()
}

/// Basis of {z : row . z = 0 for every row}.
pub fn nullspace(rows: &[QVec], ncols: usize) -> Vec<QVec> {
    let (r, pivots) = rref(rows, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = zeros(ncols);
            v[f] = Rat::one();
            for (row, &p) in r.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Solves `a z = b` when the solution is unique; `None` when inconsistent or
/// underdetermined.
pub fn solve_unique(a: &[QVec], b: &[Rat], ncols: usize) -> Option<QVec> {
    let aug: Vec<QVec> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (r, pivots) = rref(&aug, ncols + 1);
    if pivots.contains(&ncols) || pivots.len() != ncols {
        return None;
    }
    Some(r.iter().map(|row| row[ncols].clone()).collect())
}

/// Particular solution and nullspace of `a z = b`, or `None` when inconsistent.
pub fn solve_affine(a: &[QVec], b: &[Rat], ncols: usize) -> Option<(QVec, Vec<QVec>)> {
    let aug: Vec<QVec> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (r, pivots) = rref(&aug, ncols + 1);
    if pivots.contains(&ncols) {
        return None;
    }
    let mut x = zeros(ncols);
    for (row, &p) in r.iter().zip(&pivots) {
        x[p] = row[ncols].clone();
    }
    Some((x, nullspace(a, ncols)))
}

/// Orthogonal projection of `v` onto the complement of span(`basis`).
pub fn project_out(v: &[Rat], basis: &[QVec]) -> QVec {
    let ortho = gram_schmidt(basis);
    let mut out = v.to_vec();
    for q in &ortho {
        let c = dot(&out, q) / dot(q, q);
        out = sub(&out, &scale(&c, q));
    }
    out
}

pub fn gram_schmidt(basis: &[QVec]) -> Vec<QVec> {
    let mut out: Vec<QVec> = Vec::new();
    for b in basis {
        let mut v = b.clone();
        for q in &out {
            let c = dot(&v, q) / dot(q, q);
            v = sub(&v, &scale(&c, q));
        }
        if !is_zero_vec(&v) {
            out.push(v);
        }
    }
    out
}

/// Canonical basis of a linear span: the RREF rows.
pub fn canonical_span(vectors: &[QVec], dim: usize) -> Vec<QVec> {
    rref(vectors, dim).0
}

pub fn cmp_vec(a: &[Rat], b: &[Rat]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Matrix given row-major.
pub fn mat_vec(m: &[QVec], v: &[Rat]) -> QVec {
    m.iter().map(|row| dot(row, v)).collect()
}

pub fn transpose(m: &[QVec], ncols: usize) -> Vec<QVec> {
    (0..ncols)
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn invert(m: &[QVec]) -> Option<Vec<QVec>> {
    let n = m.len();
    let aug: Vec<QVec> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend(unit(n, i));
            r
        })
        .collect();
    let (r, pivots) = rref(&aug, 2 * n);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(r.iter().map(|row| row[n..].to_vec()).collect())
}

pub fn fmt_rat(x: &Rat) -> String {
    if x.is_integer() {
        x.to_integer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `3`, `-1/2`, or a decimal literal such as `0.25` exactly.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rat::new(n, d));
    }
    if let Ok(i) = s.parse::<BigInt>() {
        return Some(Rat::from_integer(i));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(k) => (&s[..k], s[k + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
    if ip.is_empty() && fp.is_empty() {
        return None;
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{ip}{fp}0").parse().ok()?;
    let scale_pow = fp.len() as i32 + 1 - exp;
    let ten = BigInt::from(10);
    let mut v = if scale_pow >= 0 {
        Rat::new(digits, num_traits::pow(ten, scale_pow as usize))
    } else {
        Rat::from_integer(digits * num_traits::pow(ten, (-scale_pow) as usize))
    };
    if neg {
        v = -v;
    }
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rational_literals() {
        assert_eq!(parse_rat("-1/2"), Some(ratio(-1, 2)));
        assert_eq!(parse_rat("0.25"), Some(ratio(1, 4)));
        assert_eq!(parse_rat("3"), Some(int(3)));
        assert_eq!(parse_rat("1e-2"), Some(ratio(1, 100)));
        assert_eq!(parse_rat("-2.5E1"), Some(int(-25)));
        assert_eq!(parse_rat("1/0"), None);
        assert_eq!(parse_rat("abc"), None);
    }

    #[test]
    fn nullspace_of_rank_one_row() {
        let ns = nullspace(&[vec![int(1), int(1), int(0)]], 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(dot(v, &[int(1), int(1), int(0)]).is_zero());
        }
    }

    #[test]
    fn unique_solve_and_inverse() {
        let a = vec![vec![int(2), int(1)], vec![int(1), int(3)]];
        let x = solve_unique(&a, &[int(3), int(4)], 2).unwrap();
        assert_eq!(x, vec![int(1), int(1)]);
        let inv = invert(&a).unwrap();
        assert_eq!(mat_vec(&inv, &[int(3), int(4)]), x);
        assert!(solve_unique(&[vec![int(1), int(1)]], &[int(1)], 2).is_none());
    }

    #[test]
    fn projection_removes_span_component() {
        let p = project_out(&[int(1), int(2)], &[vec![int(1), int(1)]]);
        assert!(dot(&p, &[int(1), int(1)]).is_zero());
    }
}
