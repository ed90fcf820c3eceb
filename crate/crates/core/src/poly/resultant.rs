use std::f64::consts::PI;

use num_complex::Complex64;

use super::{BiPoly, PolyError, UniPoly, Var};

/// Relative size below which an interpolated coefficient counts as noise.
const COEFF_NOISE: f64 = 1e-11;
/// Relative size (against the Hadamard bound) below which a sampled
/// determinant counts as zero.
const DET_NOISE: f64 = 1e-12;

/// Resultant of `p` and `q` with respect to `eliminate`, as a polynomial in
/// the other variable.
///
/// The Sylvester determinant is sampled at `N + 1` roots of unity, with `N`
/// an upper bound on the resultant degree, and the coefficients recovered by
/// an inverse discrete Fourier transform.
pub fn sylvester_resultant(p: &BiPoly, q: &BiPoly, eliminate: Var) -> Result<UniPoly, PolyError> {
    let a = p.coefficients_in(eliminate);
    let b = q.coefficients_in(eliminate);
    let dp = a.len() - 1;
    let dq = b.len() - 1;
    if dp == 0 && dq == 0 {
        return Err(PolyError::InvalidDegree { degree: 0 });
    }
    let deg_a = a.iter().map(UniPoly::degree).max().unwrap_or(0);
    let deg_b = b.iter().map(UniPoly::degree).max().unwrap_or(0);
    let bound = dq * deg_a + dp * deg_b;
    let nodes = bound + 1;

    let mut samples = Vec::with_capacity(nodes);
    let mut all_negligible = true;
    for j in 0..nodes {
        let t = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / nodes as f64);
        let av: Vec<Complex64> = a.iter().map(|c| c.eval(t)).collect();
        let bv: Vec<Complex64> = b.iter().map(|c| c.eval(t)).collect();
        let m = sylvester_matrix(&av, &bv);
        let hadamard: f64 = m
            .iter()
            .map(|row| row.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt())
            .product();
        let det = determinant(m);
        if det.norm() > DET_NOISE * hadamard {
            all_negligible = false;
        }
        samples.push((t, det));
    }
    if all_negligible {
        return Err(PolyError::DegenerateSystem);
    }

    let coeffs: Vec<Complex64> = (0..nodes)
        .map(|k| {
            samples
                .iter()
                .map(|&(t, r)| r * t.powi(-(k as i32)))
                .sum::<Complex64>()
                / nodes as f64
        })
        .collect();
    Ok(UniPoly::new(coeffs).trimmed(COEFF_NOISE))
}

/// Sylvester matrix of two univariate coefficient vectors (ascending order).
fn sylvester_matrix(a: &[Complex64], b: &[Complex64]) -> Vec<Vec<Complex64>> {
    let dp = a.len() - 1;
    let dq = b.len() - 1;
    let n = dp + dq;
    let mut m = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..dq {
        for (k, &c) in a.iter().rev().enumerate() {
            m[i][i + k] = c;
        }
    }
    for i in 0..dp {
        for (k, &c) in b.iter().rev().enumerate() {
            m[dq + i][i + k] = c;
        }
    }
    m
}

/// Determinant by Gaussian elimination with partial pivoting.
pub(crate) fn determinant(mut m: Vec<Vec<Complex64>>) -> Complex64 {
    let n = m.len();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))
            .unwrap();
        if m[pivot][col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let d = m[col][col];
        det *= d;
        for row in (col + 1)..n {
            let factor = m[row][col] / d;
            if factor.norm() == 0.0 {
                continue;
            }
            let (top, bottom) = m.split_at_mut(row);
            for (dst, &src) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *dst -= factor * src;
            }
        }
    }
    det
}
