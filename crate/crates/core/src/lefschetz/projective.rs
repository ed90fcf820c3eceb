use std::collections::BTreeMap;
use std::ops::{Add, Sub};

use num_complex::Complex64;

use super::LefschetzError;
use crate::poly::{aberth_roots, BiPoly, UniPoly, DEFAULT_MAX_ITER, DEFAULT_ROOT_TOL};

/// Homogeneous polynomial in `(Z0, Z1, Z2)`; exponents are stored as
/// `[a, b, c]` for `Z0^a Z1^b Z2^c` with `a + b + c = degree`.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousForm {
    degree: u32,
    terms: BTreeMap<[u32; 3], Complex64>,
}

impl HomogeneousForm {
    pub fn zero(degree: u32) -> Self {
        Self {
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// `c · Z0^a Z1^b Z2^c`.
    pub fn monomial(exps: [u32; 3], coeff: Complex64) -> Self {
        let mut f = Self::zero(exps.iter().sum());
        f.add_term(exps, coeff);
        f
    }

    /// Homogenize `p` to the given degree (`≥ total_degree(p)`).
    pub fn homogenize(p: &BiPoly, degree: u32) -> Self {
        assert!(
            p.total_degree() <= degree,
            "cannot homogenize below the total degree"
        );
        let mut f = Self::zero(degree);
        for ((i, j), c) in p.terms() {
            f.add_term([degree - i - j, i, j], c);
        }
        f
    }

    fn add_term(&mut self, exps: [u32; 3], c: Complex64) {
        debug_assert_eq!(exps.iter().sum::<u32>(), self.degree);
        let e = self.terms.entry(exps).or_default();
        *e += c;
        if *e == Complex64::new(0.0, 0.0) {
            self.terms.remove(&exps);
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = ([u32; 3], Complex64)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Multiply by `Z0^k`.
    pub fn times_z0_pow(&self, k: u32) -> Self {
        let mut f = Self::zero(self.degree + k);
        for ([a, b, c], v) in self.terms() {
            f.add_term([a + k, b, c], v);
        }
        f
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut f = Self::zero(self.degree);
        for (e, v) in self.terms() {
            f.add_term(e, v * s);
        }
        f
    }

    pub fn eval(&self, z: [Complex64; 3]) -> Complex64 {
        self.terms()
            .map(|([a, b, c], v)| {
                v * z[0].powi(a as i32) * z[1].powi(b as i32) * z[2].powi(c as i32)
            })
            .sum()
    }

    /// Restriction to the affine chart `Z0 = 1`.
    pub fn dehomogenize(&self) -> BiPoly {
        BiPoly::from_terms(self.terms().map(|([_, b, c], v)| ((b, c), v)))
    }

    /// Restriction to the line at infinity `Z0 = 0`, as a binary form in
    /// `(Z1, Z2)`.
    pub fn at_infinity(&self) -> BinaryForm {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.degree as usize + 1];
        for ([a, _, c], v) in self.terms() {
            if a == 0 {
                coeffs[c as usize] += v;
            }
        }
        BinaryForm::new(self.degree, coeffs)
    }
}

impl Add for &HomogeneousForm {
    type Output = HomogeneousForm;

    fn add(self, rhs: &HomogeneousForm) -> HomogeneousForm {
        assert_eq!(self.degree, rhs.degree);
        let mut f = self.clone();
        for (e, v) in rhs.terms() {
            f.add_term(e, v);
        }
        f
    }
}

impl Sub for &HomogeneousForm {
    type Output = HomogeneousForm;

    fn sub(self, rhs: &HomogeneousForm) -> HomogeneousForm {
        self + &rhs.scale(Complex64::new(-1.0, 0.0))
    }
}

/// Binary form `Σ_j a_j X^{d−j} Y^j` of degree `d` on the projective line.
#[derive(Clone, Debug, PartialEq)]
pub struct BinaryForm {
    degree: u32,
    coeffs: Vec<Complex64>,
}

impl BinaryForm {
    pub fn new(degree: u32, mut coeffs: Vec<Complex64>) -> Self {
        coeffs.resize(degree as usize + 1, Complex64::new(0.0, 0.0));
        Self { degree, coeffs }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == Complex64::new(0.0, 0.0))
    }

    pub fn eval(&self, p: [Complex64; 2]) -> Complex64 {
        let d = self.degree as i32;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, &a)| a * p[0].powi(d - j as i32) * p[1].powi(j as i32))
            .sum()
    }

    /// Dehomogenized in the chart `X = 1`: a polynomial in `u = Y/X`.
    pub fn chart_y(&self) -> UniPoly {
        UniPoly::new(self.coeffs.clone())
    }

    /// Dehomogenized in the chart `Y = 1`: a polynomial in `v = X/Y`.
    pub fn chart_x(&self) -> UniPoly {
        UniPoly::new(self.coeffs.iter().rev().copied().collect())
    }

    /// `self · X`, `self · Y` and differences thereof.
    fn times_x(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.push(Complex64::new(0.0, 0.0));
        Self::new(self.degree + 1, c)
    }

    fn times_y(&self) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0)];
        c.extend_from_slice(&self.coeffs);
        Self::new(self.degree + 1, c)
    }

    fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree);
        Self::new(
            self.degree,
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    /// Projective zeros, each listed once per multiplicity, normalized so
    /// the larger coordinate is 1. A nonzero form of degree `d` has `d` zeros.
    pub fn zeros(&self) -> Result<Vec<[Complex64; 2]>, LefschetzError> {
        let affine = self.chart_y();
        if affine.is_zero() {
            return Ok(Vec::new());
        }
        let mut out: Vec<[Complex64; 2]> = Vec::new();
        // a factor Y^k gives exact zeros at (1 : 0)
        let k = self
            .coeffs
            .iter()
            .take_while(|c| **c == Complex64::new(0.0, 0.0))
            .count();
        for _ in 0..k {
            out.push([Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        }
        let affine = UniPoly::new(affine.coeffs()[k..].to_vec());
        if affine.degree() > 0 {
            let clusters = aberth_roots(&affine, DEFAULT_ROOT_TOL, DEFAULT_MAX_ITER)?;
            for cl in clusters {
                for _ in 0..cl.multiplicity_estimate {
                    out.push(normalize_pair([Complex64::new(1.0, 0.0), cl.value]));
                }
            }
        }
        // degree drop in the Y/X chart: zeros at X = 0
        for _ in affine.degree() + k..self.degree as usize {
            out.push([Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
        }
        Ok(out)
    }
}

/// Scale a projective pair so that its larger-modulus coordinate is 1.
pub fn normalize_pair(p: [Complex64; 2]) -> [Complex64; 2] {
    let s = if p[0].norm() >= p[1].norm() {
        p[0]
    } else {
        p[1]
    };
    [p[0] / s, p[1] / s]
}

/// Scale a projective triple so that its largest-modulus coordinate is 1.
pub fn normalize_triple(p: [Complex64; 3]) -> [Complex64; 3] {
    let s = *p
        .iter()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("three coordinates");
    [p[0] / s, p[1] / s, p[2] / s]
}

/// Affine chart in which a multiplier was evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chart {
    /// `u = Y/X`
    U,
    /// `v = X/Y`
    V,
}

/// Fixed point of a holomorphic self-map of the Riemann sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphereFixedPoint {
    /// Projective coordinates, larger coordinate normalized to 1.
    pub point: [Complex64; 2],
    pub multiplier: Complex64,
    /// `1 / (1 − multiplier)`.
    pub index: Complex64,
    pub chart: Chart,
    /// `|g(w*) − w*|` in the chosen chart.
    pub chart_residual: f64,
}

/// Holomorphic self-map `(X : Y) ↦ (A(X,Y) : B(X,Y))` of the Riemann sphere.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereMap {
    pub a: BinaryForm,
    pub b: BinaryForm,
}

/// `|1 − λ|` below which a fixed point counts as non-transversal.
pub const MULTIPLIER_GUARD: f64 = 1e-10;

impl SphereMap {
    pub fn new(a: BinaryForm, b: BinaryForm) -> Self {
        assert_eq!(a.degree(), b.degree());
        Self { a, b }
    }

    /// The polynomial map `u ↦ g(u)` in the chart `u = Y/X`, extended to the
    /// sphere as `(X : Y) ↦ (X^m : X^m g(Y/X))`.
    pub fn from_polynomial(g: &UniPoly) -> Self {
        let m = g.degree() as u32;
        let mut a = vec![Complex64::new(0.0, 0.0); m as usize + 1];
        a[0] = Complex64::new(1.0, 0.0);
        Self::new(
            BinaryForm::new(m, a),
            BinaryForm::new(m, g.coeffs().to_vec()),
        )
    }

    pub fn degree(&self) -> u32 {
        self.a.degree()
    }

    /// `A·Y − B·X`, whose zeros are the fixed points.
    pub fn fixed_point_form(&self) -> BinaryForm {
        self.a.times_y().sub(&self.b.times_x())
    }

    /// Multiplier at a fixed point, in the chart where the map's denominator
    /// is larger.
    pub fn multiplier_at(&self, p: [Complex64; 2]) -> (Complex64, Chart, f64) {
        let (av, bv) = (self.a.eval(p), self.b.eval(p));
        if av.norm() >= bv.norm() && p[0].norm() > 0.0 {
            let u = p[1] / p[0];
            let (den, dden) = self.a.chart_y().eval_with_derivative(u);
            let (num, dnum) = self.b.chart_y().eval_with_derivative(u);
            let lambda = (dnum * den - num * dden) / (den * den);
            (lambda, Chart::U, (num / den - u).norm())
        } else {
            let v = p[0] / p[1];
            let (den, dden) = self.b.chart_x().eval_with_derivative(v);
            let (num, dnum) = self.a.chart_x().eval_with_derivative(v);
            let lambda = (dnum * den - num * dden) / (den * den);
            (lambda, Chart::V, (num / den - v).norm())
        }
    }

    /// All `m + 1` fixed points with multipliers and indices.
    pub fn fixed_points(&self) -> Result<Vec<SphereFixedPoint>, LefschetzError> {
        let form = self.fixed_point_form();
        if form.is_zero() {
            return Err(LefschetzError::IdentityMap);
        }
        let zeros = form.zeros()?;
        let mut out: Vec<SphereFixedPoint> = Vec::with_capacity(zeros.len());
        for p in zeros {
            let (multiplier, chart, chart_residual) = self.multiplier_at(p);
            if (Complex64::new(1.0, 0.0) - multiplier).norm() < MULTIPLIER_GUARD
                || out.iter().any(|q| pair_close(q.point, p))
            {
                return Err(LefschetzError::DegenerateMultiplier {
                    point: p,
                    lambda: multiplier,
                });
            }
            out.push(SphereFixedPoint {
                point: p,
                multiplier,
                index: (Complex64::new(1.0, 0.0) - multiplier).inv(),
                chart,
                chart_residual,
            });
        }
        Ok(out)
    }
}

fn pair_close(a: [Complex64; 2], b: [Complex64; 2]) -> bool {
    (a[0] - b[0]).norm().max((a[1] - b[1]).norm()) <= 1e-9
}
