use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::UniPoly;

/// One of the two affine coordinates `(z1, z2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    Z1,
    Z2,
}

impl Var {
    pub fn other(self) -> Var {
        match self {
            Var::Z1 => Var::Z2,
            Var::Z2 => Var::Z1,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Var::Z1 => 0,
            Var::Z2 => 1,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Z1 => write!(f, "z1"),
            Var::Z2 => write!(f, "z2"),
        }
    }
}

/// Sparse bivariate polynomial: exponent pair `(i, j)` of `z1^i z2^j` mapped
/// to its coefficient. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct BiPoly {
    terms: BTreeMap<(u32, u32), Complex64>,
}

impl BiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = ((u32, u32), Complex64)>,
    {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    /// Convenience constructor from real coefficients.
    pub fn from_real(terms: &[((u32, u32), f64)]) -> Self {
        Self::from_terms(terms.iter().map(|&(e, c)| (e, Complex64::new(c, 0.0))))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::from_terms([((0, 0), c)])
    }

    /// The coordinate function `z1` or `z2`.
    pub fn var(v: Var) -> Self {
        let e = match v {
            Var::Z1 => (1, 0),
            Var::Z2 => (0, 1),
        };
        Self::from_terms([(e, Complex64::new(1.0, 0.0))])
    }

    pub fn add_term(&mut self, exps: (u32, u32), c: Complex64) {
        let entry = self.terms.entry(exps).or_default();
        *entry += c;
        if *entry == Complex64::new(0.0, 0.0) {
            self.terms.remove(&exps);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), Complex64)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    pub fn coeff(&self, exps: (u32, u32)) -> Complex64 {
        self.terms.get(&exps).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|&(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms
            .keys()
            .map(|&(i, j)| if v == Var::Z1 { i } else { j })
            .max()
            .unwrap_or(0)
    }

    /// Terms of exactly the given total degree.
    pub fn homogeneous_part(&self, degree: u32) -> BiPoly {
        Self::from_terms(self.terms().filter(|&((i, j), _)| i + j == degree))
    }

    pub fn eval(&self, z: [Complex64; 2]) -> Complex64 {
        // exponents stay small (≤ 5 for every catalog map), so powi is fine
        self.terms
            .iter()
            .map(|(&(i, j), &c)| c * z[0].powi(i as i32) * z[1].powi(j as i32))
            .sum()
    }

    pub fn eval_real(&self, x: [f64; 2]) -> f64 {
        self.eval([Complex64::new(x[0], 0.0), Complex64::new(x[1], 0.0)])
            .re
    }

    pub fn partial(&self, v: Var) -> BiPoly {
        Self::from_terms(self.terms().filter_map(|((i, j), c)| match v {
            Var::Z1 if i > 0 => Some(((i - 1, j), c * i as f64)),
            Var::Z2 if j > 0 => Some(((i, j - 1), c * j as f64)),
            _ => None,
        }))
    }

    pub fn scale(&self, s: Complex64) -> BiPoly {
        Self::from_terms(self.terms().map(|(e, c)| (e, c * s)))
    }

    /// Substitute a value for one variable, leaving a polynomial in the other.
    pub fn substitute(&self, v: Var, value: Complex64) -> UniPoly {
        let rest = v.other();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.degree_in(rest) as usize + 1];
        for ((i, j), c) in self.terms() {
            let (fixed, free) = if v == Var::Z1 { (i, j) } else { (j, i) };
            coeffs[free as usize] += c * value.powi(fixed as i32);
        }
        UniPoly::new(coeffs)
    }

    /// View the polynomial as `Σ_k a_k(w) v^k`, returning `[a_0, a_1, ...]`
    /// where each `a_k` is a polynomial in the remaining variable `w`.
    pub fn coefficients_in(&self, v: Var) -> Vec<UniPoly> {
        let deg_v = self.degree_in(v) as usize;
        let deg_w = self.degree_in(v.other()) as usize;
        let mut dense = vec![vec![Complex64::new(0.0, 0.0); deg_w + 1]; deg_v + 1];
        for ((i, j), c) in self.terms() {
            let (kv, kw) = if v == Var::Z1 { (i, j) } else { (j, i) };
            dense[kv as usize][kw as usize] += c;
        }
        dense.into_iter().map(UniPoly::new).collect()
    }

    /// Lift a univariate polynomial into the given variable.
    pub fn from_uni(p: &UniPoly, v: Var) -> BiPoly {
        Self::from_terms(p.coeffs().iter().enumerate().map(|(k, &c)| {
            let k = k as u32;
            (if v == Var::Z1 { (k, 0) } else { (0, k) }, c)
        }))
    }

    /// Largest coefficient difference between two polynomials.
    pub fn max_coeff_diff(&self, other: &BiPoly) -> f64 {
        (self - other)
            .terms()
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(&(i, j), c)| {
                let coeff = if c.im == 0.0 {
                    format!("{}", c.re)
                } else {
                    format!("({c})")
                };
                let mut s = coeff;
                if i > 0 {
                    s.push_str(&if i == 1 {
                        "*z1".to_string()
                    } else {
                        format!("*z1^{i}")
                    });
                }
                if j > 0 {
                    s.push_str(&if j == 1 {
                        "*z2".to_string()
                    } else {
                        format!("*z2^{j}")
                    });
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Add for &BiPoly {
    type Output = BiPoly;

    fn add(self, rhs: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e, c);
        }
        out
    }
}

impl Neg for &BiPoly {
    type Output = BiPoly;

    fn neg(self) -> BiPoly {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Sub for &BiPoly {
    type Output = BiPoly;

    fn sub(self, rhs: &BiPoly) -> BiPoly {
        self + &(-rhs)
    }
}

impl Mul for &BiPoly {
    type Output = BiPoly;

    fn mul(self, rhs: &BiPoly) -> BiPoly {
        let mut out = BiPoly::zero();
        for ((i1, j1), a) in self.terms() {
            for ((i2, j2), b) in rhs.terms() {
                out.add_term((i1 + i2, j1 + j2), a * b);
            }
        }
        out
    }
}
