//! Fixed-point form of the lens equation and its holomorphic Lefschetz
//! decomposition on the projective plane.
//!
//! Images are the fixed points of `f(z) = z − η(z) + ζ`. Homogenizing `f` to
//! a degree-`m` self-map `F` of ℂℙ² splits its fixed points into the affine
//! ones (the images, with index `1/det(I − D_f) = μ`) and those on the line at
//! infinity, where `F` induces a degree-`m` map of the Riemann sphere. The
//! indices over both parts add up to the holomorphic Lefschetz number 1.

mod projective;

pub use projective::{
    normalize_pair, normalize_triple, BinaryForm, Chart, HomogeneousForm, SphereFixedPoint,
    SphereMap, MULTIPLIER_GUARD,
};

use num_complex::Complex64;

use crate::catalog::{CatastropheModel, ModelId};
use crate::imaging::{solve_images, ImagingError, SolutionSet, SolveOptions};
use crate::poly::{BiPoly, PolyError, UniPoly, Var};

/// The holomorphic Lefschetz number of ℂℙ^k.
pub const LEFSCHETZ_NUMBER: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LefschetzError {
    #[error("{model} has unequal component degrees; F has indeterminacy points at infinity")]
    UnequalDegrees {
        model: ModelId,
        indeterminacy: Vec<[Complex64; 3]>,
    },
    #[error("homogenized map is undefined at {} point(s) at infinity", .0.len())]
    Indeterminate(Vec<[Complex64; 3]>),
    #[error("non-transversal fixed point at {point:?} (multiplier {lambda})")]
    DegenerateMultiplier {
        point: [Complex64; 2],
        lambda: Complex64,
    },
    #[error("identity map has no isolated fixed points")]
    IdentityMap,
    #[error("map degree {degree} is below 2")]
    DegreeTooLow { degree: usize },
    #[error("affine index sum {affine} disagrees with magnification sum {magnification}")]
    IdentityMismatch {
        affine: Complex64,
        magnification: Complex64,
    },
    #[error(transparent)]
    Imaging(#[from] ImagingError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// `f(z) = z − η(z) + ζ`.
#[derive(Clone, Debug, PartialEq)]
pub struct FixedPointMap {
    pub model_id: ModelId,
    pub f: [BiPoly; 2],
    pub zeta: [Complex64; 2],
    /// The components of `η` the map was built from.
    pub eta: [BiPoly; 2],
    pub m: u32,
    df: [[BiPoly; 2]; 2],
}

/// Fixed-point map with `ζ = y`.
pub fn fixed_point_map(model: &CatastropheModel) -> FixedPointMap {
    let y = model.source();
    FixedPointMap::with_zeta(
        model,
        [Complex64::new(y[0], 0.0), Complex64::new(y[1], 0.0)],
    )
}

impl FixedPointMap {
    /// Fixed-point map with an arbitrary (possibly complex) `ζ`.
    pub fn with_zeta(model: &CatastropheModel, zeta: [Complex64; 2]) -> Self {
        let build =
            |k: usize, v: Var| &(&BiPoly::var(v) - &model.eta[k]) + &BiPoly::constant(zeta[k]);
        let f = [build(0, Var::Z1), build(1, Var::Z2)];
        let df = [
            [f[0].partial(Var::Z1), f[0].partial(Var::Z2)],
            [f[1].partial(Var::Z1), f[1].partial(Var::Z2)],
        ];
        Self {
            model_id: model.id,
            f,
            zeta,
            eta: model.eta.clone(),
            m: model.m,
            df,
        }
    }

    pub fn eval(&self, z: [Complex64; 2]) -> [Complex64; 2] {
        [self.f[0].eval(z), self.f[1].eval(z)]
    }

    /// `max_k |f_k(z) − z_k|`.
    pub fn displacement(&self, z: [Complex64; 2]) -> f64 {
        let w = self.eval(z);
        (w[0] - z[0]).norm().max((w[1] - z[1]).norm())
    }

    pub fn derivative(&self, z: [Complex64; 2]) -> [[Complex64; 2]; 2] {
        [
            [self.df[0][0].eval(z), self.df[0][1].eval(z)],
            [self.df[1][0].eval(z), self.df[1][1].eval(z)],
        ]
    }

    /// `det(I₂ − D_f)` at `z`.
    pub fn det_i_minus_df(&self, z: [Complex64; 2]) -> Complex64 {
        let d = self.derivative(z);
        let one = Complex64::new(1.0, 0.0);
        (one - d[0][0]) * (one - d[1][1]) - d[0][1] * d[1][0]
    }

    /// `det(I₂ − D_f)` as a polynomial.
    pub fn det_i_minus_df_poly(&self) -> BiPoly {
        let one = BiPoly::constant(Complex64::new(1.0, 0.0));
        let a = &one - &self.df[0][0];
        let d = &one - &self.df[1][1];
        &(&a * &d) - &(&self.df[0][1] * &self.df[1][0])
    }
}

/// `Σ 1/det(I₂ − D_f)` over the images, checked against `Σ μ`.
pub fn affine_lefschetz_sum(
    fm: &FixedPointMap,
    ss: &SolutionSet,
) -> Result<Complex64, LefschetzError> {
    if !ss.complete {
        return Err(LefschetzError::Imaging(ImagingError::Incomplete));
    }
    let affine: Complex64 = ss
        .solutions
        .iter()
        .map(|s| fm.det_i_minus_df(s.position).inv())
        .sum();
    let magnification: Complex64 = ss.solutions.iter().map(|s| s.magnification).sum();
    let scale: f64 = ss
        .solutions
        .iter()
        .map(|s| s.magnification.norm())
        .sum::<f64>()
        .max(1.0);
    if (affine - magnification).norm() > 1e-10 * scale {
        return Err(LefschetzError::IdentityMismatch {
            affine,
            magnification,
        });
    }
    Ok(affine)
}

/// The homogenized fixed-point map `F = (F0 : F1 : F2)` on ℂℙ².
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectiveMap {
    pub model_id: ModelId,
    pub components: [HomogeneousForm; 3],
    pub m: u32,
    pub equal_degrees: bool,
}

/// `F0 = Z0^m`, `F_k = Z_k Z0^{m−1} − Z0^{m−deg η_k} η_k(Z) + ζ_k Z0^m`.
pub fn homogenize(fm: &FixedPointMap) -> ProjectiveMap {
    let m = fm.m;
    let one = Complex64::new(1.0, 0.0);
    let z0m = HomogeneousForm::monomial([m, 0, 0], one);
    let component = |k: usize| {
        let eta = &fm.eta[k];
        let d = eta.total_degree();
        let mut coord = [m - 1, 0, 0];
        coord[k + 1] = 1;
        let linear = HomogeneousForm::monomial(coord, one);
        let eta_h = HomogeneousForm::homogenize(eta, d).times_z0_pow(m - d);
        &(&linear - &eta_h) + &z0m.scale(fm.zeta[k])
    };
    let degs = (fm.eta[0].total_degree(), fm.eta[1].total_degree());
    ProjectiveMap {
        model_id: fm.model_id,
        components: [z0m.clone(), component(0), component(1)],
        m,
        equal_degrees: degs.0 == degs.1 && degs.0 == m,
    }
}

impl ProjectiveMap {
    pub fn eval(&self, z: [Complex64; 3]) -> [Complex64; 3] {
        [
            self.components[0].eval(z),
            self.components[1].eval(z),
            self.components[2].eval(z),
        ]
    }

    /// `(F1, F2)` on the chart `Z0 = 1`.
    pub fn restrict_affine(&self) -> [BiPoly; 2] {
        [
            self.components[1].dehomogenize(),
            self.components[2].dehomogenize(),
        ]
    }

    /// The induced self-map of the line at infinity `Z0 = 0`.
    pub fn infinity_map(&self) -> SphereMap {
        SphereMap::new(
            self.components[1].at_infinity(),
            self.components[2].at_infinity(),
        )
    }
}

/// Points of the line at infinity where all three components of `F` vanish.
pub fn indeterminacy_points(pm: &ProjectiveMap) -> Result<Vec<[Complex64; 3]>, LefschetzError> {
    let t1 = pm.components[1].at_infinity();
    let t2 = pm.components[2].at_infinity();
    let (primary, other) = if t1.is_zero() { (&t2, &t1) } else { (&t1, &t2) };
    if primary.is_zero() {
        // cannot happen for m = max degree; both tops would be empty
        return Ok(Vec::new());
    }
    let mut out: Vec<[Complex64; 3]> = Vec::new();
    for p in primary.zeros()? {
        let scale = other.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
        if other.eval(p).norm() <= 1e-9 * scale.max(1.0) || other.is_zero() {
            let q = normalize_triple([Complex64::new(0.0, 0.0), p[0], p[1]]);
            if !out
                .iter()
                .any(|r| (0..3).all(|i| (r[i] - q[i]).norm() < 1e-9))
            {
                out.push(q);
            }
        }
    }
    Ok(out)
}

/// A fixed point of `F` on the line at infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InfinityFixedPoint {
    /// `(Z1 : Z2)` with the larger coordinate normalized to 1.
    pub point: [Complex64; 2],
    /// Derivative of the induced one-variable map in an affine chart.
    pub multiplier: Complex64,
    /// `1 / (1 − multiplier)`.
    pub index: Complex64,
    pub chart: Chart,
    pub chart_residual: f64,
}

impl From<SphereFixedPoint> for InfinityFixedPoint {
    fn from(f: SphereFixedPoint) -> Self {
        Self {
            point: f.point,
            multiplier: f.multiplier,
            index: f.index,
            chart: f.chart,
            chart_residual: f.chart_residual,
        }
    }
}

pub fn infinity_fixed_points(
    pm: &ProjectiveMap,
) -> Result<Vec<InfinityFixedPoint>, LefschetzError> {
    let indeterminacy = indeterminacy_points(pm)?;
    if !pm.equal_degrees {
        return Err(LefschetzError::UnequalDegrees {
            model: pm.model_id,
            indeterminacy,
        });
    }
    if !indeterminacy.is_empty() {
        return Err(LefschetzError::Indeterminate(indeterminacy));
    }
    Ok(pm
        .infinity_map()
        .fixed_points()?
        .into_iter()
        .map(InfinityFixedPoint::from)
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct LefschetzReport {
    pub model_id: ModelId,
    pub affine_sum: Complex64,
    pub infinity_points: Vec<InfinityFixedPoint>,
    pub infinity_sum: Complex64,
    pub total: Complex64,
    pub expected: f64,
}

impl LefschetzReport {
    pub fn defect(&self) -> f64 {
        (self.total - self.expected).norm()
    }
}

/// Affine plus infinity fixed-point indices of `F` for an equal-degree model.
pub fn lefschetz_total(model: &CatastropheModel) -> Result<LefschetzReport, LefschetzError> {
    let fm = fixed_point_map(model);
    let pm = homogenize(&fm);
    if !pm.equal_degrees {
        return Err(LefschetzError::UnequalDegrees {
            model: model.id,
            indeterminacy: indeterminacy_points(&pm)?,
        });
    }
    let ss = solve_images(model, &SolveOptions::default())?;
    let affine_sum = affine_lefschetz_sum(&fm, &ss)?;
    let infinity_points = infinity_fixed_points(&pm)?;
    let infinity_sum: Complex64 = infinity_points.iter().map(|p| p.index).sum();
    Ok(LefschetzReport {
        model_id: model.id,
        affine_sum,
        infinity_sum,
        total: affine_sum + infinity_sum,
        infinity_points,
        expected: LEFSCHETZ_NUMBER,
    })
}

/// Sum of fixed-point indices of the polynomial map `u ↦ g(u)` on the
/// Riemann sphere, including the superattracting point at infinity.
pub fn rational_fixed_point_check(g: &UniPoly) -> Result<Complex64, LefschetzError> {
    Ok(rational_fixed_points(g)?.iter().map(|f| f.index).sum())
}

/// All fixed points of `u ↦ g(u)` on the sphere.
pub fn rational_fixed_points(g: &UniPoly) -> Result<Vec<SphereFixedPoint>, LefschetzError> {
    if g.degree() < 2 {
        return Err(LefschetzError::DegreeTooLow { degree: g.degree() });
    }
    SphereMap::from_polynomial(g).fixed_points()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{instantiate, ControlParams};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn fold_fixed_point_map() {
        let m = instantiate(ModelId::Fold, ControlParams::source([0.0, 1.0])).unwrap();
        let fm = fixed_point_map(&m);
        assert!(fm.f[0].is_zero());
        assert_eq!(
            fm.f[1],
            BiPoly::from_real(&[((0, 1), 1.0), ((0, 2), -1.0), ((0, 0), 1.0)])
        );
    }

    #[test]
    fn hyperbolic_umbilic_fixed_point_map() {
        let m = instantiate(
            ModelId::HyperbolicUmbilic,
            ControlParams::with_c(1.0, [0.0, 0.0]),
        )
        .unwrap();
        let fm = fixed_point_map(&m);
        assert_eq!(
            fm.f[0],
            BiPoly::from_real(&[((1, 0), 1.0), ((2, 0), 3.0), ((0, 1), 1.0)])
        );
        assert_eq!(
            fm.f[1],
            BiPoly::from_real(&[((0, 1), 1.0), ((0, 2), 3.0), ((1, 0), 1.0)])
        );
    }

    #[test]
    fn homogenized_tops() {
        let hu = instantiate(
            ModelId::HyperbolicUmbilic,
            ControlParams::with_c(1.0, [0.2, 0.3]),
        )
        .unwrap();
        let pm = homogenize(&fixed_point_map(&hu));
        assert!(pm.equal_degrees);
        assert_eq!(
            pm.components[1].at_infinity().coeffs(),
            &[c(3.0), c(0.0), c(0.0)]
        );
        assert_eq!(
            pm.components[2].at_infinity().coeffs(),
            &[c(0.0), c(0.0), c(3.0)]
        );

        let eu = instantiate(
            ModelId::EllipticUmbilic,
            ControlParams::with_c(2.0, [0.0, 0.0]),
        )
        .unwrap();
        let pm = homogenize(&fixed_point_map(&eu));
        assert_eq!(
            pm.components[1].at_infinity().coeffs(),
            &[c(3.0), c(0.0), c(-3.0)]
        );
        assert_eq!(
            pm.components[2].at_infinity().coeffs(),
            &[c(0.0), c(-6.0), c(0.0)]
        );
    }

    #[test]
    fn fold_homogenization_and_indeterminacy() {
        let (y1, y2) = (0.25, 1.0);
        let m = instantiate(ModelId::Fold, ControlParams::source([y1, y2])).unwrap();
        let pm = homogenize(&fixed_point_map(&m));
        assert!(!pm.equal_degrees);
        let one = c(1.0);
        assert_eq!(pm.components[0], HomogeneousForm::monomial([2, 0, 0], one));
        assert_eq!(
            pm.components[1],
            HomogeneousForm::monomial([2, 0, 0], c(y1))
        );
        let expect2 = &(&HomogeneousForm::monomial([1, 0, 1], one)
            - &HomogeneousForm::monomial([0, 0, 2], one))
            + &HomogeneousForm::monomial([2, 0, 0], c(y2));
        assert_eq!(pm.components[2], expect2);
        let pts = indeterminacy_points(&pm).unwrap();
        assert_eq!(pts, vec![[c(0.0), c(1.0), c(0.0)]]);
        assert!(matches!(
            infinity_fixed_points(&pm),
            Err(LefschetzError::UnequalDegrees { .. })
        ));
    }

    #[test]
    fn equal_degree_models_are_well_defined() {
        for (id, s) in [
            (ModelId::HyperbolicUmbilic, 1.0),
            (ModelId::EllipticUmbilicLensing, 1.0),
            (ModelId::EllipticUmbilic, -2.0),
            (ModelId::HyperbolicUmbilicLensing, 0.5),
        ] {
            let m = instantiate(id, ControlParams::for_model(id, s, [0.4, -0.1])).unwrap();
            assert!(indeterminacy_points(&homogenize(&fixed_point_map(&m)))
                .unwrap()
                .is_empty());
        }
    }

    #[test]
    fn elliptic_umbilic_infinity_points() {
        let eu = instantiate(
            ModelId::EllipticUmbilic,
            ControlParams::with_c(3.0, [0.0, 0.0]),
        )
        .unwrap();
        let pts = infinity_fixed_points(&homogenize(&fixed_point_map(&eu))).unwrap();
        assert_eq!(pts.len(), 3);
        for p in &pts {
            assert!((p.multiplier - c(-2.0)).norm() < 1e-12);
            assert!((p.index - c(1.0 / 3.0)).norm() < 1e-12);
            assert!(p.chart_residual < 1e-10);
        }
    }

    #[test]
    fn lefschetz_total_fixtures() {
        let hul = instantiate(
            ModelId::HyperbolicUmbilicLensing,
            ControlParams::with_p(1.0, [0.0, 0.0]),
        )
        .unwrap();
        let rep = lefschetz_total(&hul).unwrap();
        assert!(rep.affine_sum.norm() < 1e-12);
        assert!((rep.infinity_sum - c(1.0)).norm() < 1e-12);
        assert!(rep.defect() < 1e-12);

        let fold = instantiate(ModelId::Fold, ControlParams::source([0.0, 1.0])).unwrap();
        assert!(matches!(
            lefschetz_total(&fold),
            Err(LefschetzError::UnequalDegrees { .. })
        ));
    }

    #[test]
    fn rational_fixed_point_fixtures() {
        let sq = UniPoly::from_real(&[0.0, 0.0, 1.0]);
        assert!((rational_fixed_point_check(&sq).unwrap() - c(1.0)).norm() < 1e-14);

        let cube = UniPoly::from_real(&[0.0, 0.0, 0.0, 1.0]);
        let fps = rational_fixed_points(&cube).unwrap();
        assert_eq!(fps.len(), 4);
        let mut idx: Vec<f64> = fps.iter().map(|f| f.index.re).collect();
        idx.sort_by(f64::total_cmp);
        let expect = [-0.5, -0.5, 1.0, 1.0];
        for (a, b) in idx.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((rational_fixed_point_check(&cube).unwrap() - c(1.0)).norm() < 1e-14);
    }

    #[test]
    fn rational_fixed_point_degenerate_cases() {
        // u² + 1/4 has the parabolic fixed point 1/2
        let g = UniPoly::from_real(&[0.25, 0.0, 1.0]);
        assert!(matches!(
            rational_fixed_point_check(&g),
            Err(LefschetzError::DegenerateMultiplier { .. })
        ));
        let lin = UniPoly::from_real(&[1.0, 2.0]);
        assert!(matches!(
            rational_fixed_point_check(&lin),
            Err(LefschetzError::DegreeTooLow { degree: 1 })
        ));
    }
}
