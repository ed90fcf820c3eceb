//! Image multiplets of `η(z) = y` over ℂ², signed magnifications and the
//! invariant reports built from them.

use std::cmp::Ordering;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::catalog::{CatalogError, CatastropheModel, ControlParams, ModelId, ShapeParam};
use crate::poly::{
    aberth_roots_with, newton_polish2, sylvester_resultant, AberthOptions, PolyError, Var,
    DEFAULT_MAX_ITER, DEFAULT_NEWTON_MAX_ITER, DEFAULT_NEWTON_TOL, DEFAULT_ROOT_TOL, DEFAULT_SEED,
};

/// Name of the generator used for trial sampling, recorded in reports.
pub const PRNG_NAME: &str = "ChaCha8Rng";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ImagingError {
    #[error("found {count} of {expected} solutions")]
    IncompleteSolve {
        count: usize,
        expected: usize,
        best: Box<SolutionSet>,
    },
    #[error("source lies on or near a caustic (min |det J| = {min_abs_det:e})")]
    CausticSource {
        min_abs_det: f64,
        set: Box<SolutionSet>,
    },
    #[error("solution set is incomplete")]
    Incomplete,
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    pub root_tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    /// Largest accepted `max |η_k − y_k|` after polishing.
    pub residual_tol: f64,
    /// `min |det J|` below which the source counts as on the caustic.
    pub caustic_det: f64,
    /// Per-coordinate `|Im| ≤ reality_tol · (1 + |Re|)` marks a real image.
    pub reality_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            root_tol: DEFAULT_ROOT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            seed: DEFAULT_SEED,
            newton_tol: DEFAULT_NEWTON_TOL,
            newton_max_iter: DEFAULT_NEWTON_MAX_ITER,
            residual_tol: 1e-10,
            caustic_det: 1e-6,
            reality_tol: 1e-8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Solution {
    pub position: [Complex64; 2],
    pub residual: f64,
    pub is_real: bool,
    pub det_jacobian: Complex64,
    pub magnification: Complex64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolutionSet {
    pub model_id: ModelId,
    pub params: ControlParams,
    pub source: [f64; 2],
    pub solutions: Vec<Solution>,
    pub complete: bool,
    pub min_abs_det: f64,
}

impl SolutionSet {
    pub fn n_real(&self) -> usize {
        self.solutions.iter().filter(|s| s.is_real).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InvariantReport {
    pub sum_all: Complex64,
    pub sum_real: f64,
    pub n_real: usize,
    /// `Σ |μ|` over all solutions.
    pub residual_scale: f64,
    /// `|sum_all| / max(1, Σ|μ|)`.
    pub normalized_defect: f64,
    /// `|sum_real| / max(1, Σ|μ|)`.
    pub normalized_real_defect: f64,
    pub caustic_proximity: f64,
}

/// Lexicographic on `(Re z1, Im z1, Re z2, Im z2)`, each rounded to 1e−9 so
/// rounding noise does not reorder coincident coordinates.
fn cmp_point(a: &[Complex64; 2], b: &[Complex64; 2]) -> Ordering {
    let key = |z: &[Complex64; 2]| [z[0].re, z[0].im, z[1].re, z[1].im].map(|v| (v * 1e9).round());
    let (ka, kb) = (key(a), key(b));
    ka.iter()
        .zip(&kb)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

fn point_dist(a: &[Complex64; 2], b: &[Complex64; 2]) -> f64 {
    (a[0] - b[0]).norm().max((a[1] - b[1]).norm())
}

fn is_real_point(z: &[Complex64; 2], tol: f64) -> bool {
    z.iter().all(|c| c.im.abs() <= tol * (1.0 + c.re.abs()))
}

struct Solver<'a> {
    model: &'a CatastropheModel,
    opts: &'a SolveOptions,
    system: [crate::poly::BiPoly; 2],
}

impl Solver<'_> {
    /// Newton-polish a candidate; `None` if it does not settle on a solution.
    fn polish(&self, z0: [Complex64; 2]) -> Option<([Complex64; 2], f64)> {
        let [f1, f2] = &self.system;
        match newton_polish2(f1, f2, z0, self.opts.newton_tol, self.opts.newton_max_iter) {
            Ok(out) if out.residual <= self.opts.residual_tol => Some((out.point, out.residual)),
            Ok(_) => None,
            Err(PolyError::SingularJacobian { .. }) => {
                let r = self.model.residual(z0);
                (r <= self.opts.residual_tol).then_some((z0, r))
            }
            Err(_) => None,
        }
    }

    fn insert(&self, found: &mut Vec<([Complex64; 2], f64)>, cand: [Complex64; 2]) {
        let Some((mut z, mut r)) = self.polish(cand) else {
            return;
        };
        // real images are re-polished from the real projection so they stay exactly real
        if is_real_point(&z, self.opts.reality_tol) {
            let proj = [Complex64::new(z[0].re, 0.0), Complex64::new(z[1].re, 0.0)];
            if let Some((zr, rr)) = self.polish(proj) {
                if point_dist(&zr, &z) <= 1e-6 * (1.0 + z[0].norm().max(z[1].norm())) {
                    (z, r) = (zr, rr);
                }
            }
        }
        let scale = 1.0 + z[0].norm().max(z[1].norm());
        match found
            .iter_mut()
            .find(|(w, _)| point_dist(w, &z) <= 1e-8 * scale)
        {
            Some(existing) if r < existing.1 => *existing = (z, r),
            Some(_) => {}
            None => found.push((z, r)),
        }
    }

    fn aberth_opts(&self) -> AberthOptions {
        AberthOptions {
            tol: self.opts.root_tol,
            max_iter: self.opts.max_iter,
            seed: self.opts.seed,
        }
    }

    fn recipe_candidates(&self) -> Vec<[Complex64; 2]> {
        let Ok(recipe) = self.model.eliminate() else {
            return Vec::new();
        };
        let Ok(clusters) = aberth_roots_with(&recipe.eliminant, &self.aberth_opts()) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for cluster in &clusters {
            for &root in &cluster.members {
                match recipe.back_substitute(root) {
                    Ok(z) => out.push(z),
                    Err(_) => out.extend(recipe.alternate_branch(root)),
                }
            }
        }
        out
    }

    /// Fallback: resultants in both directions, every pairing of their roots
    /// used as a Newton start.
    fn resultant_candidates(&self) -> Vec<[Complex64; 2]> {
        let [f1, f2] = &self.system;
        let roots_in = |eliminate: Var| -> Vec<Complex64> {
            sylvester_resultant(f1, f2, eliminate)
                .ok()
                .filter(|r| r.degree() > 0)
                .and_then(|r| aberth_roots_with(&r, &self.aberth_opts()).ok())
                .map(|cl| cl.into_iter().flat_map(|c| c.members).collect())
                .unwrap_or_default()
        };
        let z1s = roots_in(Var::Z2);
        let z2s = roots_in(Var::Z1);
        z1s.iter()
            .flat_map(|&a| z2s.iter().map(move |&b| [a, b]))
            .collect()
    }
}

/// All complex solutions of `η(z) = y` for the model's source.
pub fn solve_images(
    model: &CatastropheModel,
    opts: &SolveOptions,
) -> Result<SolutionSet, ImagingError> {
    let solver = Solver {
        model,
        opts,
        system: model.system(),
    };
    let mut found = Vec::new();
    for cand in solver.recipe_candidates() {
        solver.insert(&mut found, cand);
    }
    if found.len() != model.bezout {
        for cand in solver.resultant_candidates() {
            solver.insert(&mut found, cand);
        }
    }

    let mut solutions: Vec<Solution> = found
        .into_iter()
        .map(|(position, residual)| {
            let det = model.jacobian(position).det;
            Solution {
                position,
                residual,
                is_real: is_real_point(&position, opts.reality_tol),
                det_jacobian: det,
                magnification: det.inv(),
            }
        })
        .collect();
    solutions.sort_by(|a, b| cmp_point(&a.position, &b.position));
    let min_abs_det = solutions
        .iter()
        .map(|s| s.det_jacobian.norm())
        .fold(f64::INFINITY, f64::min);
    let set = SolutionSet {
        model_id: model.id,
        params: model.params,
        source: model.source(),
        complete: solutions.len() == model.bezout,
        solutions,
        min_abs_det,
    };
    if !set.complete {
        return Err(ImagingError::IncompleteSolve {
            count: set.solutions.len(),
            expected: model.bezout,
            best: Box::new(set),
        });
    }
    if min_abs_det < opts.caustic_det {
        return Err(ImagingError::CausticSource {
            min_abs_det,
            set: Box::new(set),
        });
    }
    Ok(set)
}

pub fn invariant_report(ss: &SolutionSet) -> Result<InvariantReport, ImagingError> {
    if !ss.complete {
        return Err(ImagingError::Incomplete);
    }
    let sum_all: Complex64 = ss.solutions.iter().map(|s| s.magnification).sum();
    let real: Vec<&Solution> = ss.solutions.iter().filter(|s| s.is_real).collect();
    let sum_real: f64 = real.iter().map(|s| s.magnification.re).sum();
    let residual_scale: f64 = ss.solutions.iter().map(|s| s.magnification.norm()).sum();
    let denom = residual_scale.max(1.0);
    Ok(InvariantReport {
        sum_all,
        sum_real,
        n_real: real.len(),
        residual_scale,
        normalized_defect: sum_all.norm() / denom,
        normalized_real_defect: sum_real.abs() / denom,
        caustic_proximity: ss.min_abs_det,
    })
}

/// Axis-aligned box from which trial parameters are drawn uniformly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplingBox {
    pub y1: [f64; 2],
    pub y2: [f64; 2],
    /// Range for `c` or `p`; ignored for fold and cusp.
    pub shape: [f64; 2],
}

impl SamplingBox {
    /// Default boxes. Each contains a region where all `bezout` images are real.
    pub fn default_for(id: ModelId) -> Self {
        match id {
            ModelId::Fold | ModelId::Cusp => Self {
                y1: [-2.0, 2.0],
                y2: [-2.0, 2.0],
                shape: [0.0, 0.0],
            },
            ModelId::Swallowtail => Self {
                y1: [-1.0, 1.0],
                y2: [-1.0, 1.0],
                shape: [-2.0, 2.0],
            },
            ModelId::EllipticUmbilic | ModelId::HyperbolicUmbilic => Self {
                y1: [-2.0, 2.0],
                y2: [-2.0, 2.0],
                shape: [-3.0, 3.0],
            },
            ModelId::EllipticUmbilicLensing | ModelId::HyperbolicUmbilicLensing => Self {
                y1: [-2.0, 2.0],
                y2: [-2.0, 2.0],
                shape: [-2.0, 2.0],
            },
        }
    }

    pub fn with_window(self, window: [f64; 4]) -> Self {
        Self {
            y1: [window[0], window[1]],
            y2: [window[2], window[3]],
            ..self
        }
    }
}

fn uniform(rng: &mut ChaCha8Rng, range: [f64; 2]) -> f64 {
    if range[1] > range[0] {
        rng.random_range(range[0]..range[1])
    } else {
        range[0]
    }
}

/// Draw `trials` parameter sets for `id`. The draw order is shape, `y1`, `y2`
/// per trial, from a ChaCha8 stream seeded with `seed`.
pub fn draw_params(
    id: ModelId,
    trials: usize,
    seed: u64,
    domain: &SamplingBox,
) -> Vec<ControlParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .map(|_| {
            let shape = if id.shape_param() == ShapeParam::None {
                0.0
            } else {
                uniform(&mut rng, domain.shape)
            };
            let y = [uniform(&mut rng, domain.y1), uniform(&mut rng, domain.y2)];
            ControlParams::for_model(id, shape, y)
        })
        .collect()
}

/// Trial-level `min |det J|` below which a draw is rejected as near-caustic.
pub const SAMPLING_DET: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq)]
pub enum TrialOutcome {
    Accepted {
        params: ControlParams,
        report: InvariantReport,
        all_real: bool,
        /// Largest `|det Hess φ − det J| / (1 + |det J|)` over real images.
        hessian_mismatch: f64,
    },
    NearCaustic,
    Incomplete,
    Failed(String),
}

pub fn run_trial(id: ModelId, params: ControlParams, opts: &SolveOptions) -> TrialOutcome {
    let model = match CatastropheModel::new(id, params) {
        Ok(m) => m,
        Err(e) => return TrialOutcome::Failed(e.to_string()),
    };
    match solve_images(&model, opts) {
        Ok(ss) if ss.min_abs_det < SAMPLING_DET => TrialOutcome::NearCaustic,
        Ok(ss) => {
            let report = invariant_report(&ss).expect("complete set");
            let hessian_mismatch = ss
                .solutions
                .iter()
                .filter(|s| s.is_real)
                .map(|s| {
                    let x = [s.position[0].re, s.position[1].re];
                    let dj = s.det_jacobian.re;
                    (model.hessian_phi(x).det - dj).abs() / (1.0 + dj.abs())
                })
                .fold(0.0, f64::max);
            TrialOutcome::Accepted {
                params,
                all_real: report.n_real == model.bezout,
                report,
                hessian_mismatch,
            }
        }
        Err(ImagingError::CausticSource { .. }) => TrialOutcome::NearCaustic,
        Err(ImagingError::IncompleteSolve { .. }) => TrialOutcome::Incomplete,
        Err(e) => TrialOutcome::Failed(e.to_string()),
    }
}

/// Aggregate of a Monte-Carlo certification run for one model.
#[derive(Clone, Debug, PartialEq)]
pub struct BatchReport {
    pub model: ModelId,
    pub prng: &'static str,
    pub seed: u64,
    pub tol: f64,
    pub domain: SamplingBox,
    pub trials: usize,
    pub accepted: usize,
    pub rejected_near_caustic: usize,
    pub incomplete: usize,
    pub failed: usize,
    pub max_normalized_defect: f64,
    pub all_real_trials: usize,
    /// All-real trials whose real-only sum also vanished within `tol`.
    pub all_real_passed: usize,
    pub max_real_defect: f64,
    pub max_hessian_mismatch: f64,
}

impl BatchReport {
    /// Every accepted trial within `tol`, and no trial lost to the solver.
    pub fn passed(&self) -> bool {
        self.incomplete == 0
            && self.failed == 0
            && self.max_normalized_defect <= self.tol
            && self.all_real_passed == self.all_real_trials
    }
}

/// Monte-Carlo certification of `Σ μ = 0` for one model.
pub fn verify_invariant(
    id: ModelId,
    trials: usize,
    seed: u64,
    domain: &SamplingBox,
    tol: f64,
) -> BatchReport {
    let opts = SolveOptions::default();
    let outcomes: Vec<TrialOutcome> = draw_params(id, trials, seed, domain)
        .into_par_iter()
        .map(|params| run_trial(id, params, &opts))
        .collect();

    let mut report = BatchReport {
        model: id,
        prng: PRNG_NAME,
        seed,
        tol,
        domain: *domain,
        trials,
        accepted: 0,
        rejected_near_caustic: 0,
        incomplete: 0,
        failed: 0,
        max_normalized_defect: 0.0,
        all_real_trials: 0,
        all_real_passed: 0,
        max_real_defect: 0.0,
        max_hessian_mismatch: 0.0,
    };
    for outcome in &outcomes {
        match outcome {
            TrialOutcome::Accepted {
                report: r,
                all_real,
                hessian_mismatch,
                ..
            } => {
                report.accepted += 1;
                report.max_normalized_defect =
                    report.max_normalized_defect.max(r.normalized_defect);
                report.max_hessian_mismatch = report.max_hessian_mismatch.max(*hessian_mismatch);
                if *all_real {
                    report.all_real_trials += 1;
                    report.max_real_defect = report.max_real_defect.max(r.normalized_real_defect);
                    if r.normalized_real_defect <= tol {
                        report.all_real_passed += 1;
                    }
                }
            }
            TrialOutcome::NearCaustic => report.rejected_near_caustic += 1,
            TrialOutcome::Incomplete => report.incomplete += 1,
            TrialOutcome::Failed(_) => report.failed += 1,
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn solve(id: ModelId, params: ControlParams) -> SolutionSet {
        let m = CatastropheModel::new(id, params).unwrap();
        solve_images(&m, &SolveOptions::default()).unwrap()
    }

    fn assert_solutions(ss: &SolutionSet, expect: &[([Complex64; 2], f64)]) {
        assert_eq!(ss.solutions.len(), expect.len());
        for (z, mu) in expect {
            let s = ss
                .solutions
                .iter()
                .find(|s| point_dist(&s.position, z) < 1e-10)
                .unwrap_or_else(|| panic!("no solution near {z:?}"));
            assert!(
                (s.magnification - c(*mu, 0.0)).norm() < 1e-10,
                "{} vs {mu}",
                s.magnification
            );
            assert!((s.magnification * s.det_jacobian - c(1.0, 0.0)).norm() < 1e-12);
            assert!(s.residual <= 1e-10);
        }
    }

    #[test]
    fn fold_doublet() {
        let ss = solve(ModelId::Fold, ControlParams::source([0.0, 1.0]));
        assert_solutions(
            &ss,
            &[
                ([c(0.0, 0.0), c(-1.0, 0.0)], -0.5),
                ([c(0.0, 0.0), c(1.0, 0.0)], 0.5),
            ],
        );
        assert_eq!(ss.n_real(), 2);
        let rep = invariant_report(&ss).unwrap();
        assert!(rep.sum_all.norm() < 1e-15);
        assert!(rep.sum_real.abs() < 1e-15);
    }

    #[test]
    fn cusp_triplet() {
        let s3 = 3f64.sqrt();
        let ss = solve(ModelId::Cusp, ControlParams::source([-3.0, 0.0]));
        assert_solutions(
            &ss,
            &[
                ([c(-3.0, 0.0), c(-s3, 0.0)], 1.0 / 6.0),
                ([c(-3.0, 0.0), c(0.0, 0.0)], -1.0 / 3.0),
                ([c(-3.0, 0.0), c(s3, 0.0)], 1.0 / 6.0),
            ],
        );
        let rep = invariant_report(&ss).unwrap();
        assert_eq!(rep.n_real, 3);
        assert!(rep.sum_all.norm() < 1e-14);
        assert!(rep.sum_real.abs() < 1e-14);
    }

    #[test]
    fn elliptic_umbilic_quadruplet_on_guard() {
        let s3 = 3f64.sqrt();
        let ss = solve(
            ModelId::EllipticUmbilic,
            ControlParams::with_c(3.0, [0.0, 0.0]),
        );
        assert_solutions(
            &ss,
            &[
                ([c(-2.0, 0.0), c(0.0, 0.0)], -1.0 / 108.0),
                ([c(0.0, 0.0), c(0.0, 0.0)], 1.0 / 36.0),
                ([c(1.0, 0.0), c(-s3, 0.0)], -1.0 / 108.0),
                ([c(1.0, 0.0), c(s3, 0.0)], -1.0 / 108.0),
            ],
        );
        assert_eq!(ss.n_real(), 4);
    }

    #[test]
    fn lensing_hyperbolic_umbilic_with_conjugate_pair() {
        let s3 = 3f64.sqrt();
        let ss = solve(
            ModelId::HyperbolicUmbilicLensing,
            ControlParams::with_p(1.0, [0.0, 0.0]),
        );
        assert_solutions(
            &ss,
            &[
                ([c(-2.0, 0.0), c(-2.0, 0.0)], 1.0 / 12.0),
                ([c(0.0, 0.0), c(0.0, 0.0)], -0.25),
                ([c(1.0, -s3), c(1.0, s3)], 1.0 / 12.0),
                ([c(1.0, s3), c(1.0, -s3)], 1.0 / 12.0),
            ],
        );
        let rep = invariant_report(&ss).unwrap();
        assert_eq!(rep.n_real, 2);
        assert!(rep.sum_all.norm() < 1e-14);
        assert!((rep.sum_real + 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn swallowtail_quadruplet() {
        let ss = solve(
            ModelId::Swallowtail,
            ControlParams::with_c(0.0, [0.0, -1.0]),
        );
        let mus: Vec<f64> = ss.solutions.iter().map(|s| s.magnification.re).collect();
        let mut sorted = mus.clone();
        sorted.sort_by(f64::total_cmp);
        let expect = [-1.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0];
        for (a, b) in sorted.iter().zip(expect) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!(invariant_report(&ss).unwrap().normalized_defect < 1e-12);
    }

    #[test]
    fn fold_complex_pair_still_cancels() {
        let ss = solve(ModelId::Fold, ControlParams::source([0.0, -1.0]));
        assert_eq!(ss.n_real(), 0);
        assert!(invariant_report(&ss).unwrap().sum_all.norm() < 1e-15);
    }

    #[test]
    fn source_on_caustic_is_flagged() {
        let m = CatastropheModel::new(ModelId::Fold, ControlParams::source([0.3, 0.0])).unwrap();
        match solve_images(&m, &SolveOptions::default()) {
            Err(ImagingError::CausticSource { .. }) | Err(ImagingError::IncompleteSolve { .. }) => {
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn decoupled_hyperbolic_umbilic_uses_resultant_route() {
        let ss = solve(
            ModelId::HyperbolicUmbilic,
            ControlParams::with_c(0.0, [-0.6, -1.2]),
        );
        assert_eq!(ss.solutions.len(), 4);
        assert_eq!(ss.n_real(), 4);
        assert!(invariant_report(&ss).unwrap().normalized_defect < 1e-12);
    }

    #[test]
    fn incomplete_set_refuses_report() {
        let mut ss = solve(ModelId::Fold, ControlParams::source([0.0, 1.0]));
        ss.complete = false;
        assert!(matches!(
            invariant_report(&ss),
            Err(ImagingError::Incomplete)
        ));
    }

    #[test]
    fn empty_batch() {
        let rep = verify_invariant(
            ModelId::Cusp,
            0,
            1,
            &SamplingBox::default_for(ModelId::Cusp),
            1e-8,
        );
        assert_eq!(rep.trials, 0);
        assert_eq!(rep.accepted, 0);
        assert!(rep.passed());
    }

    #[test]
    fn small_fold_batch() {
        let rep = verify_invariant(
            ModelId::Fold,
            200,
            42,
            &SamplingBox::default_for(ModelId::Fold),
            1e-8,
        );
        assert_eq!(rep.trials, 200);
        assert!(rep.accepted > 150);
        assert!(rep.max_normalized_defect < 1e-9);
        assert!(rep.passed());
    }
}
