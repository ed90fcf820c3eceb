//! Serialized forms of the command outputs.

use lefschetz_lens::catalog::ControlParams;
use lefschetz_lens::caustics::{CriticalPoint, ImageCountGrid};
use lefschetz_lens::imaging::{BatchReport, SamplingBox, SolutionSet};
use lefschetz_lens::lefschetz::{InfinityFixedPoint, LefschetzReport};
use lefschetz_lens::Complex64;
use serde::Serialize;

/// `[re, im]`
pub type CPair = [f64; 2];

fn cp(z: Complex64) -> CPair {
    [z.re, z.im]
}

#[derive(Serialize)]
pub struct ParamsOut {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

impl From<&ControlParams> for ParamsOut {
    fn from(p: &ControlParams) -> Self {
        Self { c: p.c, p: p.p }
    }
}

#[derive(Serialize)]
pub struct SolutionOut {
    pub x: [CPair; 2],
    pub real: bool,
    pub det_j: CPair,
    pub mu: CPair,
    pub residual: f64,
}

#[derive(Serialize)]
pub struct SolveOut {
    pub model: String,
    pub params: ParamsOut,
    pub source: [f64; 2],
    pub solutions: Vec<SolutionOut>,
    pub sum_all: CPair,
    pub sum_real: f64,
    pub n_real: usize,
}

impl From<&SolutionSet> for SolveOut {
    fn from(ss: &SolutionSet) -> Self {
        let sum_all: Complex64 = ss.solutions.iter().map(|s| s.magnification).sum();
        let sum_real: f64 = ss
            .solutions
            .iter()
            .filter(|s| s.is_real)
            .map(|s| s.magnification.re)
            .sum();
        Self {
            model: ss.model_id.name().to_string(),
            params: (&ss.params).into(),
            source: ss.source,
            solutions: ss
                .solutions
                .iter()
                .map(|s| SolutionOut {
                    x: [cp(s.position[0]), cp(s.position[1])],
                    real: s.is_real,
                    det_j: cp(s.det_jacobian),
                    mu: cp(s.magnification),
                    residual: s.residual,
                })
                .collect(),
            sum_all: cp(sum_all),
            sum_real,
            n_real: ss.n_real(),
        }
    }
}

#[derive(Serialize)]
pub struct DomainOut {
    pub y1: [f64; 2],
    pub y2: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape: Option<[f64; 2]>,
}

impl DomainOut {
    fn new(b: &SamplingBox, has_shape: bool) -> Self {
        Self {
            y1: b.y1,
            y2: b.y2,
            shape: has_shape.then_some(b.shape),
        }
    }
}

#[derive(Serialize)]
pub struct ModelVerifyOut {
    pub model: String,
    pub domain: DomainOut,
    pub trials: usize,
    pub accepted: usize,
    pub rejected_near_caustic: usize,
    pub incomplete: usize,
    pub failed: usize,
    pub max_normalized_defect: f64,
    pub all_real_trials: usize,
    pub all_real_passed: usize,
    pub max_real_defect: f64,
    pub max_hessian_mismatch: f64,
    pub passed: bool,
}

impl From<&BatchReport> for ModelVerifyOut {
    fn from(r: &BatchReport) -> Self {
        let has_shape = r.model.shape_param() != lefschetz_lens::catalog::ShapeParam::None;
        Self {
            model: r.model.name().to_string(),
            domain: DomainOut::new(&r.domain, has_shape),
            trials: r.trials,
            accepted: r.accepted,
            rejected_near_caustic: r.rejected_near_caustic,
            incomplete: r.incomplete,
            failed: r.failed,
            max_normalized_defect: r.max_normalized_defect,
            all_real_trials: r.all_real_trials,
            all_real_passed: r.all_real_passed,
            max_real_defect: r.max_real_defect,
            max_hessian_mismatch: r.max_hessian_mismatch,
            passed: r.passed(),
        }
    }
}

#[derive(Serialize)]
pub struct VerifyOut {
    pub prng: String,
    pub seed: u64,
    pub tol: f64,
    pub trials: usize,
    pub models: Vec<ModelVerifyOut>,
    pub passed: bool,
}

#[derive(Serialize)]
pub struct InfinityPointOut {
    pub point: [CPair; 2],
    pub lambda: CPair,
    pub index: CPair,
}

impl From<&InfinityFixedPoint> for InfinityPointOut {
    fn from(p: &InfinityFixedPoint) -> Self {
        Self {
            point: [cp(p.point[0]), cp(p.point[1])],
            lambda: cp(p.multiplier),
            index: cp(p.index),
        }
    }
}

#[derive(Serialize)]
pub struct LefschetzOut {
    pub affine_sum: CPair,
    pub infinity_fixed_points: Vec<InfinityPointOut>,
    pub infinity_sum: CPair,
    pub total: CPair,
}

impl From<&LefschetzReport> for LefschetzOut {
    fn from(r: &LefschetzReport) -> Self {
        Self {
            affine_sum: cp(r.affine_sum),
            infinity_fixed_points: r.infinity_points.iter().map(Into::into).collect(),
            infinity_sum: cp(r.infinity_sum),
            total: cp(r.total),
        }
    }
}

/// 17 significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub const CAUSTIC_HEADER: &str = "t,x1,x2,y1,y2,beta,is_cusp";
pub const SWEEP_HEADER: &str = "y1,y2,n_real,sum_real_mu,rejected";

pub fn caustic_csv(points: &[CriticalPoint], cusp_flags: &[bool]) -> String {
    let mut out = String::from(CAUSTIC_HEADER);
    out.push('\n');
    for (p, &flag) in points.iter().zip(cusp_flags) {
        let cols = [
            p.parameter_t,
            p.x[0],
            p.x[1],
            p.caustic_y[0],
            p.caustic_y[1],
            p.beta,
        ]
        .map(fmt_float);
        out.push_str(&cols.join(","));
        out.push_str(if flag { ",1\n" } else { ",0\n" });
    }
    out
}

pub fn sweep_csv(grid: &ImageCountGrid) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    let [nx, ny] = grid.resolution;
    for j in 0..ny {
        for i in 0..nx {
            let k = grid.index(i, j);
            let y = grid.cell_centre(i, j);
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt_float(y[0]),
                fmt_float(y[1]),
                grid.counts[k],
                fmt_float(grid.sum_real[k]),
                u8::from(grid.rejected[k]),
            ));
        }
    }
    out
}
