//! End-to-end acceptance checks, one `PASS`/`FAIL` line per criterion.

use std::panic;
use std::process::{Command, ExitCode};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use lefschetz_lens::catalog::{instantiate, ControlParams, ModelId};
use lefschetz_lens::caustics::{
    beta_cusp_detect, critical_curve, image_count_grid, radial_range, Window,
};
use lefschetz_lens::imaging::{
    solve_images, verify_invariant, BatchReport, ImagingError, SamplingBox, SolveOptions,
};
use lefschetz_lens::lefschetz::{
    fixed_point_map, homogenize, infinity_fixed_points, lefschetz_total,
    rational_fixed_point_check, LefschetzError,
};
use lefschetz_lens::poly::UniPoly;
use lefschetz_lens::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-8;
const TRIALS: usize = 1000;
const SEED: u64 = 42;

const EQUAL_DEGREE: [ModelId; 4] = [
    ModelId::EllipticUmbilic,
    ModelId::HyperbolicUmbilic,
    ModelId::EllipticUmbilicLensing,
    ModelId::HyperbolicUmbilicLensing,
];

/// Outcome of one criterion: whether it held, and the measured values.
type Verdict = (bool, String);
type Check = fn() -> Verdict;

/// One seeded batch per model, shared by the invariant and Hessian checks.
fn batches() -> &'static (Vec<BatchReport>, Duration) {
    static CELL: OnceLock<(Vec<BatchReport>, Duration)> = OnceLock::new();
    CELL.get_or_init(|| {
        let start = Instant::now();
        let reports = ModelId::ALL
            .iter()
            .map(|&id| verify_invariant(id, TRIALS, SEED, &SamplingBox::default_for(id), TOL))
            .collect();
        (reports, start.elapsed())
    })
}

fn random_sign(rng: &mut ChaCha8Rng) -> f64 {
    if rng.random::<bool>() {
        1.0
    } else {
        -1.0
    }
}

/// Greedy nearest matching of two equally sized multisets.
fn multiset_error(got: &[Complex64], want: &[Complex64]) -> f64 {
    if got.len() != want.len() {
        return f64::INFINITY;
    }
    let mut pool = want.to_vec();
    let mut worst: f64 = 0.0;
    for g in got {
        let (k, d) = pool
            .iter()
            .enumerate()
            .map(|(k, w)| (k, (g - w).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        worst = worst.max(d);
        pool.swap_remove(k);
    }
    worst
}

fn reals(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

fn criterion_1_universal_invariant() -> Verdict {
    let (reports, elapsed) = batches();
    let mut ok = elapsed.as_secs_f64() < 10.0;
    let mut worst: f64 = 0.0;
    for r in reports {
        worst = worst.max(r.max_normalized_defect);
        ok &= r.incomplete == 0 && r.failed == 0 && r.max_normalized_defect <= TOL;
        ok &= r.accepted >= TRIALS * 9 / 10;
    }
    let accepted: Vec<usize> = reports.iter().map(|r| r.accepted).collect();
    (
        ok,
        format!(
            "max defect {worst:.2e}, accepted {accepted:?} of {TRIALS}, {:.2} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_2_real_multiplets() -> Verdict {
    let (reports, _) = batches();
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for r in reports {
        worst = worst.max(r.max_real_defect);
        ok &= r.all_real_trials >= 1
            && r.all_real_passed == r.all_real_trials
            && r.max_real_defect <= TOL;
    }
    let counts: Vec<usize> = reports.iter().map(|r| r.all_real_trials).collect();
    (
        ok,
        format!("all-real trials {counts:?}, max defect {worst:.2e}"),
    )
}

fn fixtures() -> Vec<(ModelId, ControlParams, Vec<Complex64>, Option<usize>)> {
    vec![
        (
            ModelId::Cusp,
            ControlParams::source([-3.0, 0.0]),
            reals(&[-1.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0]),
            None,
        ),
        (
            ModelId::EllipticUmbilic,
            ControlParams::with_c(3.0, [0.0, 0.0]),
            reals(&[1.0 / 36.0, -1.0 / 108.0, -1.0 / 108.0, -1.0 / 108.0]),
            None,
        ),
        (
            ModelId::HyperbolicUmbilicLensing,
            ControlParams::with_p(1.0, [0.0, 0.0]),
            reals(&[-1.0 / 4.0, 1.0 / 12.0, 1.0 / 12.0, 1.0 / 12.0]),
            Some(2),
        ),
        (
            ModelId::Swallowtail,
            ControlParams::with_c(0.0, [0.0, -1.0]),
            reals(&[-1.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]),
            None,
        ),
    ]
}

fn criterion_3_fixture_magnifications() -> Verdict {
    let opts = SolveOptions::default();
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for (id, params, want, n_real) in fixtures() {
        let ss = solve_images(&instantiate(id, params).unwrap(), &opts).unwrap();
        let mu: Vec<Complex64> = ss.solutions.iter().map(|s| s.magnification).collect();
        let err = multiset_error(&mu, &want);
        worst = worst.max(err);
        ok &= err <= 1e-10;
        if let Some(n) = n_real {
            ok &= ss.n_real() == n;
        }
    }
    (ok, format!("max error {worst:.2e}"))
}

fn criterion_4_lefschetz_decomposition() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut ok = true;
    let (mut affine, mut infinity, mut total): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for id in EQUAL_DEGREE {
        let mut done = 0;
        while done < 100 {
            let shape = rng.random_range(0.3..3.0) * random_sign(&mut rng);
            let y = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
            let m = instantiate(id, ControlParams::for_model(id, shape, y)).unwrap();
            let rep = match lefschetz_total(&m) {
                Ok(r) => r,
                Err(LefschetzError::Imaging(ImagingError::CausticSource { .. })) => continue,
                Err(e) => {
                    println!("{id} at shape {shape}, y {y:?}: {e}");
                    ok = false;
                    break;
                }
            };
            affine = affine.max(rep.affine_sum.norm());
            infinity = infinity.max((rep.infinity_sum - 1.0).norm());
            total = total.max(rep.defect());
            ok &= rep.infinity_points.len() == 3;
            done += 1;
        }
    }
    ok &= affine <= TOL && infinity <= TOL && total <= TOL;

    let multipliers = |id, params| -> Vec<Complex64> {
        let m = instantiate(id, params).unwrap();
        infinity_fixed_points(&homogenize(&fixed_point_map(&m)))
            .unwrap()
            .iter()
            .map(|p| p.multiplier)
            .collect()
    };
    let eu = multiset_error(
        &multipliers(
            ModelId::EllipticUmbilic,
            ControlParams::with_c(3.0, [0.0, 0.0]),
        ),
        &reals(&[-2.0, -2.0, -2.0]),
    );
    let hu = multiset_error(
        &multipliers(
            ModelId::HyperbolicUmbilic,
            ControlParams::with_c(1.0, [0.3, 0.7]),
        ),
        &reals(&[0.0, 0.0, 2.0]),
    );
    ok &= eu <= 1e-10 && hu <= 1e-10;
    (ok, format!("affine {affine:.2e}, infinity {infinity:.2e}, total {total:.2e}, multipliers {eu:.1e}/{hu:.1e}"))
}

fn criterion_5_rational_fixed_point_theorem() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    while checked < 1000 {
        let d = rng.random_range(2..=5);
        let g = UniPoly::new(
            (0..=d)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect(),
        );
        if g.degree() < 2 {
            continue;
        }
        let sum = rational_fixed_point_check(&g).map_or(f64::INFINITY, |s| (s - 1.0).norm());
        worst = worst.max(sum);
        checked += 1;
    }
    (worst <= 1e-10, format!("max defect {worst:.2e}"))
}

fn criterion_6_bezout_counts() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let opts = SolveOptions::default();
    let mut counts = Vec::new();
    let mut ok = true;
    for id in ModelId::ALL {
        let mut done = 0;
        let mut exact = 0;
        while done < 100 {
            let shape = rng.random_range(0.5..2.0) * random_sign(&mut rng);
            let y = [rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)];
            let m = instantiate(id, ControlParams::for_model(id, shape, y)).unwrap();
            match solve_images(&m, &opts) {
                Ok(ss) => exact += usize::from(ss.solutions.len() == id.bezout()),
                Err(ImagingError::CausticSource { .. }) => continue,
                Err(_) => {}
            }
            done += 1;
        }
        ok &= exact == 100;
        counts.push((id.bezout(), exact));
    }
    (ok, format!("(bezout, exact of 100) {counts:?}"))
}

fn criterion_7_hessian_identity() -> Verdict {
    let (reports, _) = batches();
    let mut worst = reports
        .iter()
        .map(|r| r.max_hessian_mismatch)
        .fold(0.0, f64::max);
    let opts = SolveOptions::default();
    for (id, params, ..) in fixtures() {
        let m = instantiate(id, params).unwrap();
        for s in solve_images(&m, &opts)
            .unwrap()
            .solutions
            .iter()
            .filter(|s| s.is_real)
        {
            let x = [s.position[0].re, s.position[1].re];
            let dj = s.det_jacobian.re;
            worst = worst.max((m.hessian_phi(x).det - dj).abs() / (1.0 + dj.abs()));
        }
    }
    (worst <= 1e-6, format!("max mismatch {worst:.2e}"))
}

fn criterion_8_caustic_geometry() -> Verdict {
    let eu = instantiate(
        ModelId::EllipticUmbilic,
        ControlParams::with_c(3.0, [0.0, 0.0]),
    )
    .unwrap();
    let curve = critical_curve(&eu, 2000).unwrap();
    let (lo, hi) = radial_range(&curve, [0.0, 0.0]);
    let radial = (lo - 1.0).abs().max((hi - 1.0).abs());
    let eu_cusps = beta_cusp_detect(&eu, &curve).len();

    let fold = instantiate(ModelId::Fold, ControlParams::source([0.0, 0.0])).unwrap();
    let fold_cusps = beta_cusp_detect(&fold, &critical_curve(&fold, 1000).unwrap()).len();

    let grid = image_count_grid(
        &eu,
        Window::new(-12.0, 12.0, -12.0, 12.0),
        [64, 64],
        &SolveOptions::default(),
    )
    .unwrap();
    let distinct = grid.distinct_counts();
    let jump = grid.max_adjacent_jump();
    let parity = grid.parity_violations();

    let ok = radial <= 1e-8
        && eu_cusps == 3
        && fold_cusps == 0
        && distinct.iter().all(|c| *c == 2 || *c == 4)
        && jump <= 2
        && parity == 0;
    (ok, format!(
            "radial deviation {radial:.1e}, cusps {eu_cusps}/{fold_cusps}, counts {distinct:?}, max jump {jump}, rejected {}",
            grid.rejected.iter().filter(|r| **r).count()
        ))
}

fn criterion_9_determinism() -> Verdict {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_lefschetz-lens"))
            .args(["verify", "--model", "all", "--seed", "42"])
            .output()
            .expect("binary runs")
    };
    let a = run();
    let b = run();
    let ok =
        a.status.success() && b.status.success() && !a.stdout.is_empty() && a.stdout == b.stdout;
    (
        ok,
        format!(
            "{} and {} bytes, exit {:?}/{:?}",
            a.stdout.len(),
            b.stdout.len(),
            a.status.code(),
            b.status.code()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 9] = [
        (
            "sum of all magnifications vanishes",
            criterion_1_universal_invariant,
        ),
        (
            "all-real image sets sum to zero",
            criterion_2_real_multiplets,
        ),
        (
            "fixture magnifications match closed forms",
            criterion_3_fixture_magnifications,
        ),
        (
            "affine plus infinity indices total one",
            criterion_4_lefschetz_decomposition,
        ),
        (
            "holomorphic indices of polynomial maps sum to one",
            criterion_5_rational_fixed_point_theorem,
        ),
        (
            "solver returns the Bezout number of images",
            criterion_6_bezout_counts,
        ),
        (
            "Hessian determinant equals Jacobian determinant",
            criterion_7_hessian_identity,
        ),
        ("caustic geometry", criterion_8_caustic_geometry),
        (
            "repeated verify runs are byte-identical",
            criterion_9_determinism,
        ),
    ];
    let mut failures = 0;
    for (n, (title, check)) in criteria.iter().enumerate() {
        let (ok, detail) = match panic::catch_unwind(check) {
            Ok(v) => v,
            Err(e) => (false, format!("panicked: {:?}", e.downcast_ref::<String>())),
        };
        println!(
            "{} criterion {}: {title} ({detail})",
            if ok { "PASS" } else { "FAIL" },
            n + 1
        );
        failures += usize::from(!ok);
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
