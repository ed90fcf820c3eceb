use lefschetz_lens::catalog::{instantiate, ControlParams, ModelId};
use lefschetz_lens::imaging::{solve_images, SolveOptions};
use lefschetz_lens::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_model(id: ModelId, rng: &mut ChaCha8Rng) -> lefschetz_lens::CatastropheModel {
    let shape = rng.random_range(-2.0..2.0);
    let y = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
    instantiate(id, ControlParams::for_model(id, shape, y)).unwrap()
}

#[test]
fn degree_table() {
    let table = [
        (ModelId::Fold, (1, 2), 2),
        (ModelId::Cusp, (1, 3), 3),
        (ModelId::Swallowtail, (4, 1), 4),
        (ModelId::EllipticUmbilic, (2, 2), 4),
        (ModelId::HyperbolicUmbilic, (2, 2), 4),
        (ModelId::EllipticUmbilicLensing, (2, 2), 4),
        (ModelId::HyperbolicUmbilicLensing, (2, 2), 4),
    ];
    for (id, degrees, bezout) in table {
        let m = instantiate(id, ControlParams::for_model(id, 0.8, [0.1, 0.2])).unwrap();
        assert_eq!(m.degrees, degrees, "{id}");
        assert_eq!(m.bezout, bezout, "{id}");
        assert_eq!(id.name().parse::<ModelId>().unwrap(), id);
    }
}

#[test]
fn gradient_matches_stationarity_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for id in ModelId::ALL {
        for _ in 0..100 {
            let m = random_model(id, &mut rng);
            let x = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
            assert!(
                m.gradient_check(x) <= 1e-6,
                "{id} at {x:?}: {}",
                m.gradient_check(x)
            );
        }
    }
}

#[test]
fn hessian_determinant_equals_jacobian_at_images() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let opts = SolveOptions::default();
    for id in ModelId::ALL {
        for _ in 0..100 {
            let m = random_model(id, &mut rng);
            let Ok(ss) = solve_images(&m, &opts) else {
                continue;
            };
            for s in ss.solutions.iter().filter(|s| s.is_real) {
                let x = [s.position[0].re, s.position[1].re];
                let h = m.hessian_phi(x).det;
                let j = s.det_jacobian.re;
                assert!((h - j).abs() <= 1e-6 * (1.0 + j.abs()), "{id}: {h} vs {j}");
            }
        }
    }
}

#[test]
fn symbolic_jacobian_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let h = 1e-5;
    for id in ModelId::ALL {
        let m = random_model(id, &mut rng);
        for _ in 0..100 {
            let z = [
                Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)),
                Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)),
            ];
            let jac = m.jacobian(z);
            for k in 0..2 {
                let mut zp = z;
                let mut zm = z;
                zp[k] += h;
                zm[k] -= h;
                let (ep, em) = (m.eta_eval(zp), m.eta_eval(zm));
                for i in 0..2 {
                    let fd = (ep[i] - em[i]) / (2.0 * h);
                    let exact = jac.entries[i][k];
                    assert!(
                        (fd - exact).norm() <= 1e-6 * (1.0 + exact.norm()),
                        "{id}: {fd} vs {exact}"
                    );
                }
            }
        }
    }
}

#[test]
fn parameter_compatibility_is_enforced() {
    assert!(instantiate(ModelId::EllipticUmbilic, ControlParams::source([0.0, 0.0])).is_err());
    assert!(instantiate(ModelId::Fold, ControlParams::with_c(1.0, [0.0, 0.0])).is_err());
    assert!(instantiate(
        ModelId::HyperbolicUmbilicLensing,
        ControlParams::with_c(1.0, [0.0, 0.0])
    )
    .is_err());
    assert!("parabolic-umbilic".parse::<ModelId>().is_err());
}
