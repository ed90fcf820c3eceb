//! The seven polynomial lensing maps: five generic catastrophes (fold, cusp,
//! swallowtail, elliptic and hyperbolic umbilic) and the two umbilic maps as
//! they arise in gravitational lensing.
//!
//! Each model carries its map `η`, its generating (Fermat) potential `φ`, the
//! symbolic Jacobian of `η`, and a closed-form elimination recipe that reduces
//! `η(z) = y` to a single univariate polynomial.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::poly::{BiPoly, UniPoly, Var};

/// Central-difference step for gradients of `φ`.
pub const GRADIENT_STEP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CatalogError {
    #[error("unknown model '{0}'")]
    UnknownModel(String),
    #[error("invalid parameters for {model}: {reason}")]
    InvalidParams { model: ModelId, reason: String },
    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelId {
    Fold,
    Cusp,
    Swallowtail,
    EllipticUmbilic,
    HyperbolicUmbilic,
    EllipticUmbilicLensing,
    HyperbolicUmbilicLensing,
}

/// Which shape parameter (besides the source `y`) a model takes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShapeParam {
    None,
    C,
    P,
}

impl ModelId {
    pub const ALL: [ModelId; 7] = [
        ModelId::Fold,
        ModelId::Cusp,
        ModelId::Swallowtail,
        ModelId::EllipticUmbilic,
        ModelId::HyperbolicUmbilic,
        ModelId::EllipticUmbilicLensing,
        ModelId::HyperbolicUmbilicLensing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelId::Fold => "fold",
            ModelId::Cusp => "cusp",
            ModelId::Swallowtail => "swallowtail",
            ModelId::EllipticUmbilic => "elliptic-umbilic",
            ModelId::HyperbolicUmbilic => "hyperbolic-umbilic",
            ModelId::EllipticUmbilicLensing => "elliptic-umbilic-lensing",
            ModelId::HyperbolicUmbilicLensing => "hyperbolic-umbilic-lensing",
        }
    }

    pub fn shape_param(self) -> ShapeParam {
        match self {
            ModelId::Fold | ModelId::Cusp => ShapeParam::None,
            ModelId::Swallowtail | ModelId::EllipticUmbilic | ModelId::HyperbolicUmbilic => {
                ShapeParam::C
            }
            ModelId::EllipticUmbilicLensing | ModelId::HyperbolicUmbilicLensing => ShapeParam::P,
        }
    }

    /// `(deg η1, deg η2)`.
    pub fn degrees(self) -> (u32, u32) {
        match self {
            ModelId::Fold => (1, 2),
            ModelId::Cusp => (1, 3),
            ModelId::Swallowtail => (4, 1),
            _ => (2, 2),
        }
    }

    pub fn bezout(self) -> usize {
        let (a, b) = self.degrees();
        (a * b) as usize
    }

    pub fn max_degree(self) -> u32 {
        let (a, b) = self.degrees();
        a.max(b)
    }

    pub fn equal_degrees(self) -> bool {
        let (a, b) = self.degrees();
        a == b
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelId {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelId::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| CatalogError::UnknownModel(s.to_string()))
    }
}

/// Control parameters: the source position `y` and, depending on the model,
/// the modulus `c` or the lensing parameter `p`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct ControlParams {
    pub c: Option<f64>,
    pub p: Option<f64>,
    pub y: [f64; 2],
}

impl ControlParams {
    pub fn source(y: [f64; 2]) -> Self {
        Self {
            y,
            ..Self::default()
        }
    }

    pub fn with_c(c: f64, y: [f64; 2]) -> Self {
        Self {
            c: Some(c),
            p: None,
            y,
        }
    }

    pub fn with_p(p: f64, y: [f64; 2]) -> Self {
        Self {
            c: None,
            p: Some(p),
            y,
        }
    }

    /// Build parameters for `id` from a single shape value (ignored for fold
    /// and cusp).
    pub fn for_model(id: ModelId, shape: f64, y: [f64; 2]) -> Self {
        match id.shape_param() {
            ShapeParam::None => Self::source(y),
            ShapeParam::C => Self::with_c(shape, y),
            ShapeParam::P => Self::with_p(shape, y),
        }
    }
}

/// `J_η` evaluated at a point, with its determinant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jacobian {
    pub entries: [[Complex64; 2]; 2],
    pub det: Complex64,
}

/// Hessian of `φ` at a real point, with its determinant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hessian {
    pub entries: [[f64; 2]; 2],
    pub det: f64,
}

/// Rational back-substitution `solved = numerator(root) / denominator(root)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BackSubstitution {
    pub numerator: UniPoly,
    pub denominator: UniPoly,
}

/// Closed-form reduction of `η(z) = y` to one univariate polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct EliminationRecipe {
    /// Variable removed by the elimination. The eliminant is a polynomial in
    /// the other one.
    pub eliminated: Var,
    pub eliminant: UniPoly,
    pub back_substitution: BackSubstitution,
    /// Equation (`η_k − y_k`) solved for the eliminated variable directly when
    /// the back-substitution denominator vanishes.
    pub alternate_equation: BiPoly,
    pub guard: &'static str,
}

/// Relative size of the back-substitution denominator below which the
/// alternate branch takes over.
const BACKSUB_GUARD: f64 = 1e-6;

impl EliminationRecipe {
    pub fn root_var(&self) -> Var {
        self.eliminated.other()
    }

    fn assemble(&self, root: Complex64, solved: Complex64) -> [Complex64; 2] {
        match self.eliminated {
            Var::Z1 => [solved, root],
            Var::Z2 => [root, solved],
        }
    }

    /// Full solution pair for an eliminant root.
    pub fn back_substitute(&self, root: Complex64) -> Result<[Complex64; 2], CatalogError> {
        let den = self.back_substitution.denominator.eval(root);
        if den.norm() <= BACKSUB_GUARD * self.back_substitution.denominator.abs_eval(root) {
            return Err(CatalogError::DegenerateParameters(format!(
                "back-substitution denominator vanishes at {root} ({})",
                self.guard
            )));
        }
        let num = self.back_substitution.numerator.eval(root);
        Ok(self.assemble(root, num / den))
    }

    /// All candidate pairs obtained by solving the alternate equation for the
    /// eliminated variable.
    pub fn alternate_branch(&self, root: Complex64) -> Vec<[Complex64; 2]> {
        let u = self.alternate_equation.substitute(self.root_var(), root);
        match u.degree() {
            0 => Vec::new(),
            _ => crate::poly::aberth_roots(
                &u,
                crate::poly::DEFAULT_ROOT_TOL,
                crate::poly::DEFAULT_MAX_ITER,
            )
            .map(|cl| {
                cl.iter()
                    .flat_map(|c| c.members.iter().map(|&m| self.assemble(root, m)))
                    .collect()
            })
            .unwrap_or_default(),
        }
    }
}

/// One of the seven maps with its parameters substituted.
#[derive(Clone, Debug, PartialEq)]
pub struct CatastropheModel {
    pub id: ModelId,
    pub params: ControlParams,
    /// `(η1, η2)` with `c`/`p` substituted; `y` is the target, not part of η.
    pub eta: [BiPoly; 2],
    /// Generating potential with `y` and `c`/`p` substituted.
    pub phi: BiPoly,
    pub degrees: (u32, u32),
    pub bezout: usize,
    pub m: u32,
    jac: [[BiPoly; 2]; 2],
    /// `M(x)` with `∇φ = −M(x) (η(x) − y)`; `det M ≡ 1`.
    stationarity: [[BiPoly; 2]; 2],
}

fn r(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn identity2() -> [[BiPoly; 2]; 2] {
    [
        [BiPoly::constant(r(1.0)), BiPoly::zero()],
        [BiPoly::zero(), BiPoly::constant(r(1.0))],
    ]
}

/// `y1 x1 + y2 x2`
fn linear_source(y: [f64; 2]) -> BiPoly {
    BiPoly::from_real(&[((1, 0), y[0]), ((0, 1), y[1])])
}

pub fn instantiate(id: ModelId, params: ControlParams) -> Result<CatastropheModel, CatalogError> {
    CatastropheModel::new(id, params)
}

impl CatastropheModel {
    pub fn new(id: ModelId, params: ControlParams) -> Result<Self, CatalogError> {
        let invalid = |reason: &str| CatalogError::InvalidParams {
            model: id,
            reason: reason.to_string(),
        };
        if !params.y.iter().all(|v| v.is_finite()) {
            return Err(invalid("source position must be finite"));
        }
        let shape = match id.shape_param() {
            ShapeParam::None => {
                if params.c.is_some() || params.p.is_some() {
                    return Err(invalid("takes no c or p parameter"));
                }
                0.0
            }
            ShapeParam::C => {
                if params.p.is_some() {
                    return Err(invalid("takes c, not p"));
                }
                params.c.ok_or_else(|| invalid("requires c"))?
            }
            ShapeParam::P => {
                if params.c.is_some() {
                    return Err(invalid("takes p, not c"));
                }
                params.p.ok_or_else(|| invalid("requires p"))?
            }
        };
        if !shape.is_finite() {
            return Err(invalid("shape parameter must be finite"));
        }
        let y = params.y;
        let lin = linear_source(y);

        let (eta, phi, stationarity) = match id {
            ModelId::Fold => (
                [
                    BiPoly::from_real(&[((1, 0), 1.0)]),
                    BiPoly::from_real(&[((0, 2), 1.0)]),
                ],
                &lin + &BiPoly::from_real(&[((2, 0), -0.5), ((0, 3), -1.0 / 3.0)]),
                identity2(),
            ),
            ModelId::Cusp => (
                [
                    BiPoly::from_real(&[((1, 0), 1.0)]),
                    BiPoly::from_real(&[((1, 1), 1.0), ((0, 3), 1.0)]),
                ],
                &lin + &BiPoly::from_real(&[
                    ((2, 0), -0.5),
                    ((0, 2), -0.5 * y[0]),
                    ((0, 4), -0.25),
                ]),
                [
                    [BiPoly::constant(r(1.0)), BiPoly::zero()],
                    [
                        BiPoly::from_real(&[((0, 1), -1.0)]),
                        BiPoly::constant(r(1.0)),
                    ],
                ],
            ),
            ModelId::Swallowtail => {
                let c = shape;
                (
                    [
                        BiPoly::from_real(&[((1, 1), 1.0), ((2, 0), c), ((4, 0), 1.0)]),
                        BiPoly::from_real(&[((0, 1), 1.0)]),
                    ],
                    &lin + &BiPoly::from_real(&[
                        ((2, 0), -0.5 * y[1]),
                        ((0, 2), -0.5),
                        ((3, 0), -c / 3.0),
                        ((5, 0), -0.2),
                    ]),
                    [
                        [
                            BiPoly::constant(r(1.0)),
                            BiPoly::from_real(&[((1, 0), -1.0)]),
                        ],
                        [BiPoly::zero(), BiPoly::constant(r(1.0))],
                    ],
                )
            }
            ModelId::EllipticUmbilic => {
                let c = shape;
                (
                    [
                        BiPoly::from_real(&[((0, 2), 3.0), ((2, 0), -3.0), ((1, 0), -2.0 * c)]),
                        BiPoly::from_real(&[((1, 1), 6.0), ((0, 1), -2.0 * c)]),
                    ],
                    &lin + &BiPoly::from_real(&[
                        ((2, 0), c),
                        ((0, 2), c),
                        ((3, 0), 1.0),
                        ((1, 2), -3.0),
                    ]),
                    identity2(),
                )
            }
            ModelId::HyperbolicUmbilic => {
                let c = shape;
                (
                    [
                        BiPoly::from_real(&[((2, 0), -3.0), ((0, 1), -c)]),
                        BiPoly::from_real(&[((0, 2), -3.0), ((1, 0), -c)]),
                    ],
                    &lin + &BiPoly::from_real(&[((1, 1), c), ((3, 0), 1.0), ((0, 3), 1.0)]),
                    identity2(),
                )
            }
            ModelId::EllipticUmbilicLensing => {
                let p = shape;
                (
                    [
                        BiPoly::from_real(&[((2, 0), 1.0), ((0, 2), -1.0)]),
                        BiPoly::from_real(&[((1, 1), -2.0), ((0, 1), 4.0 * p)]),
                    ],
                    // η is a gradient field: φ = y·x − (x1³/3 − x1 x2² + 2p x2²)
                    &lin + &BiPoly::from_real(&[
                        ((3, 0), -1.0 / 3.0),
                        ((1, 2), 1.0),
                        ((0, 2), -2.0 * p),
                    ]),
                    identity2(),
                )
            }
            ModelId::HyperbolicUmbilicLensing => {
                let p = shape;
                (
                    [
                        BiPoly::from_real(&[((2, 0), 1.0), ((0, 1), 2.0 * p)]),
                        BiPoly::from_real(&[((0, 2), 1.0), ((1, 0), 2.0 * p)]),
                    ],
                    // φ = y·x − (x1³/3 + x2³/3 + 2p x1 x2)
                    &lin + &BiPoly::from_real(&[
                        ((3, 0), -1.0 / 3.0),
                        ((0, 3), -1.0 / 3.0),
                        ((1, 1), -2.0 * p),
                    ]),
                    identity2(),
                )
            }
        };

        let degrees = (eta[0].total_degree(), eta[1].total_degree());
        assert_eq!(degrees, id.degrees(), "degree table mismatch for {id}");
        let bezout = (degrees.0 * degrees.1) as usize;
        assert_eq!(bezout, id.bezout());
        let m = degrees.0.max(degrees.1);
        assert!(m >= 2);

        let jac = [
            [eta[0].partial(Var::Z1), eta[0].partial(Var::Z2)],
            [eta[1].partial(Var::Z1), eta[1].partial(Var::Z2)],
        ];
        Ok(Self {
            id,
            params,
            eta,
            phi,
            degrees,
            bezout,
            m,
            jac,
            stationarity,
        })
    }

    /// Same model and shape parameter, different source position.
    pub fn with_source(&self, y: [f64; 2]) -> Self {
        Self::new(self.id, ControlParams { y, ..self.params })
            .expect("source change keeps parameters valid")
    }

    pub fn source(&self) -> [f64; 2] {
        self.params.y
    }

    /// The `c` or `p` value (0 for fold and cusp).
    pub fn shape(&self) -> f64 {
        self.params.c.or(self.params.p).unwrap_or(0.0)
    }

    pub fn eta_eval(&self, z: [Complex64; 2]) -> [Complex64; 2] {
        [self.eta[0].eval(z), self.eta[1].eval(z)]
    }

    pub fn eta_real(&self, x: [f64; 2]) -> [f64; 2] {
        [self.eta[0].eval_real(x), self.eta[1].eval_real(x)]
    }

    /// `(η1 − y1, η2 − y2)`.
    pub fn system(&self) -> [BiPoly; 2] {
        let y = self.params.y;
        [
            &self.eta[0] - &BiPoly::constant(r(y[0])),
            &self.eta[1] - &BiPoly::constant(r(y[1])),
        ]
    }

    /// `max_k |η_k(z) − y_k|`.
    pub fn residual(&self, z: [Complex64; 2]) -> f64 {
        let e = self.eta_eval(z);
        let y = self.params.y;
        (e[0] - y[0]).norm().max((e[1] - y[1]).norm())
    }

    /// Symbolic Jacobian partials `∂η_i/∂z_j`.
    pub fn jacobian_polys(&self) -> &[[BiPoly; 2]; 2] {
        &self.jac
    }

    /// `det J_η` as a polynomial.
    pub fn det_jacobian_poly(&self) -> BiPoly {
        &(&self.jac[0][0] * &self.jac[1][1]) - &(&self.jac[0][1] * &self.jac[1][0])
    }

    pub fn jacobian(&self, z: [Complex64; 2]) -> Jacobian {
        let e = [
            [self.jac[0][0].eval(z), self.jac[0][1].eval(z)],
            [self.jac[1][0].eval(z), self.jac[1][1].eval(z)],
        ];
        Jacobian {
            entries: e,
            det: e[0][0] * e[1][1] - e[0][1] * e[1][0],
        }
    }

    pub fn jacobian_real(&self, x: [f64; 2]) -> [[f64; 2]; 2] {
        let j = self.jacobian([r(x[0]), r(x[1])]).entries;
        [[j[0][0].re, j[0][1].re], [j[1][0].re, j[1][1].re]]
    }

    pub fn fermat_potential(&self, x: [f64; 2]) -> f64 {
        self.phi.eval_real(x)
    }

    /// `∇φ` by central differences.
    pub fn gradient_fd(&self, x: [f64; 2]) -> [f64; 2] {
        let h = GRADIENT_STEP;
        let d = |k: usize| {
            let mut xp = x;
            let mut xm = x;
            xp[k] += h;
            xm[k] -= h;
            (self.fermat_potential(xp) - self.fermat_potential(xm)) / (2.0 * h)
        };
        [d(0), d(1)]
    }

    /// The stationarity conditions of `φ` written through `η`:
    /// `−M(x) (η(x) − y)`, which equals `∇φ(x)` identically.
    pub fn stationarity_form(&self, x: [f64; 2]) -> [f64; 2] {
        let e = self.eta_real(x);
        let y = self.params.y;
        let d = [e[0] - y[0], e[1] - y[1]];
        let m = |i: usize, j: usize| self.stationarity[i][j].eval_real(x);
        [
            -(m(0, 0) * d[0] + m(0, 1) * d[1]),
            -(m(1, 0) * d[0] + m(1, 1) * d[1]),
        ]
    }

    /// `max_k |∇φ(x)_k − stationarity_form(x)_k|` with `∇φ` from central
    /// differences.
    pub fn gradient_check(&self, x: [f64; 2]) -> f64 {
        let g = self.gradient_fd(x);
        let s = self.stationarity_form(x);
        (g[0] - s[0]).abs().max((g[1] - s[1]).abs())
    }

    /// Hessian of `φ` from its exact second partials.
    pub fn hessian_phi(&self, x: [f64; 2]) -> Hessian {
        let px = self.phi.partial(Var::Z1);
        let py = self.phi.partial(Var::Z2);
        let e = [
            [
                px.partial(Var::Z1).eval_real(x),
                px.partial(Var::Z2).eval_real(x),
            ],
            [
                py.partial(Var::Z1).eval_real(x),
                py.partial(Var::Z2).eval_real(x),
            ],
        ];
        Hessian {
            entries: e,
            det: e[0][0] * e[1][1] - e[0][1] * e[1][0],
        }
    }

    /// Closed-form elimination recipe for the current parameters.
    pub fn eliminate(&self) -> Result<EliminationRecipe, CatalogError> {
        let [y1, y2] = self.params.y;
        let s = self.shape();
        let u = UniPoly::from_real;
        let one = u(&[1.0]);
        let [e1, e2] = self.system();
        let recipe = match self.id {
            ModelId::Fold => EliminationRecipe {
                eliminated: Var::Z1,
                eliminant: u(&[-y2, 0.0, 1.0]),
                back_substitution: BackSubstitution {
                    numerator: u(&[y1]),
                    denominator: one,
                },
                alternate_equation: e1,
                guard: "none",
            },
            ModelId::Cusp => EliminationRecipe {
                eliminated: Var::Z1,
                eliminant: u(&[-y2, y1, 0.0, 1.0]),
                back_substitution: BackSubstitution {
                    numerator: u(&[y1]),
                    denominator: one,
                },
                alternate_equation: e1,
                guard: "none",
            },
            ModelId::Swallowtail => EliminationRecipe {
                eliminated: Var::Z2,
                eliminant: u(&[-y1, y2, s, 0.0, 1.0]),
                back_substitution: BackSubstitution {
                    numerator: u(&[y2]),
                    denominator: one,
                },
                alternate_equation: e2,
                guard: "none",
            },
            ModelId::EllipticUmbilic => {
                // z2 = y2 / (6 z1 − 2c);  3 y2² − (3 z1² + 2c z1 + y1)(6 z1 − 2c)² = 0
                let den = u(&[-2.0 * s, 6.0]);
                let quad = u(&[y1, 2.0 * s, 3.0]);
                EliminationRecipe {
                    eliminated: Var::Z2,
                    eliminant: &u(&[3.0 * y2 * y2]) - &(&quad * &den.pow(2)),
                    back_substitution: BackSubstitution {
                        numerator: u(&[y2]),
                        denominator: den,
                    },
                    alternate_equation: e1,
                    guard: "6 z1 - 2c != 0",
                }
            }
            ModelId::HyperbolicUmbilic => {
                if s.abs() <= 1e-12 {
                    return Err(CatalogError::DegenerateParameters(
                        "hyperbolic umbilic with c = 0 decouples; use the resultant route".into(),
                    ));
                }
                // z2 = −(y1 + 3 z1²)/c;  −3 (y1 + 3 z1²)² − c³ z1 − c² y2 = 0
                let inner = u(&[y1, 0.0, 3.0]);
                EliminationRecipe {
                    eliminated: Var::Z2,
                    eliminant: &inner.pow(2).scale(r(-3.0)) - &u(&[s * s * y2, s * s * s]),
                    back_substitution: BackSubstitution {
                        numerator: -&inner,
                        denominator: u(&[s]),
                    },
                    alternate_equation: e2,
                    guard: "c != 0",
                }
            }
            ModelId::EllipticUmbilicLensing => {
                // z2 = y2 / (4p − 2 z1);  (z1² − y1)(4p − 2 z1)² − y2² = 0
                let den = u(&[4.0 * s, -2.0]);
                EliminationRecipe {
                    eliminated: Var::Z2,
                    eliminant: &(&u(&[-y1, 0.0, 1.0]) * &den.pow(2)) - &u(&[y2 * y2]),
                    back_substitution: BackSubstitution {
                        numerator: u(&[y2]),
                        denominator: den,
                    },
                    alternate_equation: e1,
                    guard: "4p - 2 z1 != 0",
                }
            }
            ModelId::HyperbolicUmbilicLensing => {
                if s.abs() <= 1e-12 {
                    return Err(CatalogError::DegenerateParameters(
                        "lensing hyperbolic umbilic with p = 0 decouples; use the resultant route"
                            .into(),
                    ));
                }
                // z2 = (y1 − z1²)/(2p);  (y1 − z1²)² + 8p³ z1 − 4p² y2 = 0
                let inner = u(&[y1, 0.0, -1.0]);
                EliminationRecipe {
                    eliminated: Var::Z2,
                    eliminant: &inner.pow(2) + &u(&[-4.0 * s * s * y2, 8.0 * s * s * s]),
                    back_substitution: BackSubstitution {
                        numerator: inner,
                        denominator: u(&[2.0 * s]),
                    },
                    alternate_equation: e2,
                    guard: "p != 0",
                }
            }
        };
        Ok(recipe)
    }
}
