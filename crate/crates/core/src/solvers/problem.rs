use crate::error::{check_len, Error, Result};
use crate::linops::{LinearOperator, Operator};
use crate::prox::ProxTerm;
use crate::Vector;

/// A differentiable convex function with an `L`-Lipschitz gradient.
pub trait SmoothTerm {
    fn dim(&self) -> usize;
    fn value(&self, x: &Vector) -> f64;
    fn gradient(&self, x: &Vector) -> Vector;
    fn lipschitz(&self) -> f64;
    /// Strong convexity modulus; zero when not strongly convex.
    fn strong_convexity(&self) -> f64 {
        0.0
    }
}

/// `½‖M x - b‖²`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticLoss {
    design: Operator,
    target: Vector,
    lipschitz: f64,
    strong_convexity: f64,
}

impl QuadraticLoss {
    /// `½‖x - b‖²`, with `L = μ = 1`.
    pub fn identity(target: Vector) -> Self {
        Self {
            design: Operator::Identity(target.len()),
            target,
            lipschitz: 1.0,
            strong_convexity: 1.0,
        }
    }

    /// `lipschitz` must bound `λmax(MᵀM)` and `strong_convexity` must not
    /// exceed `λmin(MᵀM)`.
    pub fn new(design: Operator, target: Vector, lipschitz: f64, strong_convexity: f64) -> Result<Self> {
        check_len(target.len(), design.rows(), "target length vs design rows")?;
        if !(lipschitz >= 0.0) || !lipschitz.is_finite() {
            return Err(Error::param(
                "lipschitz",
                format!("must be finite and >= 0, got {lipschitz}"),
            ));
        }
        if !(strong_convexity >= 0.0) || strong_convexity > lipschitz {
            return Err(Error::param("strong_convexity", "must lie in [0, lipschitz]"));
        }
        Ok(Self {
            design,
            target,
            lipschitz,
            strong_convexity,
        })
    }

    pub fn design(&self) -> &Operator {
        &self.design
    }

    pub fn target(&self) -> &Vector {
        &self.target
    }
}

impl SmoothTerm for QuadraticLoss {
    fn dim(&self) -> usize {
        self.design.cols()
    }

    fn value(&self, x: &Vector) -> f64 {
        0.5 * (self.design.apply(x) - &self.target).norm_squared()
    }

    fn gradient(&self, x: &Vector) -> Vector {
        self.design.apply_adjoint(&(self.design.apply(x) - &self.target))
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    fn strong_convexity(&self) -> f64 {
        self.strong_convexity
    }
}

/// `min_x f(x) + g(x) + h(Ax)`.
///
/// `spectral_bound` must be an upper bound on `λmax(AᵀA)`; it fixes the inner
/// step size. `experiment_bound`, when set, is the looser value used by
/// [`EtaMode::Experiment`](super::EtaMode::Experiment).
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeProblem {
    f: QuadraticLoss,
    g: ProxTerm,
    h: ProxTerm,
    a: Operator,
    spectral_bound: f64,
    experiment_bound: Option<f64>,
}

impl CompositeProblem {
    pub fn new(f: QuadraticLoss, g: ProxTerm, h: ProxTerm, a: Operator, spectral_bound: f64) -> Result<Self> {
        check_len(a.cols(), f.dim(), "operator columns vs dim(x)")?;
        if let ProxTerm::Group(s) = &g {
            check_len(s.dim(), f.dim(), "g groups vs dim(x)")?;
        }
        if let ProxTerm::Group(s) = &h {
            check_len(s.dim(), a.rows(), "h groups vs operator rows")?;
        }
        if !(spectral_bound >= 0.0) || !spectral_bound.is_finite() {
            return Err(Error::param(
                "spectral_bound",
                format!("must be finite and >= 0, got {spectral_bound}"),
            ));
        }
        Ok(Self {
            f,
            g,
            h,
            a,
            spectral_bound,
            experiment_bound: None,
        })
    }

    pub fn with_experiment_bound(mut self, bound: f64) -> Self {
        self.experiment_bound = Some(bound);
        self
    }

    pub fn f(&self) -> &QuadraticLoss {
        &self.f
    }

    pub fn g(&self) -> &ProxTerm {
        &self.g
    }

    pub fn h(&self) -> &ProxTerm {
        &self.h
    }

    pub fn operator(&self) -> &Operator {
        &self.a
    }

    pub fn spectral_bound(&self) -> f64 {
        self.spectral_bound
    }

    pub fn experiment_bound(&self) -> Option<f64> {
        self.experiment_bound
    }

    /// Dimension of `x`.
    pub fn dim(&self) -> usize {
        self.f.dim()
    }

    /// Dimension of `y = Ax`.
    pub fn dual_dim(&self) -> usize {
        self.a.rows()
    }

    pub fn objective(&self, x: &Vector) -> f64 {
        self.f.value(x) + self.g.value(x) + self.h.value(&self.a.apply(x))
    }

    pub(crate) fn check_x(&self, x: &Vector) -> Result<()> {
        check_len(x.len(), self.dim(), "x")?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("x0", "must be finite"));
        }
        Ok(())
    }

    pub(crate) fn check_lambda(&self, lambda: &Vector) -> Result<()> {
        check_len(lambda.len(), self.dual_dim(), "lambda")
    }
}
