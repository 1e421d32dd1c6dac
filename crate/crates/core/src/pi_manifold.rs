//! Riemannian Π-manifolds presented by Lie-algebra structure constants and a
//! left-invariant `(φ, ξ, η, g)` structure in a fixed frame.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::tensor::{self, basis, inertia, metric_inverse, MetricPair, Rational, Tensor};

/// Structure constants `[b_i, b_j] = Σ_k C[i][j][k] b_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieAlgebra {
    dim: usize,
    constants: Vec<Rational>,
}

impl LieAlgebra {
    pub fn new(dim: usize, constants: Vec<Rational>) -> Result<Self> {
        if dim == 0 || dim.is_multiple_of(2) {
            return Err(Error::DimMismatch(format!("Lie algebra dimension {dim} is not a positive odd number")));
        }
        if constants.len() != dim * dim * dim {
            return Err(Error::DimMismatch(format!(
                "expected {} structure constants, got {}",
                dim * dim * dim,
                constants.len()
            )));
        }
        Ok(LieAlgebra { dim, constants })
    }

    pub fn abelian(dim: usize) -> Result<Self> {
        LieAlgebra::new(dim, vec![Rational::zero(); dim * dim * dim])
    }

    /// Builds constants from `[b_i, b_j]` for `i < j`; the rest follows by
    /// antisymmetry.
    pub fn from_brackets(dim: usize, brackets: &BTreeMap<(usize, usize), Vec<Rational>>) -> Result<Self> {
        let mut constants = vec![Rational::zero(); dim * dim * dim];
        for (&(i, j), v) in brackets {
            if i >= dim || j >= dim || v.len() != dim {
                return Err(Error::DimMismatch(format!("bracket [{i},{j}] does not fit dimension {dim}")));
            }
            for k in 0..dim {
                constants[(i * dim + j) * dim + k] = v[k].clone();
                constants[(j * dim + i) * dim + k] = -v[k].clone();
            }
        }
        LieAlgebra::new(dim, constants)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn c(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.constants[(i * self.dim + j) * self.dim + k]
    }

    /// Coefficients of `[b_i, b_j]`.
    pub fn bracket_basis(&self, i: usize, j: usize) -> &[Rational] {
        let start = (i * self.dim + j) * self.dim;
        &self.constants[start..start + self.dim]
    }

    pub fn bracket(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        let d = self.dim;
        let mut out = vec![Rational::zero(); d];
        for i in (0..d).filter(|&i| !x[i].is_zero()) {
            for j in (0..d).filter(|&j| !y[j].is_zero()) {
                let w = &x[i] * &y[j];
                for (o, c) in out.iter_mut().zip(self.bracket_basis(i, j)) {
                    if !c.is_zero() {
                        *o += &w * c;
                    }
                }
            }
        }
        out
    }

    pub fn is_abelian(&self) -> bool {
        self.constants.iter().all(Zero::is_zero)
    }

    /// `C[i][j][k] + C[j][i][k]`, stored at `[k, i, j]`.
    pub fn antisymmetry_residual(&self) -> Tensor {
        Tensor::from_fn(self.dim, 1, 2, |ix| self.c(ix[1], ix[2], ix[0]) + self.c(ix[2], ix[1], ix[0]))
    }

    /// Cyclic sum `[[b_i,b_j],b_l] + [[b_j,b_l],b_i] + [[b_l,b_i],b_j]`,
    /// stored at `[k, i, j, l]`.
    pub fn jacobi_residual(&self) -> Tensor {
        let d = self.dim;
        let inner = |a: usize, b: usize, c: usize, k: usize| -> Rational {
            (0..d)
                .filter(|&m| !self.c(a, b, m).is_zero())
                .map(|m| self.c(a, b, m) * self.c(m, c, k))
                .sum()
        };
        Tensor::from_fn(d, 1, 3, |ix| {
            let (k, i, j, l) = (ix[0], ix[1], ix[2], ix[3]);
            inner(i, j, l, k) + inner(j, l, i, k) + inner(l, i, j, k)
        })
    }
}

/// The `(φ, ξ, η, g)` structure with `d = 2n + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiStructure {
    n: usize,
    phi: Tensor,
    xi: Tensor,
    eta: Tensor,
    metric: MetricPair,
}

impl PiStructure {
    /// `phi` is stored as `φ^a_i` at `[a, i]`, so `φ(b_i) = Σ_a φ^a_i b_a`.
    pub fn new(phi: Tensor, xi: Tensor, eta: Tensor, g: Tensor) -> Result<Self> {
        phi.require_rank(1, 1)?;
        xi.require_rank(1, 0)?;
        eta.require_rank(0, 1)?;
        g.require_rank(0, 2)?;
        let d = phi.dim();
        if xi.dim() != d || eta.dim() != d || g.dim() != d {
            return Err(Error::DimMismatch("φ, ξ, η, g must share a frame dimension".into()));
        }
        if d < 3 || d.is_multiple_of(2) {
            return Err(Error::DimMismatch(format!("dimension {d} is not of the form 2n+1 with n >= 1")));
        }
        let metric = metric_inverse(&g)?;
        Ok(PiStructure {
            n: (d - 1) / 2,
            phi,
            xi,
            eta,
            metric,
        })
    }

    pub fn dim(&self) -> usize {
        self.phi.dim()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn phi(&self) -> &Tensor {
        &self.phi
    }

    pub fn xi(&self) -> &Tensor {
        &self.xi
    }

    pub fn eta(&self) -> &Tensor {
        &self.eta
    }

    pub fn metric(&self) -> &MetricPair {
        &self.metric
    }

    pub fn xi_vec(&self) -> &[Rational] {
        self.xi.as_slice()
    }

    pub fn phi_vec(&self, x: &[Rational]) -> Vec<Rational> {
        self.phi.apply(&[x])
    }

    pub fn phi2_vec(&self, x: &[Rational]) -> Vec<Rational> {
        self.phi_vec(&self.phi_vec(x))
    }

    pub fn eta_of(&self, x: &[Rational]) -> Rational {
        self.eta.eval(&[x])
    }

    pub fn g(&self, x: &[Rational], y: &[Rational]) -> Rational {
        self.metric.inner(x, y)
    }

    /// `η(x)`-weighted copies of `ξ`.
    pub fn vertical(&self, x: &[Rational]) -> Vec<Rational> {
        tensor::vec_scale(&self.eta_of(x), self.xi_vec())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiManifoldInstance {
    pub algebra: LieAlgebra,
    pub structure: PiStructure,
    pub name: String,
    /// Named parameters the instance was instantiated with, if any.
    pub params: BTreeMap<String, Rational>,
}

impl PiManifoldInstance {
    pub fn new(name: impl Into<String>, algebra: LieAlgebra, structure: PiStructure) -> Result<Self> {
        if algebra.dim() != structure.dim() {
            return Err(Error::DimMismatch(format!(
                "algebra dimension {} vs structure dimension {}",
                algebra.dim(),
                structure.dim()
            )));
        }
        Ok(PiManifoldInstance {
            algebra,
            structure,
            name: name.into(),
            params: BTreeMap::new(),
        })
    }

    pub fn with_params(mut self, params: BTreeMap<String, Rational>) -> Self {
        self.params = params;
        self
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn n(&self) -> usize {
        self.structure.n()
    }

    pub fn basis(&self, i: usize) -> Vec<Rational> {
        basis(self.dim(), i)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedResidual {
    pub name: String,
    pub residual: Tensor,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationOutcome {
    pub residuals: Vec<NamedResidual>,
    pub all_zero: bool,
}

impl ValidationOutcome {
    pub fn first_failure(&self) -> Option<&str> {
        self.residuals.iter().find(|r| !r.residual.is_zero()).map(|r| r.name.as_str())
    }
}

/// Names of the validation identities, in evaluation order.
pub const VALIDATION_IDENTITIES: [&str; 11] = [
    "antisymmetry",
    "jacobi",
    "phi-xi",
    "phi-squared",
    "eta-phi",
    "eta-xi",
    "trace-phi",
    "g-compat",
    "g-phi-sym",
    "g-xi-eta",
    "g-xi-xi",
];

pub fn validate(instance: &PiManifoldInstance) -> Result<ValidationOutcome> {
    let s = &instance.structure;
    let d = instance.dim();
    if s.dim() != d {
        return Err(Error::DimMismatch("algebra and structure dimensions differ".into()));
    }
    let phi = s.phi();
    let xi = s.xi_vec();
    let e: Vec<Vec<Rational>> = (0..d).map(|i| basis(d, i)).collect();
    let phi_e: Vec<Vec<Rational>> = e.iter().map(|b| s.phi_vec(b)).collect();
    let one = Rational::one();

    let phi_xi = Tensor::vector(s.phi_vec(xi));
    // φ² − I + η⊗ξ as a (1,1) tensor at [a, i]
    let phi_squared = Tensor::from_fn(d, 1, 1, |ix| {
        let (a, i) = (ix[0], ix[1]);
        let phi2 = s.phi_vec(&phi_e[i]);
        let id = if a == i { one.clone() } else { Rational::zero() };
        &phi2[a] - id + s.eta().get(&[i]) * &xi[a]
    });
    let eta_phi = Tensor::covector(phi_e.iter().map(|v| s.eta_of(v)).collect());
    let eta_xi = Tensor::scalar_in(d, s.eta_of(xi) - &one);
    let trace_phi = Tensor::scalar_in(d, (0..d).map(|i| phi.get(&[i, i]).clone()).sum());
    let g_compat = Tensor::from_fn(d, 0, 2, |ix| {
        let (i, j) = (ix[0], ix[1]);
        s.g(&phi_e[i], &phi_e[j]) - s.g(&e[i], &e[j]) + s.eta().get(&[i]) * s.eta().get(&[j])
    });
    let g_phi_sym = Tensor::from_fn(d, 0, 2, |ix| s.g(&phi_e[ix[0]], &e[ix[1]]) - s.g(&e[ix[0]], &phi_e[ix[1]]));
    let g_xi_eta = Tensor::covector((0..d).map(|i| s.g(&e[i], xi) - s.eta().get(&[i])).collect());
    let g_xi_xi = Tensor::scalar_in(d, s.g(xi, xi) - &one);

    let residuals: Vec<NamedResidual> = [
        instance.algebra.antisymmetry_residual(),
        instance.algebra.jacobi_residual(),
        phi_xi,
        phi_squared,
        eta_phi,
        eta_xi,
        trace_phi,
        g_compat,
        g_phi_sym,
        g_xi_eta,
        g_xi_xi,
    ]
    .into_iter()
    .zip(VALIDATION_IDENTITIES)
    .map(|(residual, name)| NamedResidual {
        name: name.to_string(),
        residual,
    })
    .collect();
    let all_zero = residuals.iter().all(|r| r.residual.is_zero());
    Ok(ValidationOutcome { residuals, all_zero })
}

/// Validates and turns the first failing identity into an error.
pub fn ensure_valid(instance: &PiManifoldInstance) -> Result<()> {
    let outcome = validate(instance)?;
    match outcome.first_failure() {
        Some(name) => Err(Error::Validation { identity: name.to_string() }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedMetrics {
    /// `g̃(x,y) = g(x,φy) + η(x)η(y)`
    pub g_tilde: Tensor,
    /// `g*(x,y) = g(x,φy)`
    pub g_star: Tensor,
    /// `g**(x,y) = g(φx,φy)`
    pub g_star_star: Tensor,
}

pub fn derived_metrics(instance: &PiManifoldInstance) -> DerivedMetrics {
    let s = &instance.structure;
    let d = instance.dim();
    let e: Vec<Vec<Rational>> = (0..d).map(|i| basis(d, i)).collect();
    let phi_e: Vec<Vec<Rational>> = e.iter().map(|b| s.phi_vec(b)).collect();
    let g_star = Tensor::from_fn(d, 0, 2, |ix| s.g(&e[ix[0]], &phi_e[ix[1]]));
    let g_tilde = Tensor::from_fn(d, 0, 2, |ix| g_star.get(ix) + s.eta().get(&[ix[0]]) * s.eta().get(&[ix[1]]));
    let g_star_star = Tensor::from_fn(d, 0, 2, |ix| s.g(&phi_e[ix[0]], &phi_e[ix[1]]));
    DerivedMetrics {
        g_tilde,
        g_star,
        g_star_star,
    }
}

/// Inertia `(positive, negative, zero)` of the associated metric `g̃`.
pub fn associated_metric_signature(instance: &PiManifoldInstance) -> Result<(usize, usize, usize)> {
    inertia(&derived_metrics(instance).g_tilde)
}

/// Splits `x` into `(φ²x, η(x)ξ)`.
pub fn project(instance: &PiManifoldInstance, x: &Tensor) -> Result<(Tensor, Tensor)> {
    x.require_rank(1, 0)?;
    if x.dim() != instance.dim() {
        return Err(Error::DimMismatch(format!("vector {} vs instance {}", x.dim(), instance.dim())));
    }
    let s = &instance.structure;
    let horizontal = s.phi2_vec(x.as_slice());
    let vertical = s.vertical(x.as_slice());
    Ok((Tensor::vector(horizontal), Tensor::vector(vertical)))
}
