//! Levi-Civita connection from the Koszul formula and the invariants built on
//! it: the fundamental tensor `F`, Lee forms, the Nijenhuis pair and the
//! curvature bundle of an arbitrary connection.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::pi_manifold::PiManifoldInstance;
use crate::tensor::{basis, covariant_derivative, frac, sharp, vec_combine, Rational, Tensor};

/// Frame coefficients `D_{b_i} b_j = Σ_k Γ[i][j][k] b_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Connection {
    dim: usize,
    gamma: Vec<Rational>,
    pub label: String,
}

pub const LEVI_CIVITA: &str = "levi-civita";
pub const FIRST_NATURAL: &str = "first-natural";

impl Connection {
    pub fn new(dim: usize, gamma: Vec<Rational>, label: impl Into<String>) -> Result<Self> {
        if gamma.len() != dim * dim * dim {
            return Err(Error::DimMismatch(format!(
                "connection over dimension {dim} needs {} coefficients, got {}",
                dim * dim * dim,
                gamma.len()
            )));
        }
        Ok(Connection {
            dim,
            gamma,
            label: label.into(),
        })
    }

    pub fn from_fn(dim: usize, label: impl Into<String>, mut f: impl FnMut(usize, usize, usize) -> Rational) -> Self {
        let mut gamma = Vec::with_capacity(dim * dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    gamma.push(f(i, j, k));
                }
            }
        }
        Connection {
            dim,
            gamma,
            label: label.into(),
        }
    }

    /// The flat connection with all coefficients zero.
    pub fn zero(dim: usize) -> Self {
        Connection::from_fn(dim, "zero", |_, _, _| Rational::zero())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeff(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.gamma[(i * self.dim + j) * self.dim + k]
    }

    /// Coefficients of `D_{b_i} b_j`.
    pub fn derivative_basis(&self, i: usize, j: usize) -> &[Rational] {
        let start = (i * self.dim + j) * self.dim;
        &self.gamma[start..start + self.dim]
    }

    /// `D_x y` for left-invariant `x`, `y`.
    pub fn apply(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        let d = self.dim;
        let mut out = vec![Rational::zero(); d];
        for i in (0..d).filter(|&i| !x[i].is_zero()) {
            for j in (0..d).filter(|&j| !y[j].is_zero()) {
                let w = &x[i] * &y[j];
                for (o, c) in out.iter_mut().zip(self.derivative_basis(i, j)) {
                    if !c.is_zero() {
                        *o += &w * c;
                    }
                }
            }
        }
        out
    }

    /// `D − other` as a `(1,2)` tensor stored at `[k, i, j]`.
    pub fn difference(&self, other: &Connection) -> Result<Tensor> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch(format!("{} vs {}", self.dim, other.dim)));
        }
        Ok(Tensor::from_fn(self.dim, 1, 2, |ix| {
            self.coeff(ix[1], ix[2], ix[0]) - other.coeff(ix[1], ix[2], ix[0])
        }))
    }

    /// `D_x y + Q(x, y)` for a `(1,2)` tensor `Q` stored at `[k, i, j]`.
    pub fn shifted(&self, potential: &Tensor, label: impl Into<String>) -> Result<Connection> {
        potential.require_rank(1, 2)?;
        if potential.dim() != self.dim {
            return Err(Error::DimMismatch(format!("{} vs {}", potential.dim(), self.dim)));
        }
        Ok(Connection::from_fn(self.dim, label, |i, j, k| {
            self.coeff(i, j, k) + potential.get(&[k, i, j])
        }))
    }

    pub fn nonzero(&self) -> Vec<(usize, usize, Vec<Rational>)> {
        let d = self.dim;
        let mut out = Vec::new();
        for i in 0..d {
            for j in 0..d {
                let v = self.derivative_basis(i, j);
                if v.iter().any(|c| !c.is_zero()) {
                    out.push((i, j, v.to_vec()));
                }
            }
        }
        out
    }
}

pub(crate) fn frame(instance: &PiManifoldInstance) -> (Vec<Vec<Rational>>, Vec<Vec<Rational>>) {
    let d = instance.dim();
    let e: Vec<Vec<Rational>> = (0..d).map(|i| basis(d, i)).collect();
    let phi_e = e.iter().map(|b| instance.structure.phi_vec(b)).collect();
    (e, phi_e)
}

/// Levi-Civita connection of a left-invariant metric:
/// `2g(∇_{b_i}b_j, b_k) = g([b_i,b_j],b_k) − g([b_j,b_k],b_i) + g([b_k,b_i],b_j)`.
pub fn koszul_levi_civita(instance: &PiManifoldInstance) -> Result<Connection> {
    let conn = koszul_unchecked(instance);
    let (torsion, metric) = levi_civita_residuals(instance, &conn)?;
    if !torsion.is_zero() {
        return Err(Error::LemmaViolation("lc.torsion-free".into()));
    }
    if !metric.is_zero() {
        return Err(Error::LemmaViolation("lc.metric".into()));
    }
    Ok(conn)
}

pub(crate) fn koszul_unchecked(instance: &PiManifoldInstance) -> Connection {
    let d = instance.dim();
    let s = &instance.structure;
    let alg = &instance.algebra;
    let (e, _) = frame(instance);
    let half = frac(1, 2);
    // lowered[i][j][k] = g(∇_{b_i} b_j, b_k)
    let mut lowered = vec![Rational::zero(); d * d * d];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let v = s.g(alg.bracket_basis(i, j), &e[k]) - s.g(alg.bracket_basis(j, k), &e[i])
                    + s.g(alg.bracket_basis(k, i), &e[j]);
                lowered[(i * d + j) * d + k] = &half * v;
            }
        }
    }
    let ginv = &s.metric().g_inv;
    Connection::from_fn(d, LEVI_CIVITA, |i, j, m| {
        (0..d)
            .map(|k| ginv.get(&[m, k]) * &lowered[(i * d + j) * d + k])
            .sum()
    })
}

/// Torsion `Γ[i][j] − Γ[j][i] − C[i][j]` at `[k, i, j]` and `∇g`.
pub fn levi_civita_residuals(instance: &PiManifoldInstance, conn: &Connection) -> Result<(Tensor, Tensor)> {
    let d = instance.dim();
    let alg = &instance.algebra;
    let torsion = Tensor::from_fn(d, 1, 2, |ix| {
        let (k, i, j) = (ix[0], ix[1], ix[2]);
        conn.coeff(i, j, k) - conn.coeff(j, i, k) - alg.c(i, j, k)
    });
    let metric = covariant_derivative(&instance.structure.metric().g, conn)?;
    Ok((torsion, metric))
}

/// `∇φ` as a `(1,2)` tensor at `[a, x, y]`, i.e. `((∇_x φ) y)^a`.
pub fn nabla_phi(instance: &PiManifoldInstance, conn: &Connection) -> Result<Tensor> {
    covariant_derivative(instance.structure.phi(), conn)
}

/// `F(x,y,z) = g((∇_x φ) y, z)`.
pub fn fundamental_tensor(instance: &PiManifoldInstance, conn: &Connection) -> Result<Tensor> {
    let nphi = nabla_phi(instance, conn)?;
    let d = instance.dim();
    let g = &instance.structure.metric().g;
    Ok(Tensor::from_fn(d, 0, 3, |ix| {
        (0..d)
            .filter(|&a| !nphi.get(&[a, ix[0], ix[1]]).is_zero())
            .map(|a| nphi.get(&[a, ix[0], ix[1]]) * g.get(&[a, ix[2]]))
            .sum()
    }))
}

/// Residuals of the general symmetry properties of `F`.
///
/// Order: `F(x,y,z) − F(x,z,y)`;
/// `F(x,y,z) + F(x,φy,φz) − η(y)F(x,ξ,z) − η(z)F(x,y,ξ)`;
/// `F(x,y,φz) + F(x,φy,z) − η(z)F(x,φy,ξ) − η(y)F(x,φz,ξ)`;
/// `F(x,φy,φz) + F(x,φ²y,φ²z)`; `F(x,φy,φ²z) + F(x,φ²y,φz)`.
pub fn f_symmetry_residuals(instance: &PiManifoldInstance, f: &Tensor) -> [Tensor; 5] {
    let d = instance.dim();
    let s = &instance.structure;
    let (e, phi_e) = frame(instance);
    let phi2_e: Vec<Vec<Rational>> = phi_e.iter().map(|v| s.phi_vec(v)).collect();
    let xi = s.xi_vec();
    let eta = |i: usize| s.eta().get(&[i]).clone();
    let sym23 = Tensor::from_fn(d, 0, 3, |ix| f.get(ix) - f.get(&[ix[0], ix[2], ix[1]]));
    let phi_phi = Tensor::from_fn(d, 0, 3, |ix| {
        let (x, y, z) = (&e[ix[0]], ix[1], ix[2]);
        f.get(ix) + f.eval(&[x, &phi_e[y], &phi_e[z]]) - eta(y) * f.eval(&[x, xi, &e[z]]) - eta(z) * f.eval(&[x, &e[y], xi])
    });
    let phi_z = Tensor::from_fn(d, 0, 3, |ix| {
        let (x, y, z) = (&e[ix[0]], ix[1], ix[2]);
        f.eval(&[x, &e[y], &phi_e[z]]) + f.eval(&[x, &phi_e[y], &e[z]])
            - eta(z) * f.eval(&[x, &phi_e[y], xi])
            - eta(y) * f.eval(&[x, &phi_e[z], xi])
    });
    let phi2 = Tensor::from_fn(d, 0, 3, |ix| {
        let x = &e[ix[0]];
        f.eval(&[x, &phi_e[ix[1]], &phi_e[ix[2]]]) + f.eval(&[x, &phi2_e[ix[1]], &phi2_e[ix[2]]])
    });
    let phi_phi2 = Tensor::from_fn(d, 0, 3, |ix| {
        let x = &e[ix[0]];
        f.eval(&[x, &phi_e[ix[1]], &phi2_e[ix[2]]]) + f.eval(&[x, &phi2_e[ix[1]], &phi_e[ix[2]]])
    });
    [sym23, phi_phi, phi_z, phi2, phi_phi2]
}

/// Lee forms of `F` and the metric duals of `θ` and `ω`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeeForms {
    pub theta: Tensor,
    pub theta_star: Tensor,
    pub omega: Tensor,
    pub theta_sharp: Tensor,
    pub omega_sharp: Tensor,
}

impl LeeForms {
    pub fn theta_xi(&self, instance: &PiManifoldInstance) -> Rational {
        self.theta.eval(&[instance.structure.xi_vec()])
    }

    pub fn theta_star_xi(&self, instance: &PiManifoldInstance) -> Rational {
        self.theta_star.eval(&[instance.structure.xi_vec()])
    }

    pub fn is_zero(&self) -> bool {
        self.theta.is_zero() && self.theta_star.is_zero() && self.omega.is_zero()
    }
}

/// `θ(z) = g^{ij}F(b_i,b_j,z)`, `θ*(z) = g^{ij}F(b_i,φb_j,z)` traced over the
/// full frame, and `ω(z) = F(ξ,ξ,z)`.
pub fn lee_forms(instance: &PiManifoldInstance, f: &Tensor) -> Result<LeeForms> {
    let d = instance.dim();
    let s = &instance.structure;
    let metric = s.metric();
    let (e, phi_e) = frame(instance);
    let xi = s.xi_vec();
    let theta = Tensor::covector((0..d).map(|z| metric.trace(|i, j| f.get(&[i, j, z]).clone())).collect());
    let theta_star = Tensor::covector(
        (0..d)
            .map(|z| metric.trace(|i, j| f.eval(&[&e[i], &phi_e[j], &e[z]])))
            .collect(),
    );
    let omega = Tensor::covector((0..d).map(|z| f.eval(&[xi, xi, &e[z]])).collect());
    Ok(LeeForms {
        theta_sharp: sharp(&theta, metric)?,
        omega_sharp: sharp(&omega, metric)?,
        theta,
        theta_star,
        omega,
    })
}

/// `θ` traced only over a horizontal complement of `ξ`, i.e. `θ − ω/g(ξ,ξ)`.
pub fn theta_horizontal(instance: &PiManifoldInstance, lee: &LeeForms) -> Tensor {
    let s = &instance.structure;
    let xi = s.xi_vec();
    let norm = s.g(xi, xi);
    Tensor::covector(
        lee.theta
            .as_slice()
            .iter()
            .zip(lee.omega.as_slice())
            .map(|(t, w)| t - w / &norm)
            .collect(),
    )
}

/// Residuals of `ω(ξ) = 0`, `θ*∘φ = −θ∘φ²`, `θ*∘φ² = −θ∘φ`, the last two with
/// `θ` traced over the horizontal frame. The full-frame `θ` misses them by
/// `ω∘φ²` and `ω∘φ`.
pub fn lee_relation_residuals(instance: &PiManifoldInstance, lee: &LeeForms) -> [Tensor; 3] {
    let d = instance.dim();
    let s = &instance.structure;
    let theta = theta_horizontal(instance, lee);
    let (_, phi_e) = frame(instance);
    let phi2_e: Vec<Vec<Rational>> = phi_e.iter().map(|v| s.phi_vec(v)).collect();
    let omega_xi = Tensor::scalar_in(d, lee.omega.eval(&[s.xi_vec()]));
    let star_phi = Tensor::covector(
        (0..d)
            .map(|x| lee.theta_star.eval(&[&phi_e[x]]) + theta.eval(&[&phi2_e[x]]))
            .collect(),
    );
    let star_phi2 = Tensor::covector(
        (0..d)
            .map(|x| lee.theta_star.eval(&[&phi2_e[x]]) + theta.eval(&[&phi_e[x]]))
            .collect(),
    );
    [omega_xi, star_phi, star_phi2]
}

/// `∇ξ` as `(1,1)` at `[a, x]` (so `∇_{b_x} ξ = Σ_a [a,x] b_a`) and `∇η` as
/// `(0,2)` at `[x, y]`, with the three Levi-Civita lemma identities enforced.
pub fn nabla_xi_eta(instance: &PiManifoldInstance, conn: &Connection) -> Result<(Tensor, Tensor)> {
    let f = fundamental_tensor(instance, conn)?;
    let (nabla_xi, nabla_eta) = nabla_xi_eta_unchecked(instance, conn)?;
    let names = ["xi-eta.dual", "xi-eta.vertical", "xi-eta.fundamental"];
    for (res, name) in lemma_residuals(instance, &nabla_xi, &nabla_eta, &f).iter().zip(names) {
        if !res.is_zero() {
            return Err(Error::LemmaViolation(name.into()));
        }
    }
    Ok((nabla_xi, nabla_eta))
}

pub(crate) fn nabla_xi_eta_unchecked(instance: &PiManifoldInstance, conn: &Connection) -> Result<(Tensor, Tensor)> {
    let s = &instance.structure;
    let nabla_xi = covariant_derivative(s.xi(), conn)?;
    let nabla_eta = covariant_derivative(s.eta(), conn)?;
    Ok((nabla_xi, nabla_eta))
}

/// `(∇_xη)(y) − g(∇_xξ, y)`, `η(∇_xξ)`, `F(x,φy,ξ) + (∇_xη)(y)`.
pub fn lemma_residuals(instance: &PiManifoldInstance, nabla_xi: &Tensor, nabla_eta: &Tensor, f: &Tensor) -> [Tensor; 3] {
    let d = instance.dim();
    let s = &instance.structure;
    let (e, phi_e) = frame(instance);
    let xi = s.xi_vec();
    let nxi = |x: usize| -> Vec<Rational> { (0..d).map(|a| nabla_xi.get(&[a, x]).clone()).collect() };
    let first = Tensor::from_fn(d, 0, 2, |ix| nabla_eta.get(ix) - s.g(&nxi(ix[0]), &e[ix[1]]));
    let second = Tensor::covector((0..d).map(|x| s.eta_of(&nxi(x))).collect());
    let third = Tensor::from_fn(d, 0, 2, |ix| f.eval(&[&e[ix[0]], &phi_e[ix[1]], xi]) + nabla_eta.get(ix));
    [first, second, third]
}

/// Nijenhuis tensor `N` and associated Nijenhuis tensor `Ñ`, both lowered
/// to `(0,3)` with `g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NijenhuisPair {
    pub n: Tensor,
    pub n_assoc: Tensor,
}

/// The pair from the `(1,2)` definitions through `∇φ` and `∇η`.
pub fn nijenhuis_pair(instance: &PiManifoldInstance, conn: &Connection) -> Result<NijenhuisPair> {
    let d = instance.dim();
    let s = &instance.structure;
    let nphi = nabla_phi(instance, conn)?;
    let neta = covariant_derivative(s.eta(), conn)?;
    let (e, phi_e) = frame(instance);
    let xi = s.xi_vec();
    let one = Rational::from_integer(1.into());
    let minus = -one.clone();
    // Halves of the definitions: A(x,y) = (∇_{φx}φ)y − φ(∇_xφ)y − (∇_xη)(y)ξ.
    let half_term = |x: usize, y: usize| -> Vec<Rational> {
        let a = nphi.apply(&[&phi_e[x], &e[y]]);
        let b = s.phi_vec(&nphi.apply(&[&e[x], &e[y]]));
        let c = neta.get(&[x, y]).clone();
        vec_combine(d, &[(one.clone(), &a), (minus.clone(), &b), (-c, xi)])
    };
    let halves: Vec<Vec<Vec<Rational>>> = (0..d).map(|x| (0..d).map(|y| half_term(x, y)).collect()).collect();
    let n = Tensor::from_fn(d, 0, 3, |ix| {
        let v = crate::tensor::vec_sub(&halves[ix[0]][ix[1]], &halves[ix[1]][ix[0]]);
        s.g(&v, &e[ix[2]])
    });
    let n_assoc = Tensor::from_fn(d, 0, 3, |ix| {
        let v = crate::tensor::vec_add(&halves[ix[0]][ix[1]], &halves[ix[1]][ix[0]]);
        s.g(&v, &e[ix[2]])
    });
    Ok(NijenhuisPair { n, n_assoc })
}

/// The pair expressed through `F`:
/// `N(x,y,z) = F(φx,y,z) − F(φy,x,z) − F(x,y,φz) + F(y,x,φz) + η(z){F(x,φy,ξ) − F(y,φx,ξ)}`
/// and the same with the signs of the `y ↔ x` terms flipped for `Ñ`.
pub fn nijenhuis_from_f(instance: &PiManifoldInstance, f: &Tensor) -> NijenhuisPair {
    let d = instance.dim();
    let s = &instance.structure;
    let (e, phi_e) = frame(instance);
    let xi = s.xi_vec();
    let build = |sign: Rational| {
        Tensor::from_fn(d, 0, 3, |ix| {
            let (x, y, z) = (ix[0], ix[1], ix[2]);
            let eta_z = s.eta().get(&[z]);
            f.eval(&[&phi_e[x], &e[y], &e[z]]) + &sign * f.eval(&[&phi_e[y], &e[x], &e[z]])
                - f.eval(&[&e[x], &e[y], &phi_e[z]])
                - &sign * f.eval(&[&e[y], &e[x], &phi_e[z]])
                + eta_z * (f.eval(&[&e[x], &phi_e[y], xi]) + &sign * f.eval(&[&e[y], &phi_e[x], xi]))
        })
    };
    NijenhuisPair {
        n: build(Rational::from_integer((-1).into())),
        n_assoc: build(Rational::from_integer(1.into())),
    }
}

/// `F` rebuilt from the Nijenhuis pair:
/// `¼{N(φx,y,z)+N(φx,z,y)+Ñ(φx,y,z)+Ñ(φx,z,y)} − ½η(x){N(ξ,y,φz)+Ñ(ξ,y,φz)+η(z)Ñ(ξ,ξ,φy)}`.
pub fn reconstruct_f(instance: &PiManifoldInstance, pair: &NijenhuisPair) -> Tensor {
    let d = instance.dim();
    let s = &instance.structure;
    let (e, phi_e) = frame(instance);
    let xi = s.xi_vec();
    let (n, nt) = (&pair.n, &pair.n_assoc);
    let quarter = frac(1, 4);
    let half = frac(1, 2);
    Tensor::from_fn(d, 0, 3, |ix| {
        let (x, y, z) = (ix[0], ix[1], ix[2]);
        let first = n.eval(&[&phi_e[x], &e[y], &e[z]])
            + n.eval(&[&phi_e[x], &e[z], &e[y]])
            + nt.eval(&[&phi_e[x], &e[y], &e[z]])
            + nt.eval(&[&phi_e[x], &e[z], &e[y]]);
        let eta_x = s.eta().get(&[x]);
        let second = if eta_x.is_zero() {
            Rational::zero()
        } else {
            eta_x
                * (n.eval(&[xi, &e[y], &phi_e[z]])
                    + nt.eval(&[xi, &e[y], &phi_e[z]])
                    + s.eta().get(&[z]) * nt.eval(&[xi, xi, &phi_e[y]]))
        };
        &quarter * first - &half * second
    })
}

/// Curvature `(0,4)` tensor with Ricci-type traces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurvatureBundle {
    pub r: Tensor,
    pub ricci: Tensor,
    pub tau: Rational,
    pub ricci_star: Tensor,
    pub tau_star: Rational,
    pub connection_label: String,
}

/// `R(x,y)z = D_xD_yz − D_yD_xz − D_{[x,y]}z`, lowered as
/// `R(x,y,z,w) = g(R(x,y)z, w)`, plus `ρ`, `τ`, `ρ*`, `τ*`.
pub fn curvature_bundle(instance: &PiManifoldInstance, conn: &Connection) -> Result<CurvatureBundle> {
    let d = instance.dim();
    if conn.dim() != d {
        return Err(Error::DimMismatch(format!("connection {} vs instance {}", conn.dim(), d)));
    }
    let r = curvature_tensor(instance, conn);
    Ok(bundle_from_tensor(instance, r, &conn.label))
}

pub(crate) fn curvature_tensor(instance: &PiManifoldInstance, conn: &Connection) -> Tensor {
    let d = instance.dim();
    let alg = &instance.algebra;
    let g = &instance.structure.metric().g;
    // R^m at [m, i, j, k]
    let up = Tensor::from_fn(d, 1, 3, |ix| {
        let (m, i, j, k) = (ix[0], ix[1], ix[2], ix[3]);
        let mut acc = Rational::zero();
        for l in 0..d {
            let a = conn.coeff(j, k, l);
            if !a.is_zero() {
                acc += a * conn.coeff(i, l, m);
            }
            let b = conn.coeff(i, k, l);
            if !b.is_zero() {
                acc -= b * conn.coeff(j, l, m);
            }
            let c = alg.c(i, j, l);
            if !c.is_zero() {
                acc -= c * conn.coeff(l, k, m);
            }
        }
        acc
    });
    Tensor::from_fn(d, 0, 4, |ix| {
        (0..d)
            .filter(|&m| !up.get(&[m, ix[0], ix[1], ix[2]]).is_zero())
            .map(|m| up.get(&[m, ix[0], ix[1], ix[2]]) * g.get(&[m, ix[3]]))
            .sum()
    })
}

/// Ricci-type traces of any curvature-like `(0,4)` tensor.
pub fn bundle_from_tensor(instance: &PiManifoldInstance, r: Tensor, label: &str) -> CurvatureBundle {
    let (ricci, ricci_star) = ricci_pair(instance, &r);
    let metric = instance.structure.metric();
    let tau = metric.trace(|i, j| ricci.get(&[i, j]).clone());
    let tau_star = metric.trace(|i, j| ricci_star.get(&[i, j]).clone());
    CurvatureBundle {
        r,
        ricci,
        tau,
        ricci_star,
        tau_star,
        connection_label: label.to_string(),
    }
}

/// `ρ(x,y) = g^{ij}R(b_i,x,y,b_j)` and `ρ*(x,y) = g^{ij}R(b_i,x,y,φb_j)`.
pub fn ricci_pair(instance: &PiManifoldInstance, r: &Tensor) -> (Tensor, Tensor) {
    let d = instance.dim();
    let metric = instance.structure.metric();
    let (e, phi_e) = frame(instance);
    let ricci = Tensor::from_fn(d, 0, 2, |ix| metric.trace(|i, j| r.get(&[i, ix[0], ix[1], j]).clone()));
    let ricci_star = Tensor::from_fn(d, 0, 2, |ix| {
        metric.trace(|i, j| r.eval(&[&e[i], &e[ix[0]], &e[ix[1]], &phi_e[j]]))
    });
    (ricci, ricci_star)
}

/// Antisymmetry residuals in slots (1,2) and (3,4) and the first Bianchi
/// cyclic sum.
pub fn curvature_symmetry_residuals(r: &Tensor) -> [Tensor; 3] {
    let d = r.dim();
    let a12 = Tensor::from_fn(d, 0, 4, |ix| r.get(ix) + r.get(&[ix[1], ix[0], ix[2], ix[3]]));
    let a34 = Tensor::from_fn(d, 0, 4, |ix| r.get(ix) + r.get(&[ix[0], ix[1], ix[3], ix[2]]));
    let bianchi = Tensor::from_fn(d, 0, 4, |ix| {
        let (x, y, z, w) = (ix[0], ix[1], ix[2], ix[3]);
        r.get(&[x, y, z, w]) + r.get(&[y, z, x, w]) + r.get(&[z, x, y, w])
    });
    [a12, a34, bianchi]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{abelian, build_section5, ExampleParams};
    use crate::tensor::int;

    fn example(l: i64, m: i64) -> PiManifoldInstance {
        build_section5(&ExampleParams::new(int(l), int(m)))
    }

    #[test]
    fn koszul_reproduces_table_entries() {
        let inst = example(1, 1);
        let lc = koszul_levi_civita(&inst).unwrap();
        assert_eq!(lc.derivative_basis(1, 0), basis(5, 3).as_slice());
        let minus_e0: Vec<Rational> = basis(5, 0).iter().map(|x| -x).collect();
        assert_eq!(lc.derivative_basis(1, 3), minus_e0.as_slice());
        assert!(koszul_levi_civita(&abelian(2)).unwrap().nonzero().is_empty());
    }

    #[test]
    fn fundamental_tensor_components() {
        let inst = example(1, 1);
        let lc = koszul_levi_civita(&inst).unwrap();
        let f = fundamental_tensor(&inst, &lc).unwrap();
        assert_eq!(f.get(&[1, 1, 0]), &int(-1));
        assert_eq!(f.get(&[0, 1, 2]), &int(0));
        for r in f_symmetry_residuals(&inst, &f) {
            assert!(r.is_zero());
        }
        let ab = abelian(2);
        let f0 = fundamental_tensor(&ab, &koszul_levi_civita(&ab).unwrap()).unwrap();
        assert!(f0.is_zero());
    }

    #[test]
    fn lee_forms_of_example() {
        let inst = example(2, -3);
        let lc = koszul_levi_civita(&inst).unwrap();
        let f = fundamental_tensor(&inst, &lc).unwrap();
        let lee = lee_forms(&inst, &f).unwrap();
        assert_eq!(lee.theta_xi(&inst), int(-4));
        assert!(lee.omega.is_zero());
        assert_eq!(lee.theta_sharp.as_slice(), &[int(-4), int(0), int(0), int(0), int(0)]);
        for r in lee_relation_residuals(&inst, &lee) {
            assert!(r.is_zero());
        }
        let ab = abelian(2);
        let f0 = fundamental_tensor(&ab, &koszul_levi_civita(&ab).unwrap()).unwrap();
        assert!(lee_forms(&ab, &f0).unwrap().is_zero());
    }

    #[test]
    fn nabla_xi_and_eta() {
        let inst = example(1, 1);
        let lc = koszul_levi_civita(&inst).unwrap();
        let (nxi, neta) = nabla_xi_eta(&inst, &lc).unwrap();
        assert_eq!(nxi.get(&[3, 1]), &int(1));
        assert_eq!(neta.get(&[1, 3]), &int(1));
        let g_star = crate::pi_manifold::derived_metrics(&inst).g_star;
        assert_eq!(neta, g_star);
        let ab = abelian(2);
        let (a, b) = nabla_xi_eta(&ab, &koszul_levi_civita(&ab).unwrap()).unwrap();
        assert!(a.is_zero() && b.is_zero());
    }

    #[test]
    fn nijenhuis_routes_agree() {
        for (l, m) in [(1, 1), (0, 0), (2, -3)] {
            let inst = example(l, m);
            let lc = koszul_levi_civita(&inst).unwrap();
            let f = fundamental_tensor(&inst, &lc).unwrap();
            let direct = nijenhuis_pair(&inst, &lc).unwrap();
            let via_f = nijenhuis_from_f(&inst, &f);
            assert_eq!(direct, via_f);
            let d = inst.dim();
            for x in 0..d {
                for y in 0..d {
                    for z in 0..d {
                        assert_eq!(direct.n.get(&[x, y, z]), &-direct.n.get(&[y, x, z]));
                        assert_eq!(direct.n_assoc.get(&[x, y, z]), direct.n_assoc.get(&[y, x, z]));
                    }
                }
            }
            assert_eq!(reconstruct_f(&inst, &direct), f);
        }
        let ab = abelian(2);
        let pair = nijenhuis_pair(&ab, &koszul_levi_civita(&ab).unwrap()).unwrap();
        assert!(pair.n.is_zero() && pair.n_assoc.is_zero());
        assert!(reconstruct_f(&ab, &pair).is_zero());
    }

    #[test]
    fn levi_civita_curvature_of_example() {
        let inst = example(1, 1);
        let lc = koszul_levi_civita(&inst).unwrap();
        let b = curvature_bundle(&inst, &lc).unwrap();
        assert_eq!(b.r.get(&[0, 1, 0, 1]), &int(1));
        assert_eq!(b.r.get(&[1, 3, 3, 1]), &int(1));
        assert_eq!(b.r.get(&[1, 2, 3, 4]), &int(1));
        assert_eq!(b.ricci.get(&[0, 0]), &int(-4));
        assert_eq!(b.tau, int(-4));
        assert_eq!(b.ricci_star.get(&[1, 3]), &int(-3));
        assert_eq!(b.ricci_star.get(&[2, 4]), &int(-3));
        assert_eq!(b.tau_star, int(0));
        for r in curvature_symmetry_residuals(&b.r) {
            assert!(r.is_zero());
        }
    }

    #[test]
    fn zero_connection_has_zero_derivatives() {
        let inst = abelian(2);
        let zero = Connection::zero(inst.dim());
        let d = covariant_derivative(inst.structure.phi(), &zero).unwrap();
        assert!(d.is_zero());
    }
}
