//! The first natural connection `D¹ = ∇ + Q¹`: potential, naturality,
//! torsion and curvature by independent routes, and the per-class closed
//! forms for `F1`, `F4`, `F5`, `F11`.
//!
//! Closed forms here are evaluators only. Whether they agree with the direct
//! pipeline is decided by the verify module.

use num_traits::Zero;

use crate::classifier::ClassLabel;
use crate::error::{Error, Result};
use crate::levi_civita::{self, frame, Connection, CurvatureBundle, LeeForms, NijenhuisPair, FIRST_NATURAL};
use crate::pi_manifold::{derived_metrics, NamedResidual, PiManifoldInstance, PiStructure};
use crate::tensor::{covariant_derivative, frac, int, kulkarni_nomizu, vec_combine, Rational, Tensor};

/// Frame data shared by the closed-form evaluators.
struct Frame<'a> {
    s: &'a PiStructure,
    d: usize,
    n: Rational,
    e: Vec<Vec<Rational>>,
    phi_e: Vec<Vec<Rational>>,
    phi2_e: Vec<Vec<Rational>>,
    xi: Vec<Rational>,
}

impl<'a> Frame<'a> {
    fn new(instance: &'a PiManifoldInstance) -> Self {
        let s = &instance.structure;
        let (e, phi_e) = frame(instance);
        let phi2_e = phi_e.iter().map(|v| s.phi_vec(v)).collect();
        Frame {
            s,
            d: instance.dim(),
            n: int(instance.n() as i64),
            e,
            phi_e,
            phi2_e,
            xi: s.xi_vec().to_vec(),
        }
    }

    fn eta(&self, i: usize) -> Rational {
        self.s.eta().get(&[i]).clone()
    }

    fn two_n(&self) -> Rational {
        int(2) * &self.n
    }

    fn g(&self, x: &[Rational], y: &[Rational]) -> Rational {
        self.s.g(x, y)
    }

    /// `g(b_i, φb_j)`
    fn g_phi(&self, i: usize, j: usize) -> Rational {
        self.g(&self.e[i], &self.phi_e[j])
    }

    /// `g(φb_i, φb_j)`
    fn g_phiphi(&self, i: usize, j: usize) -> Rational {
        self.g(&self.phi_e[i], &self.phi_e[j])
    }

    /// `θ∘φ` as a 1-form.
    fn compose_phi(&self, form: &Tensor) -> Tensor {
        Tensor::covector(self.phi_e.iter().map(|v| form.eval(&[v])).collect())
    }

    fn compose_phi2(&self, form: &Tensor) -> Tensor {
        Tensor::covector(self.phi2_e.iter().map(|v| form.eval(&[v])).collect())
    }
}

/// Directional derivative `x(f)` of a scalar built from left-invariant data.
/// Such scalars are constant on the group, so this is identically zero; the
/// closed forms still carry the term.
fn frame_derivative(_direction: &[Rational], _value: &Rational) -> Rational {
    Rational::zero()
}

/// Potential of a connection with respect to `∇`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Potential {
    /// `Q(x,y)` as `(1,2)` at `[k, x, y]`
    pub q: Tensor,
    /// `Q(x,y,z) = g(Q(x,y), z)`
    pub q3: Tensor,
}

impl Potential {
    pub fn from_vector_form(instance: &PiManifoldInstance, q: Tensor) -> Self {
        let g = &instance.structure.metric().g;
        let d = instance.dim();
        let q3 = Tensor::from_fn(d, 0, 3, |ix| {
            (0..d)
                .filter(|&k| !q.get(&[k, ix[0], ix[1]]).is_zero())
                .map(|k| q.get(&[k, ix[0], ix[1]]) * g.get(&[k, ix[2]]))
                .sum()
        });
        Potential { q, q3 }
    }

    pub fn apply(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        self.q.apply(&[x, y])
    }
}

/// `Q¹(x,y) = −½{(∇_xφ)φy − (∇_xη)(y)ξ} − η(y)∇_xξ`, with both naturality
/// conditions on the potential enforced.
pub fn first_natural_potential(instance: &PiManifoldInstance, lc: &Connection, f: &Tensor) -> Result<Potential> {
    let potential = first_natural_potential_unchecked(instance, lc)?;
    let [cond_i, cond_ii] = potential_residuals(instance, &potential, f);
    if !cond_i.is_zero() {
        return Err(Error::NaturalityViolation("potential.phi-shift".into()));
    }
    if !cond_ii.is_zero() {
        return Err(Error::NaturalityViolation("potential.skew".into()));
    }
    Ok(potential)
}

pub(crate) fn first_natural_potential_unchecked(instance: &PiManifoldInstance, lc: &Connection) -> Result<Potential> {
    let fr = Frame::new(instance);
    let d = fr.d;
    let nphi = levi_civita::nabla_phi(instance, lc)?;
    let (nabla_xi, nabla_eta) = levi_civita::nabla_xi_eta_unchecked(instance, lc)?;
    let half = frac(1, 2);
    let mut q = Tensor::zeros(d, 1, 2);
    for x in 0..d {
        let nxi: Vec<Rational> = (0..d).map(|a| nabla_xi.get(&[a, x]).clone()).collect();
        for y in 0..d {
            let a = nphi.apply(&[&fr.e[x], &fr.phi_e[y]]);
            let c = nabla_eta.get(&[x, y]).clone();
            let v = vec_combine(
                d,
                &[(-half.clone(), &a), (&half * &c, &fr.xi), (-fr.eta(y), &nxi)],
            );
            for (k, val) in v.into_iter().enumerate() {
                q.set(&[k, x, y], val);
            }
        }
    }
    Ok(Potential::from_vector_form(instance, q))
}

/// `Q(x,y,φz) − Q(x,φy,z) − F(x,y,z)` and `Q(x,y,z) + Q(x,z,y)`.
pub fn potential_residuals(instance: &PiManifoldInstance, potential: &Potential, f: &Tensor) -> [Tensor; 2] {
    let fr = Frame::new(instance);
    let q3 = &potential.q3;
    let first = Tensor::from_fn(fr.d, 0, 3, |ix| {
        let (x, y, z) = (ix[0], ix[1], ix[2]);
        q3.eval(&[&fr.e[x], &fr.e[y], &fr.phi_e[z]]) - q3.eval(&[&fr.e[x], &fr.phi_e[y], &fr.e[z]]) - f.get(ix)
    });
    let second = Tensor::from_fn(fr.d, 0, 3, |ix| q3.get(ix) + q3.get(&[ix[0], ix[2], ix[1]]));
    [first, second]
}


/// `D¹ = ∇ + Q¹`, checked to be natural.
pub fn first_natural_connection(instance: &PiManifoldInstance, lc: &Connection, potential: &Potential) -> Result<Connection> {
    let conn = lc.shifted(&potential.q, FIRST_NATURAL)?;
    for r in naturality_residuals(instance, &conn)? {
        if !r.residual.is_zero() {
            return Err(Error::NaturalityViolation(r.name));
        }
    }
    Ok(conn)
}

/// Names of the naturality residuals, in order.
pub const NATURALITY_TARGETS: [&str; 5] = ["phi", "g", "xi", "eta", "g-tilde"];

/// `Dφ`, `Dg`, `Dξ`, `Dη`, `Dg̃`.
pub fn naturality_residuals(instance: &PiManifoldInstance, conn: &Connection) -> Result<Vec<NamedResidual>> {
    let s = &instance.structure;
    let g_tilde = derived_metrics(instance).g_tilde;
    let targets = [s.phi(), &s.metric().g, s.xi(), s.eta(), &g_tilde];
    targets
        .into_iter()
        .zip(NATURALITY_TARGETS)
        .map(|(t, name)| {
            Ok(NamedResidual {
                name: name.to_string(),
                residual: covariant_derivative(t, conn)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionData {
    /// `T(x,y)` as `(1,2)` at `[k, x, y]`
    pub t: Tensor,
    /// `T(x,y,z) = g(T(x,y), z)`
    pub t3: Tensor,
    /// `t(x) = g^{ij}T(x,b_i,b_j)`
    pub t_form: Tensor,
    /// `t*(x) = g^{ij}T(x,b_i,φb_j)`
    pub t_star: Tensor,
    /// `t̂(x) = T(x,ξ,ξ)`
    pub t_hat: Tensor,
}

/// `T(x,y) = D_xy − D_yx − [x,y]` with its torsion forms traced over the
/// full frame.
pub fn torsion(instance: &PiManifoldInstance, conn: &Connection) -> Result<TorsionData> {
    let d = instance.dim();
    if conn.dim() != d {
        return Err(Error::DimMismatch(format!("connection {} vs instance {}", conn.dim(), d)));
    }
    let alg = &instance.algebra;
    let t = Tensor::from_fn(d, 1, 2, |ix| {
        let (k, x, y) = (ix[0], ix[1], ix[2]);
        conn.coeff(x, y, k) - conn.coeff(y, x, k) - alg.c(x, y, k)
    });
    Ok(torsion_data_from(instance, t))
}

fn torsion_data_from(instance: &PiManifoldInstance, t: Tensor) -> TorsionData {
    let fr = Frame::new(instance);
    let d = fr.d;
    let metric = fr.s.metric();
    let t3 = Potential::from_vector_form(instance, t.clone()).q3;
    let t_form = Tensor::covector((0..d).map(|x| metric.trace(|i, j| t3.get(&[x, i, j]).clone())).collect());
    let t_star = Tensor::covector(
        (0..d)
            .map(|x| metric.trace(|i, j| t3.eval(&[&fr.e[x], &fr.e[i], &fr.phi_e[j]])))
            .collect(),
    );
    let t_hat = Tensor::covector((0..d).map(|x| t3.eval(&[&fr.e[x], &fr.xi, &fr.xi])).collect());
    TorsionData {
        t,
        t3,
        t_form,
        t_star,
        t_hat,
    }
}

/// `T3 − (Q3(x,y,z) − Q3(y,x,z))` and `t̂(ξ)`.
pub fn torsion_potential_residuals(instance: &PiManifoldInstance, torsion: &TorsionData, potential: &Potential) -> [Tensor; 2] {
    let d = instance.dim();
    let q3 = &potential.q3;
    let antisym = Tensor::from_fn(d, 0, 3, |ix| torsion.t3.get(ix) - q3.get(ix) + q3.get(&[ix[1], ix[0], ix[2]]));
    let t_hat_xi = Tensor::scalar_in(d, torsion.t_hat.eval(&[instance.structure.xi_vec()]));
    [antisym, t_hat_xi]
}

/// `Ṫ(x,y,z)` from `F`:
/// `−½{F(x,φy,z) − F(y,φx,z)} − ½η(z){F(x,φy,ξ) − F(y,φx,ξ)} + η(y)F(x,φz,ξ) − η(x)F(y,φz,ξ)`.
pub fn torsion_from_f(instance: &PiManifoldInstance, f: &Tensor) -> Tensor {
    let fr = Frame::new(instance);
    let half = frac(1, 2);
    let xi = &fr.xi;
    Tensor::from_fn(fr.d, 0, 3, |ix| {
        let (x, y, z) = (ix[0], ix[1], ix[2]);
        let (ex, ey, ez) = (&fr.e[x], &fr.e[y], &fr.e[z]);
        let (px, py, pz) = (&fr.phi_e[x], &fr.phi_e[y], &fr.phi_e[z]);
        -&half * (f.eval(&[ex, py, ez]) - f.eval(&[ey, px, ez]))
            - &half * fr.eta(z) * (f.eval(&[ex, py, xi]) - f.eval(&[ey, px, xi]))
            + fr.eta(y) * f.eval(&[ex, pz, xi])
            - fr.eta(x) * f.eval(&[ey, pz, xi])
    })
}

/// `Ṫ(x,y,z)` from the Nijenhuis pair.
pub fn torsion_from_nijenhuis(instance: &PiManifoldInstance, pair: &NijenhuisPair) -> Tensor {
    let fr = Frame::new(instance);
    let (n, nt) = (&pair.n, &pair.n_assoc);
    let xi = &fr.xi;
    let eighth = frac(1, 8);
    let quarter = frac(1, 4);
    let two = int(2);
    Tensor::from_fn(fr.d, 0, 3, |ix| {
        let (x, y, z) = (ix[0], ix[1], ix[2]);
        let (px, py, pz) = (&fr.phi_e[x], &fr.phi_e[y], &fr.phi_e[z]);
        let ez = &fr.e[z];
        let a = &two * n.eval(&[px, py, ez]) + n.eval(&[px, ez, py]) - n.eval(&[py, ez, px]) + nt.eval(&[px, ez, py])
            - nt.eval(&[py, ez, px]);
        let b = &two * n.eval(&[xi, py, pz]) - n.eval(&[py, pz, xi])
            + &two * fr.eta(z) * nt.eval(&[xi, xi, &fr.phi2_e[y]])
            - nt.eval(&[py, pz, xi]);
        let c = &two * n.eval(&[xi, px, pz]) - n.eval(&[px, pz, xi])
            + &two * fr.eta(z) * nt.eval(&[xi, xi, &fr.phi2_e[x]])
            - nt.eval(&[px, pz, xi]);
        let dd = &two * n.eval(&[px, py, xi]) + n.eval(&[px, xi, py]) - n.eval(&[py, xi, px]) + nt.eval(&[px, xi, py])
            - nt.eval(&[py, xi, px]);
        -&eighth * a + &quarter * fr.eta(x) * b - &quarter * fr.eta(y) * c - &eighth * fr.eta(z) * dd
    })
}

fn require_main(label: ClassLabel) -> Result<()> {
    if label.is_main() {
        Ok(())
    } else {
        Err(Error::UnsupportedClass(label))
    }
}

/// Class-wise expression of `Ṫ(x,y)` through the torsion forms of `D¹`.
pub fn torsion_from_forms(instance: &PiManifoldInstance, label: ClassLabel, torsion: &TorsionData) -> Result<Tensor> {
    require_main(label)?;
    let fr = Frame::new(instance);
    let d = fr.d;
    let two_n = fr.two_n();
    let (t, ts, th) = (&torsion.t_form, &torsion.t_star, &torsion.t_hat);
    let vector = |x: usize, y: usize| -> Vec<Rational> {
        let (px, py) = (&fr.phi_e[x], &fr.phi_e[y]);
        let (p2x, p2y) = (&fr.phi2_e[x], &fr.phi2_e[y]);
        match label {
            ClassLabel::F1 => {
                let v = vec_combine(
                    d,
                    &[
                        (t.eval(&[p2y]), p2x),
                        (-t.eval(&[p2x]), p2y),
                        (t.eval(&[px]), py),
                        (-t.eval(&[py]), px),
                    ],
                );
                v.iter().map(|c| -c / &two_n).collect()
            }
            ClassLabel::F4 => {
                let c = -ts.eval(&[&fr.xi]) / &two_n;
                vec_combine(d, &[(&c * fr.eta(y), px), (-&c * fr.eta(x), py)])
            }
            ClassLabel::F5 => {
                let c = -t.eval(&[&fr.xi]) / &two_n;
                vec_combine(d, &[(&c * fr.eta(y), p2x), (-&c * fr.eta(x), p2y)])
            }
            _ => {
                let s = fr.eta(y) * th.get(&[x]) - fr.eta(x) * th.get(&[y]);
                vec_combine(d, &[(s, &fr.xi)])
            }
        }
    };
    Ok(vector_field_tensor(d, vector))
}

fn vector_field_tensor(d: usize, mut f: impl FnMut(usize, usize) -> Vec<Rational>) -> Tensor {
    let mut t = Tensor::zeros(d, 1, 2);
    for x in 0..d {
        for y in 0..d {
            for (k, v) in f(x, y).into_iter().enumerate() {
                t.set(&[k, x, y], v);
            }
        }
    }
    t
}

/// Lowers a `(1,2)` tensor with `g`.
pub fn lower_12(instance: &PiManifoldInstance, t: &Tensor) -> Tensor {
    Potential::from_vector_form(instance, t.clone()).q3
}

/// The named torsion-form relations, in order:
/// `ṫ(x) − ½θ(φx) + θ*(ξ)η(x)`, `ṫ*(x) − ½θ*(φx) + θ(ξ)η(x)`, `t̂(x) − ω(φx)`,
/// `ṫ*∘φ + ṫ∘φ²`, `2ṫ∘φ − θ∘φ²`, `2ṫ∘φ² − θ∘φ`, `2ṫ*∘φ − θ*∘φ²`, `2ṫ*∘φ² − θ*∘φ`.
/// `ṫ` and `θ` are traced over the horizontal frame here.
pub fn torsion_form_relations(instance: &PiManifoldInstance, lee: &LeeForms, torsion: &TorsionData) -> Vec<NamedResidual> {
    let fr = Frame::new(instance);
    let d = fr.d;
    let half = frac(1, 2);
    let two = int(2);
    let theta_xi = lee.theta_xi(instance);
    let theta_star_xi = lee.theta_star_xi(instance);
    let xi_norm = fr.g(&fr.xi, &fr.xi);
    let t = &Tensor::covector((0..d).map(|x| torsion.t_form.get(&[x]) - torsion.t_hat.get(&[x]) / &xi_norm).collect());
    let theta = &levi_civita::theta_horizontal(instance, lee);
    let (ts, th) = (&torsion.t_star, &torsion.t_hat);
    let (theta_star, omega) = (&lee.theta_star, &lee.omega);
    let form = |f: &dyn Fn(usize) -> Rational| Tensor::covector((0..d).map(f).collect());
    let p = |x: usize| &fr.phi_e[x];
    let p2 = |x: usize| &fr.phi2_e[x];
    let entries: Vec<(&str, Tensor)> = vec![
        ("tforms.t", form(&|x| t.get(&[x]) - &half * theta.eval(&[p(x)]) + &theta_star_xi * fr.eta(x))),
        ("tforms.t-star", form(&|x| ts.get(&[x]) - &half * theta_star.eval(&[p(x)]) + &theta_xi * fr.eta(x))),
        ("tforms.t-hat", form(&|x| th.get(&[x]) - omega.eval(&[p(x)]))),
        ("tforms.tstar-phi", form(&|x| ts.eval(&[p(x)]) + t.eval(&[p2(x)]))),
        ("tforms.t-phi", form(&|x| &two * t.eval(&[p(x)]) - theta.eval(&[p2(x)]))),
        ("tforms.t-phi2", form(&|x| &two * t.eval(&[p2(x)]) - theta.eval(&[p(x)]))),
        ("tforms.tstar-phi-theta", form(&|x| &two * ts.eval(&[p(x)]) - theta_star.eval(&[p2(x)]))),
        ("tforms.tstar-phi2-theta", form(&|x| &two * ts.eval(&[p2(x)]) - theta_star.eval(&[p(x)]))),
    ];
    entries
        .into_iter()
        .map(|(name, residual)| NamedResidual {
            name: name.to_string(),
            residual,
        })
        .collect()
}

/// `Ṙ = R + (∇_xQ)(y,z,w) − (∇_yQ)(x,z,w) + g(Q(x,z),Q(y,w)) − g(Q(y,z),Q(x,w))`,
/// checked against the curvature of `D¹` computed directly.
pub fn curvature_via_potential(
    instance: &PiManifoldInstance,
    lc_bundle: &CurvatureBundle,
    potential: &Potential,
    lc: &Connection,
) -> Result<Tensor> {
    let via = curvature_via_potential_unchecked(instance, lc_bundle, potential, lc)?;
    let fnc = lc.shifted(&potential.q, FIRST_NATURAL)?;
    let direct = levi_civita::curvature_tensor(instance, &fnc);
    if via != direct {
        return Err(Error::IdentityViolation("curv.D1.via-potential".into()));
    }
    Ok(via)
}

pub(crate) fn curvature_via_potential_unchecked(
    instance: &PiManifoldInstance,
    lc_bundle: &CurvatureBundle,
    potential: &Potential,
    lc: &Connection,
) -> Result<Tensor> {
    let d = instance.dim();
    let s = &instance.structure;
    let nq = covariant_derivative(&potential.q3, lc)?;
    let e: Vec<Vec<Rational>> = (0..d).map(|i| crate::tensor::basis(d, i)).collect();
    let qv: Vec<Vec<Vec<Rational>>> = (0..d)
        .map(|x| (0..d).map(|y| potential.apply(&e[x], &e[y])).collect())
        .collect();
    Ok(Tensor::from_fn(d, 0, 4, |ix| {
        let (x, y, z, w) = (ix[0], ix[1], ix[2], ix[3]);
        lc_bundle.r.get(ix) + nq.get(&[x, y, z, w]) - nq.get(&[y, x, z, w]) + s.g(&qv[x][z], &qv[y][w])
            - s.g(&qv[y][z], &qv[x][w])
    }))
}

/// `D¹` from the class-wise closed form.
pub fn closed_form_connection(
    instance: &PiManifoldInstance,
    label: ClassLabel,
    lee: &LeeForms,
    lc: &Connection,
) -> Result<Connection> {
    require_main(label)?;
    let fr = Frame::new(instance);
    let d = fr.d;
    let two_n = fr.two_n();
    let four_n = int(2) * &two_n;
    let theta = &lee.theta;
    let theta_sharp = lee.theta_sharp.as_slice();
    let phi_ts = fr.s.phi_vec(theta_sharp);
    let phi2_ts = fr.s.phi_vec(&phi_ts);
    let omega_sharp = lee.omega_sharp.as_slice();
    let phi_ws = fr.s.phi_vec(omega_sharp);
    let q = vector_field_tensor(d, |x, y| {
        let (px, py) = (&fr.phi_e[x], &fr.phi_e[y]);
        match label {
            ClassLabel::F1 => {
                let v = vec_combine(
                    d,
                    &[
                        (theta.eval(&[py]), &fr.phi2_e[x]),
                        (-theta.eval(&[&fr.phi2_e[y]]), px),
                        (fr.g_phi(x, y), &phi2_ts),
                        (-fr.g_phiphi(x, y), &phi_ts),
                    ],
                );
                v.iter().map(|c| -c / &four_n).collect()
            }
            ClassLabel::F4 => {
                let c = -lee.theta_xi(instance) / &two_n;
                vec_combine(d, &[(&c * fr.g_phi(x, y), &fr.xi), (-&c * fr.eta(y), px)])
            }
            ClassLabel::F5 => {
                let c = -lee.theta_star_xi(instance) / &two_n;
                vec_combine(d, &[(&c * fr.g_phiphi(x, y), &fr.xi), (-&c * fr.eta(y), &fr.phi2_e[x])])
            }
            _ => {
                let c = -fr.eta(x);
                vec_combine(d, &[(&c * lee.omega.eval(&[py]), &fr.xi), (-&c * fr.eta(y), &phi_ws)])
            }
        }
    });
    lc.shifted(&q, format!("first-natural/{label}"))
}

/// `Ṫ(x,y)` from the class-wise closed form in the Lee forms.
pub fn closed_form_torsion(instance: &PiManifoldInstance, label: ClassLabel, lee: &LeeForms) -> Result<Tensor> {
    require_main(label)?;
    let fr = Frame::new(instance);
    let d = fr.d;
    let two_n = fr.two_n();
    let four_n = int(2) * &two_n;
    let theta = &lee.theta;
    Ok(vector_field_tensor(d, |x, y| {
        let (px, py) = (&fr.phi_e[x], &fr.phi_e[y]);
        let (p2x, p2y) = (&fr.phi2_e[x], &fr.phi2_e[y]);
        match label {
            ClassLabel::F1 => {
                let v = vec_combine(
                    d,
                    &[
                        (theta.eval(&[py]), p2x),
                        (-theta.eval(&[px]), p2y),
                        (theta.eval(&[p2x]), py),
                        (-theta.eval(&[p2y]), px),
                    ],
                );
                v.iter().map(|c| -c / &four_n).collect()
            }
            ClassLabel::F4 => {
                let c = lee.theta_xi(instance) / &two_n;
                vec_combine(d, &[(&c * fr.eta(y), px), (-&c * fr.eta(x), py)])
            }
            ClassLabel::F5 => {
                let c = lee.theta_star_xi(instance) / &two_n;
                vec_combine(d, &[(&c * fr.eta(y), p2x), (-&c * fr.eta(x), p2y)])
            }
            _ => {
                let s = fr.eta(y) * lee.omega.eval(&[px]) - fr.eta(x) * lee.omega.eval(&[py]);
                vec_combine(d, &[(s, &fr.xi)])
            }
        }
    }))
}

/// Value of a closed-form curvature together with the auxiliary `(0,2)`
/// tensors it was built from (`S1`, `S2` for `F1`, `S3` for `F11`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedFormCurvature {
    pub r: Tensor,
    pub auxiliary: Vec<(String, Tensor)>,
}

/// `(η⊗η)⊼P` style products and friends, evaluated with `ξ` in the first slot.
fn kn_with_first(kn: &Tensor, fr: &Frame<'_>, first: &[Rational], y: usize, z: usize, w: usize) -> Rational {
    kn.eval(&[first, &fr.e[y], &fr.e[z], &fr.e[w]])
}

/// `Ṙ` from the class-wise closed form.
pub fn closed_form_curvature(
    instance: &PiManifoldInstance,
    label: ClassLabel,
    lee: &LeeForms,
    lc: &Connection,
    lc_bundle: &CurvatureBundle,
) -> Result<ClosedFormCurvature> {
    require_main(label)?;
    let fr = Frame::new(instance);
    let d = fr.d;
    let n = &fr.n;
    let two_n = fr.two_n();
    let four_n = int(2) * &two_n;
    let eight_n2 = int(8) * n * n;
    let metrics = derived_metrics(instance);
    let g = &fr.s.metric().g;
    let eta_eta = fr.s.eta().outer(fr.s.eta())?;
    let r = &lc_bundle.r;
    match label {
        ClassLabel::F1 => {
            let theta = &lee.theta;
            let th_phi = fr.compose_phi(theta);
            let th_phi2 = fr.compose_phi2(theta);
            let n_th_phi2 = covariant_derivative(&th_phi2, lc)?;
            let n_th_phi = covariant_derivative(&th_phi, lc)?;
            let s1 = Tensor::from_fn(d, 0, 2, |ix| {
                let (x, y) = (ix[0], ix[1]);
                n_th_phi2.get(ix)
                    + (th_phi.get(&[x]) * th_phi2.get(&[y]) + th_phi2.get(&[x]) * th_phi.get(&[y])) / &four_n
            });
            let s2 = Tensor::from_fn(d, 0, 2, |ix| {
                let (x, y) = (ix[0], ix[1]);
                n_th_phi.get(ix)
                    + (th_phi2.get(&[x]) * th_phi2.get(&[y]) + th_phi.get(&[x]) * th_phi.get(&[y])) / &four_n
            });
            let ts = lee.theta_sharp.as_slice();
            let th_phi_ts = theta.eval(&[&fr.s.phi_vec(ts)]);
            let th_phi2_ts = theta.eval(&[&fr.s.phi2_vec(ts)]);
            let (gs, gss, gt) = (&metrics.g_star, &metrics.g_star_star, &metrics.g_tilde);
            let a = kulkarni_nomizu(gs, &s1)?.minus(&kulkarni_nomizu(gss, &s2)?);
            let b = kulkarni_nomizu(gs, gss)?.scaled(&th_phi_ts);
            let c = kulkarni_nomizu(g, gss)?
                .plus(&kulkarni_nomizu(gs, gt)?)
                .minus(&kulkarni_nomizu(gt, g)?)
                .scaled(&th_phi2_ts);
            let inner = a.minus(&b).minus(&c);
            let value = r.plus(&inner.scaled(&(int(1) / &four_n)));
            Ok(ClosedFormCurvature {
                r: value,
                auxiliary: vec![("S1".into(), s1), ("S2".into(), s2)],
            })
        }
        ClassLabel::F4 => {
            let theta_xi = lee.theta_xi(instance);
            let ee_gs = kulkarni_nomizu(&eta_eta, &metrics.g_star)?;
            let quad = kulkarni_nomizu(&eta_eta, g)?
                .scaled(&int(2))
                .minus(&kulkarni_nomizu(&metrics.g_star, &metrics.g_star)?);
            let coef = &theta_xi * &theta_xi / &eight_n2;
            let value = Tensor::from_fn(d, 0, 4, |ix| {
                let (x, y, z, w) = (ix[0], ix[1], ix[2], ix[3]);
                let deriv = frame_derivative(&fr.e[x], &theta_xi) * kn_with_first(&ee_gs, &fr, &fr.xi, y, z, w)
                    - frame_derivative(&fr.e[y], &theta_xi) * kn_with_first(&ee_gs, &fr, &fr.xi, x, z, w);
                r.get(ix) + deriv / &two_n - &coef * quad.get(ix)
            });
            Ok(ClosedFormCurvature {
                r: value,
                auxiliary: vec![],
            })
        }
        ClassLabel::F5 => {
            let ts_xi = lee.theta_star_xi(instance);
            let gg = kulkarni_nomizu(g, g)?;
            let coef = &ts_xi * &ts_xi / &eight_n2;
            let value = Tensor::from_fn(d, 0, 4, |ix| {
                let (x, y, z, w) = (ix[0], ix[1], ix[2], ix[3]);
                let deriv = frame_derivative(&fr.e[x], &ts_xi) * kn_with_first(&gg, &fr, &fr.xi, y, z, w)
                    - frame_derivative(&fr.e[y], &ts_xi) * kn_with_first(&gg, &fr, &fr.xi, x, z, w);
                r.get(ix) + deriv / &four_n + &coef * gg.get(ix)
            });
            Ok(ClosedFormCurvature {
                r: value,
                auxiliary: vec![],
            })
        }
        _ => {
            let omega = &lee.omega;
            let n_omega = covariant_derivative(omega, lc)?;
            let s3 = Tensor::from_fn(d, 0, 2, |ix| {
                let (x, y) = (ix[0], ix[1]);
                n_omega.eval(&[&fr.e[x], &fr.phi_e[y]]) + omega.eval(&[&fr.phi_e[x]]) * omega.eval(&[&fr.phi_e[y]])
            });
            let value = r.minus(&kulkarni_nomizu(&eta_eta, &s3)?);
            Ok(ClosedFormCurvature {
                r: value,
                auxiliary: vec![("S3".into(), s3)],
            })
        }
    }
}

/// `Div(α) = g^{ij}(∇_{b_i}α)(b_j)` and `Div*(α) = g^{ij}(∇_{b_i}α)(φb_j)`.
pub fn divergences(instance: &PiManifoldInstance, form: &Tensor, lc: &Connection) -> Result<(Rational, Rational)> {
    form.require_rank(0, 1)?;
    let fr = Frame::new(instance);
    let nabla = covariant_derivative(form, lc)?;
    let metric = fr.s.metric();
    let div = metric.trace(|i, j| nabla.get(&[i, j]).clone());
    let div_star = metric.trace(|i, j| nabla.eval(&[&fr.e[i], &fr.phi_e[j]]));
    Ok((div, div_star))
}

/// Ricci-type quantities of `D¹` from the class-wise closed forms, with their
/// residuals against the direct traces of `Ṙ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedFormRicci {
    pub rho: Tensor,
    pub rho_star: Tensor,
    pub tau: Rational,
    pub tau_star: Rational,
    pub rho_residual: Tensor,
    pub rho_star_residual: Tensor,
    pub tau_residual: Rational,
    pub tau_star_residual: Rational,
}

pub fn closed_form_ricci(
    instance: &PiManifoldInstance,
    label: ClassLabel,
    lee: &LeeForms,
    lc: &Connection,
    lc_bundle: &CurvatureBundle,
    fnc_bundle: &CurvatureBundle,
) -> Result<ClosedFormRicci> {
    require_main(label)?;
    let fr = Frame::new(instance);
    let d = fr.d;
    let n = fr.n.clone();
    let one = int(1);
    let two = int(2);
    let two_n = fr.two_n();
    let four_n = &two * &two_n;
    let (rho0, rho0_star) = (&lc_bundle.ricci, &lc_bundle.ricci_star);
    let (tau0, tau0_star) = (&lc_bundle.tau, &lc_bundle.tau_star);
    let xi = fr.xi.clone();

    let (rho, rho_star, tau, tau_star) = match label {
        ClassLabel::F1 => {
            let theta = &lee.theta;
            let th_phi = fr.compose_phi(theta);
            let th_phi2 = fr.compose_phi2(theta);
            let n_th_phi = covariant_derivative(&th_phi, lc)?;
            let n_th_phi2 = covariant_derivative(&th_phi2, lc)?;
            let (div_phi, div_star_phi) = divergences(instance, &th_phi, lc)?;
            let (div_phi2, div_star_phi2) = divergences(instance, &th_phi2, lc)?;
            let ts = lee.theta_sharp.as_slice();
            let a = theta.eval(&[&fr.s.phi_vec(ts)]);
            let b = theta.eval(&[&fr.s.phi2_vec(ts)]);
            let nn = &n * &n;
            let coef_gp = &div_phi2 - (int(4) * &nn - int(4) * &n - &one) / &two_n * &a + &two * (&n - &one) * &b;
            let coef_gpp = &div_phi + (int(8) * &nn - int(8) * &n + &one) / &two_n * &b;
            let rho = Tensor::from_fn(d, 0, 2, |ix| {
                let (y, z) = (ix[0], ix[1]);
                let quad = (th_phi2.get(&[y]) * th_phi2.get(&[z]) + th_phi.get(&[y]) * th_phi.get(&[z])) / &four_n;
                rho0.get(ix) + (n_th_phi.get(ix) + quad) / &two
                    - (&coef_gp * fr.g_phi(y, z) - &coef_gpp * fr.g_phiphi(y, z)) / &four_n
            });
            let two_n_m1 = &two_n - &one;
            let coef_star_gpp = &div_star_phi + &two_n_m1 * &two_n_m1 / &two_n * &a - &two * (&n - &one) * &b;
            let coef_star_gp = &div_star_phi2 - (int(8) * &nn - int(8) * &n - &one) / &two_n * &b;
            let rho_star = Tensor::from_fn(d, 0, 2, |ix| {
                let (y, z) = (ix[0], ix[1]);
                let quad = (th_phi.get(&[y]) * th_phi2.get(&[z]) + th_phi2.get(&[y]) * th_phi.get(&[z])) / &four_n;
                rho0_star.get(ix) - (n_th_phi2.get(ix) + quad) / &two
                    + (&coef_star_gpp * fr.g_phiphi(y, z) - &coef_star_gp * fr.g_phi(y, z)) / &four_n
            });
            let tau = tau0 + &div_phi + &two_n_m1 * &two_n_m1 / &two_n * &b;
            let tau_star = tau0_star + (&n - &one) * &a - (&two_n - int(3)) / &two * &b;
            (rho, rho_star, tau, tau_star)
        }
        ClassLabel::F4 => {
            let t = lee.theta_xi(instance);
            let t2 = &t * &t;
            let rho = Tensor::from_fn(d, 0, 2, |ix| {
                let (y, z) = (ix[0], ix[1]);
                let deriv = frame_derivative(&xi, &t) * fr.g_phi(y, z) - frame_derivative(&fr.phi_e[y], &t) * fr.eta(z);
                rho0.get(ix) - deriv / &two_n
                    + &t2 / (&two * &n * &n) * (fr.g(&fr.e[y], &fr.e[z]) + (&n - &one) * fr.eta(y) * fr.eta(z))
            });
            let rho_star = Tensor::from_fn(d, 0, 2, |ix| {
                let (y, z) = (ix[0], ix[1]);
                let deriv = frame_derivative(&fr.phi2_e[y], &t) - &two_n * frame_derivative(&fr.e[y], &t);
                rho0_star.get(ix) + deriv / &two_n * fr.eta(z)
                    - (&two_n - &one) / (int(4) * &n * &n) * &t2 * fr.g_phi(y, z)
            });
            let tau = tau0 + &t2 / &two_n;
            let tau_star = tau0_star - frame_derivative(&xi, &t);
            (rho, rho_star, tau, tau_star)
        }
        ClassLabel::F5 => {
            let t = lee.theta_star_xi(instance);
            let t2 = &t * &t;
            let rho = Tensor::from_fn(d, 0, 2, |ix| {
                let (y, z) = (ix[0], ix[1]);
                let gyz = fr.g(&fr.e[y], &fr.e[z]);
                let deriv = frame_derivative(&xi, &t) * &gyz
                    + (&two_n - &one) * frame_derivative(&fr.e[y], &t) * fr.eta(z);
                rho0.get(ix) - deriv / &two_n - &t2 / &two_n * gyz
            });
            let rho_star = Tensor::from_fn(d, 0, 2, |ix| {
                let (y, z) = (ix[0], ix[1]);
                rho0_star.get(ix) - frame_derivative(&fr.phi_e[y], &t) * fr.eta(z) / &two_n
                    + &t2 / (int(4) * &n * &n) * fr.g_phi(y, z)
            });
            let tau = tau0 - &two * frame_derivative(&xi, &t) - (&two_n + &one) / &two_n * &t2;
            let tau_star = tau0_star.clone();
            (rho, rho_star, tau, tau_star)
        }
        _ => {
            let omega = &lee.omega;
            let n_omega = covariant_derivative(omega, lc)?;
            let (div, div_star) = divergences(instance, omega, lc)?;
            let ws = lee.omega_sharp.as_slice();
            let w_phi_ws = omega.eval(&[&fr.s.phi_vec(ws)]);
            let w_phi2_ws = omega.eval(&[&fr.s.phi2_vec(ws)]);
            let c_rho = &div_star + &w_phi2_ws;
            let c_rho_star = &div + &w_phi_ws;
            let rho = Tensor::from_fn(d, 0, 2, |ix| {
                let (y, z) = (ix[0], ix[1]);
                rho0.get(ix)
                    + n_omega.eval(&[&fr.e[y], &fr.phi_e[z]])
                    + omega.eval(&[&fr.phi_e[y]]) * omega.eval(&[&fr.phi_e[z]])
                    + &c_rho * fr.eta(y) * fr.eta(z)
            });
            let rho_star = Tensor::from_fn(d, 0, 2, |ix| rho0_star.get(ix) + &c_rho_star * fr.eta(ix[0]) * fr.eta(ix[1]));
            let tau = tau0 + &two * &c_rho;
            let tau_star = tau0_star + &c_rho_star;
            (rho, rho_star, tau, tau_star)
        }
    };
    Ok(ClosedFormRicci {
        rho_residual: rho.minus(&fnc_bundle.ricci),
        rho_star_residual: rho_star.minus(&fnc_bundle.ricci_star),
        tau_residual: &tau - &fnc_bundle.tau,
        tau_star_residual: &tau_star - &fnc_bundle.tau_star,
        rho,
        rho_star,
        tau,
        tau_star,
    })
}
