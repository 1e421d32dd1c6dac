//! Membership in `F0` and the main classes `F1`, `F4`, `F5`, `F11`, decided by
//! exact residuals of `F` against each class's closed form.

use std::fmt;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::levi_civita::{self, frame, Connection, LeeForms};
use crate::pi_manifold::PiManifoldInstance;
use crate::tensor::{int, Rational, Tensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ClassLabel {
    F0,
    F1,
    F4,
    F5,
    F11,
    #[serde(rename = "UNRESOLVED")]
    Unresolved,
}

impl ClassLabel {
    pub const MAIN: [ClassLabel; 4] = [ClassLabel::F1, ClassLabel::F4, ClassLabel::F5, ClassLabel::F11];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassLabel::F0 => "F0",
            ClassLabel::F1 => "F1",
            ClassLabel::F4 => "F4",
            ClassLabel::F5 => "F5",
            ClassLabel::F11 => "F11",
            ClassLabel::Unresolved => "UNRESOLVED",
        }
    }

    pub fn is_main(self) -> bool {
        ClassLabel::MAIN.contains(&self)
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The characteristic closed form of `F` for a main class, built from the
/// instance's own Lee forms.
pub fn class_closed_form(instance: &PiManifoldInstance, label: ClassLabel, lee: &LeeForms) -> Result<Tensor> {
    let d = instance.dim();
    let s = &instance.structure;
    let (e, phi_e) = frame(instance);
    let phi2_e: Vec<Vec<Rational>> = phi_e.iter().map(|v| s.phi_vec(v)).collect();
    let two_n = int(2 * instance.n() as i64);
    let eta = |i: usize| s.eta().get(&[i]).clone();
    let gpp = |i: usize, j: usize| s.g(&phi_e[i], &phi_e[j]);
    let gp = |i: usize, j: usize| s.g(&e[i], &phi_e[j]);
    Ok(match label {
        ClassLabel::F0 => Tensor::zeros(d, 0, 3),
        ClassLabel::F1 => {
            let th = &lee.theta;
            Tensor::from_fn(d, 0, 3, |ix| {
                let (x, y, z) = (ix[0], ix[1], ix[2]);
                (gpp(x, y) * th.eval(&[&phi2_e[z]]) + gpp(x, z) * th.eval(&[&phi2_e[y]])
                    - gp(x, y) * th.eval(&[&phi_e[z]])
                    - gp(x, z) * th.eval(&[&phi_e[y]]))
                    / &two_n
            })
        }
        ClassLabel::F4 => {
            let c = lee.theta_xi(instance) / &two_n;
            Tensor::from_fn(d, 0, 3, |ix| {
                let (x, y, z) = (ix[0], ix[1], ix[2]);
                &c * (gpp(x, y) * eta(z) + gpp(x, z) * eta(y))
            })
        }
        ClassLabel::F5 => {
            let c = lee.theta_star_xi(instance) / &two_n;
            Tensor::from_fn(d, 0, 3, |ix| {
                let (x, y, z) = (ix[0], ix[1], ix[2]);
                &c * (gp(x, y) * eta(z) + gp(x, z) * eta(y))
            })
        }
        ClassLabel::F11 => {
            let w = &lee.omega;
            Tensor::from_fn(d, 0, 3, |ix| {
                let (x, y, z) = (ix[0], ix[1], ix[2]);
                eta(x) * (eta(y) * w.get(&[z]) + eta(z) * w.get(&[y]))
            })
        }
        ClassLabel::Unresolved => return Err(Error::UnsupportedClass(label)),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassResidual {
    pub label: ClassLabel,
    pub residual: Tensor,
    pub zero: bool,
}

/// `F − closed_form` for `F0` and every main class; the `F0` residual is `F`.
pub fn class_residuals(instance: &PiManifoldInstance, f: &Tensor, lee: &LeeForms) -> Result<Vec<ClassResidual>> {
    std::iter::once(ClassLabel::F0)
        .chain(ClassLabel::MAIN)
        .map(|label| {
            let residual = f.minus(&class_closed_form(instance, label, lee)?);
            Ok(ClassResidual {
                label,
                zero: residual.is_zero(),
                residual,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationReport {
    pub residuals: Vec<ClassResidual>,
    pub label: ClassLabel,
    /// Main classes whose residual vanishes; more than one with `F ≠ 0` is
    /// reported as `UNRESOLVED`.
    pub zero_classes: Vec<ClassLabel>,
    pub theta_xi: Rational,
    pub theta_star_xi: Rational,
    pub f4_prime: bool,
    pub para_sasaki: bool,
    pub paracontact: bool,
}

/// `(paracontact, para_sasaki)`: `2g(x,φy) = (∇_xη)(y) + (∇_yη)(x)` and
/// `φx = ∇_xξ` on every frame pair.
pub fn special_flags(instance: &PiManifoldInstance, conn: &Connection) -> Result<(bool, bool)> {
    let d = instance.dim();
    let s = &instance.structure;
    let (e, phi_e) = frame(instance);
    let (nabla_xi, nabla_eta) = levi_civita::nabla_xi_eta_unchecked(instance, conn)?;
    let two = int(2);
    let paracontact = (0..d).all(|x| {
        (0..d).all(|y| &two * s.g(&e[x], &phi_e[y]) - nabla_eta.get(&[x, y]) - nabla_eta.get(&[y, x]) == Rational::zero())
    });
    let para_sasaki = (0..d).all(|x| (0..d).all(|a| nabla_xi.get(&[a, x]) == &phi_e[x][a]));
    Ok((paracontact, para_sasaki))
}

pub fn classify(instance: &PiManifoldInstance) -> Result<ClassificationReport> {
    let lc = levi_civita::koszul_levi_civita(instance)?;
    let f = levi_civita::fundamental_tensor(instance, &lc)?;
    let lee = levi_civita::lee_forms(instance, &f)?;
    classify_with(instance, &lc, &f, &lee)
}

pub(crate) fn classify_with(
    instance: &PiManifoldInstance,
    lc: &Connection,
    f: &Tensor,
    lee: &LeeForms,
) -> Result<ClassificationReport> {
    let residuals = class_residuals(instance, f, lee)?;
    let zero_classes: Vec<ClassLabel> = residuals.iter().filter(|r| r.zero && r.label.is_main()).map(|r| r.label).collect();
    let label = if f.is_zero() {
        ClassLabel::F0
    } else if zero_classes.len() == 1 {
        zero_classes[0]
    } else {
        ClassLabel::Unresolved
    };
    let theta_xi = lee.theta_xi(instance);
    let theta_star_xi = lee.theta_star_xi(instance);
    let f4_prime = label == ClassLabel::F4 && theta_xi == -int(2 * instance.n() as i64);
    let (paracontact, para_sasaki) = special_flags(instance, lc)?;
    Ok(ClassificationReport {
        residuals,
        label,
        zero_classes,
        theta_xi,
        theta_star_xi,
        f4_prime,
        para_sasaki,
        paracontact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{abelian, build_section5, default_parameter_set, ExampleParams};

    #[test]
    fn example_is_para_sasaki_like() {
        for p in default_parameter_set() {
            let inst = build_section5(&p);
            let rep = classify(&inst).unwrap();
            assert_eq!(rep.label, ClassLabel::F4);
            assert_eq!(rep.theta_xi, int(-4));
            assert!(rep.f4_prime && rep.para_sasaki && rep.paracontact);
            let f5 = rep.residuals.iter().find(|r| r.label == ClassLabel::F5).unwrap();
            assert!(!f5.zero);
            let f0 = rep.residuals.iter().find(|r| r.label == ClassLabel::F0).unwrap();
            assert_eq!(f0.residual.get(&[1, 1, 0]), &int(-1));
        }
    }

    #[test]
    fn abelian_is_f0() {
        let inst = abelian(2);
        let rep = classify(&inst).unwrap();
        assert_eq!(rep.label, ClassLabel::F0);
        assert!(rep.residuals.iter().all(|r| r.zero));
        assert!(!rep.f4_prime && !rep.para_sasaki);
        // ∇η = 0 while g(·,φ·) ≠ 0
        assert!(!rep.paracontact);
    }

    #[test]
    fn f4_round_trip() {
        let inst = build_section5(&ExampleParams::new(int(2), int(-3)));
        let lc = levi_civita::koszul_levi_civita(&inst).unwrap();
        let f = levi_civita::fundamental_tensor(&inst, &lc).unwrap();
        let lee = levi_civita::lee_forms(&inst, &f).unwrap();
        assert_eq!(class_closed_form(&inst, ClassLabel::F4, &lee).unwrap(), f);
        assert!(class_closed_form(&inst, ClassLabel::Unresolved, &lee).is_err());
    }
}
