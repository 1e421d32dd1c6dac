//! The five-dimensional Lie group example and a small catalog of instances.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::pi_manifold::{LieAlgebra, PiManifoldInstance, PiStructure};
use crate::tensor::{format_rational, frac, int, Rational, Tensor};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExampleParams {
    pub lambda: Rational,
    pub mu: Rational,
}

impl ExampleParams {
    pub fn new(lambda: Rational, mu: Rational) -> Self {
        ExampleParams { lambda, mu }
    }
}

impl Default for ExampleParams {
    fn default() -> Self {
        ExampleParams::new(int(1), int(1))
    }
}

/// `(λ, μ)` sample set used throughout the test suites.
pub fn default_parameter_set() -> Vec<ExampleParams> {
    [(int(0), int(0)), (int(1), int(0)), (int(0), int(1)), (int(1), int(1)), (int(2), int(-3)), (frac(1, 2), frac(1, 3))]
        .into_iter()
        .map(|(l, m)| ExampleParams::new(l, m))
        .collect()
}

/// Standard structure on `d = 2n + 1`: `ξ = e_0`, `φ` swapping `e_i ↔ e_{i+n}`,
/// `η = e^0`, orthonormal `g`.
pub fn standard_structure(n: usize) -> PiStructure {
    let d = 2 * n + 1;
    let phi = Tensor::from_fn(d, 1, 1, |ix| {
        let (a, i) = (ix[0], ix[1]);
        let partner = match i {
            0 => None,
            i if i <= n => Some(i + n),
            i => Some(i - n),
        };
        if partner == Some(a) {
            Rational::one()
        } else {
            Rational::zero()
        }
    });
    let mut xi = vec![Rational::zero(); d];
    xi[0] = Rational::one();
    let g = Tensor::from_fn(d, 0, 2, |ix| if ix[0] == ix[1] { Rational::one() } else { Rational::zero() });
    PiStructure::new(phi, Tensor::vector(xi.clone()), Tensor::covector(xi), g).expect("standard structure is well-formed")
}

pub fn build_section5(params: &ExampleParams) -> PiManifoldInstance {
    let (l, m) = (&params.lambda, &params.mu);
    let one = Rational::one();
    let zero = Rational::zero();
    let mut brackets = BTreeMap::new();
    brackets.insert((0, 1), vec![zero.clone(), zero.clone(), l.clone(), -one.clone(), m.clone()]);
    brackets.insert((0, 2), vec![zero.clone(), -l.clone(), zero.clone(), -m.clone(), -one.clone()]);
    brackets.insert((0, 3), vec![zero.clone(), -one.clone(), m.clone(), zero.clone(), l.clone()]);
    brackets.insert((0, 4), vec![zero.clone(), -m.clone(), -one.clone(), -l.clone(), zero]);
    let algebra = LieAlgebra::from_brackets(5, &brackets).expect("five-dimensional brackets");
    let params = BTreeMap::from([("lambda".to_string(), l.clone()), ("mu".to_string(), m.clone())]);
    PiManifoldInstance::new("para-sasaki-5", algebra, standard_structure(2))
        .expect("dimensions agree")
        .with_params(params)
}

/// Abelian algebra of dimension `2n + 1` carrying the standard structure.
pub fn abelian(n: usize) -> PiManifoldInstance {
    let d = 2 * n + 1;
    PiManifoldInstance::new(format!("abelian-{d}"), LieAlgebra::abelian(d).expect("odd dimension"), standard_structure(n))
        .expect("dimensions agree")
}

pub fn build_catalog() -> Vec<PiManifoldInstance> {
    let mut out = vec![abelian(2)];
    out.extend(default_parameter_set().iter().map(build_section5));
    out.push(abelian(1));
    out
}

/// Spec-file text for the five-dimensional example with symbolic `lambda`
/// and `mu` parameters.
pub fn example_spec_text(params: &ExampleParams) -> String {
    format!(
        "pim 1\n\
         # five-dimensional Lie group with a para-Sasaki-like structure\n\
         name = para-sasaki-5\n\
         n = 2\n\
         param lambda = {}\n\
         param mu = {}\n\
         bracket[0,1] = lambda*e2 - e3 + mu*e4\n\
         bracket[0,2] = -lambda*e1 - mu*e3 - e4\n\
         bracket[0,3] = -e1 + mu*e2 + lambda*e4\n\
         bracket[0,4] = -mu*e1 - e2 - lambda*e3\n\
         phi[1] = e3\n\
         phi[2] = e4\n\
         phi[3] = e1\n\
         phi[4] = e2\n\
         xi = e0\n\
         eta = 1, 0, 0, 0, 0\n\
         g = diag(1, 1, 1, 1, 1)\n",
        format_rational(&params.lambda),
        format_rational(&params.mu)
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pi_manifold::validate;
    use crate::tensor::basis;

    #[test]
    fn commutators() {
        let inst = build_section5(&ExampleParams::new(int(1), int(1)));
        assert_eq!(inst.algebra.bracket_basis(0, 1), &[int(0), int(0), int(1), int(-1), int(1)]);
        let inst = build_section5(&ExampleParams::new(int(0), int(0)));
        assert_eq!(inst.algebra.bracket(&basis(5, 0), &basis(5, 1)), vec![int(0), int(0), int(0), int(-1), int(0)]);
    }

    #[test]
    fn jacobi_for_all_samples() {
        for p in default_parameter_set() {
            let inst = build_section5(&p);
            assert!(inst.algebra.jacobi_residual().is_zero());
        }
    }

    #[test]
    fn catalog_is_valid() {
        let cat = build_catalog();
        assert_eq!(cat.len(), 8);
        for inst in &cat {
            assert!(validate(inst).unwrap().all_zero, "{}", inst.name);
        }
        assert_eq!(cat.last().unwrap().dim(), 3);
    }

    #[test]
    fn structure_independent_of_parameters() {
        let a = build_section5(&ExampleParams::new(int(0), int(0)));
        let b = build_section5(&ExampleParams::new(frac(7, 3), int(-5)));
        assert_eq!(a.structure, b.structure);
        assert_ne!(a.algebra, b.algebra);
    }
}
