//! Identity and cross-check suites.
//!
//! Hard invariants are theorems: a residual there means an engine bug.
//! Cross-checks compare printed closed forms against the direct pipeline and
//! may legitimately report residuals.

use serde::Serialize;

use crate::classifier::{classify_with, ClassLabel, ClassificationReport};
use crate::error::Result;
use crate::levi_civita::{
    self, bundle_from_tensor, curvature_symmetry_residuals, f_symmetry_residuals, koszul_unchecked, lee_forms,
    lee_relation_residuals, lemma_residuals, levi_civita_residuals, nijenhuis_from_f, nijenhuis_pair, reconstruct_f,
    theta_horizontal, Connection, CurvatureBundle, LeeForms, NijenhuisPair,
};
use crate::natural::{
    self, closed_form_connection, closed_form_curvature, closed_form_ricci, closed_form_torsion,
    curvature_via_potential_unchecked, naturality_residuals, potential_residuals, torsion_form_relations, torsion_from_f,
    torsion_from_forms, torsion_from_nijenhuis, torsion_potential_residuals, Potential, TorsionData,
};
use crate::pi_manifold::{ensure_valid, PiManifoldInstance};
use crate::tensor::{int, Rational, Tensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Category {
    HardInvariant,
    PaperCrosscheck,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::HardInvariant => "hard-invariant",
            Category::PaperCrosscheck => "paper-crosscheck",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Holds,
    Residual,
    Skipped,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Holds => "holds",
            Status::Residual => "residual",
            Status::Skipped => "skipped",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    pub id: String,
    pub category: Category,
    pub status: Status,
    pub max_abs_residual: Rational,
    /// First index tuple reaching `max_abs_residual`, when there is a residual.
    pub witness: Option<Vec<usize>>,
    pub residual: Tensor,
}

impl IdentityReport {
    pub fn from_residual(id: impl Into<String>, category: Category, residual: Tensor) -> Self {
        let (max_abs_residual, witness) = residual.max_abs();
        let status = if witness.is_some() { Status::Residual } else { Status::Holds };
        IdentityReport {
            id: id.into(),
            category,
            status,
            max_abs_residual,
            witness,
            residual,
        }
    }

    pub fn skipped(id: impl Into<String>, category: Category) -> Self {
        IdentityReport {
            id: id.into(),
            category,
            status: Status::Skipped,
            max_abs_residual: int(0),
            witness: None,
            residual: Tensor::scalar(int(0)),
        }
    }

    pub fn holds(&self) -> bool {
        self.status == Status::Holds
    }

    /// A hard invariant with a nonzero residual.
    pub fn is_fatal(&self) -> bool {
        self.category == Category::HardInvariant && self.status == Status::Residual
    }

    /// Nonzero residual entries sorted by index tuple.
    pub fn components(&self) -> Vec<(Vec<usize>, Rational)> {
        self.residual.nonzero().into_iter().map(|(i, v)| (i, v.clone())).collect()
    }
}

/// Every intermediate object of the pipeline, computed without the
/// enforcing checks so the suites can report on them.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub lc: Connection,
    pub f: Tensor,
    pub lee: LeeForms,
    pub nabla_xi: Tensor,
    pub nabla_eta: Tensor,
    pub nijenhuis: NijenhuisPair,
    pub potential: Potential,
    pub fnc: Connection,
    pub torsion: TorsionData,
    pub lc_curvature: CurvatureBundle,
    pub fnc_curvature: CurvatureBundle,
    pub classification: ClassificationReport,
}

impl Analysis {
    pub fn new(instance: &PiManifoldInstance) -> Result<Self> {
        ensure_valid(instance)?;
        let lc = koszul_unchecked(instance);
        let f = levi_civita::fundamental_tensor(instance, &lc)?;
        let lee = lee_forms(instance, &f)?;
        let (nabla_xi, nabla_eta) = levi_civita::nabla_xi_eta_unchecked(instance, &lc)?;
        let nijenhuis = nijenhuis_pair(instance, &lc)?;
        let potential = natural::first_natural_potential_unchecked(instance, &lc)?;
        let fnc = lc.shifted(&potential.q, levi_civita::FIRST_NATURAL)?;
        let torsion = natural::torsion(instance, &fnc)?;
        let lc_curvature = bundle_from_tensor(
            instance,
            levi_civita::curvature_tensor(instance, &lc),
            levi_civita::LEVI_CIVITA,
        );
        let fnc_curvature = bundle_from_tensor(
            instance,
            levi_civita::curvature_tensor(instance, &fnc),
            levi_civita::FIRST_NATURAL,
        );
        let classification = classify_with(instance, &lc, &f, &lee)?;
        Ok(Analysis {
            lc,
            f,
            lee,
            nabla_xi,
            nabla_eta,
            nijenhuis,
            potential,
            fnc,
            torsion,
            lc_curvature,
            fnc_curvature,
            classification,
        })
    }
}

pub fn run_identity_suite(instance: &PiManifoldInstance) -> Result<Vec<IdentityReport>> {
    let a = Analysis::new(instance)?;
    identity_suite(instance, &a)
}

pub fn identity_suite(instance: &PiManifoldInstance, a: &Analysis) -> Result<Vec<IdentityReport>> {
    let mut out: Vec<(String, Tensor)> = Vec::new();
    let mut push = |id: &str, t: Tensor| out.push((id.to_string(), t));

    let (torsion, metric) = levi_civita_residuals(instance, &a.lc)?;
    push("lc.torsion-free", torsion);
    push("lc.metric", metric);

    let f_names = ["F.sym.23", "F.phi-phi", "F.phi-shift", "F.phi-phi.horizontal", "F.phi-phi2"];
    for (name, t) in f_names.into_iter().zip(f_symmetry_residuals(instance, &a.f)) {
        push(name, t);
    }

    let lee_names = ["lee.omega-xi", "lee.theta-star-phi", "lee.theta-star-phi2"];
    for (name, t) in lee_names.into_iter().zip(lee_relation_residuals(instance, &a.lee)) {
        push(name, t);
    }

    let lemma_names = ["xi-eta.dual", "xi-eta.vertical", "xi-eta.fundamental"];
    for (name, t) in lemma_names.into_iter().zip(lemma_residuals(instance, &a.nabla_xi, &a.nabla_eta, &a.f)) {
        push(name, t);
    }

    let (n, nt) = (&a.nijenhuis.n, &a.nijenhuis.n_assoc);
    push("nijenhuis.antisymmetric", n.plus(&n.transpose(0, 1)));
    push("nijenhuis.assoc-symmetric", nt.minus(&nt.transpose(0, 1)));
    let via_f = nijenhuis_from_f(instance, &a.f);
    push("nijenhuis.from-F.N", via_f.n.minus(n));
    push("nijenhuis.from-F.assoc", via_f.n_assoc.minus(nt));
    push("F.reconstruct", reconstruct_f(instance, &a.nijenhuis).minus(&a.f));

    let [cond_i, cond_ii] = potential_residuals(instance, &a.potential, &a.f);
    push("potential.phi-shift", cond_i);
    push("potential.skew", cond_ii);

    for r in naturality_residuals(instance, &a.fnc)? {
        push(&format!("natural.D1.{}", r.name), r.residual);
    }

    let [antisym, t_hat_xi] = torsion_potential_residuals(instance, &a.torsion, &a.potential);
    push("torsion.D1.potential", antisym);
    push("torsion.D1.t-hat-xi", t_hat_xi);
    for r in torsion_form_relations(instance, &a.lee, &a.torsion) {
        push(&r.name, r.residual);
    }

    let [a12, a34, bianchi] = curvature_symmetry_residuals(&a.lc_curvature.r);
    push("curv.lc.antisym-12", a12);
    push("curv.lc.antisym-34", a34);
    push("curv.lc.bianchi", bianchi);
    let [d12, d34, _] = curvature_symmetry_residuals(&a.fnc_curvature.r);
    push("curv.D1.antisym-12", d12);
    push("curv.D1.antisym-34", d34);
    let via = curvature_via_potential_unchecked(instance, &a.lc_curvature, &a.potential, &a.lc)?;
    push("curv.D1.via-potential", via.minus(&a.fnc_curvature.r));

    let mut reports: Vec<IdentityReport> = out
        .into_iter()
        .map(|(id, t)| IdentityReport::from_residual(id, Category::HardInvariant, t))
        .collect();
    reports.sort_by(|x, y| x.id.cmp(&y.id));
    Ok(reports)
}

pub fn run_crosscheck_suite(instance: &PiManifoldInstance) -> Result<Vec<IdentityReport>> {
    let a = Analysis::new(instance)?;
    crosscheck_suite(instance, &a)
}

/// Id of the single report emitted when the instance is in no single class.
pub const CROSSCHECK_SKIPPED: &str = "crosscheck";

pub fn crosscheck_suite(instance: &PiManifoldInstance, a: &Analysis) -> Result<Vec<IdentityReport>> {
    let label = a.classification.label;
    let labels: Vec<ClassLabel> = match label {
        ClassLabel::Unresolved => {
            return Ok(vec![IdentityReport::skipped(CROSSCHECK_SKIPPED, Category::PaperCrosscheck)]);
        }
        ClassLabel::F0 => ClassLabel::MAIN.to_vec(),
        l => vec![l],
    };
    let d = instance.dim();
    let mut out: Vec<(String, Tensor)> = Vec::new();
    out.push(("torsion.F-expr".into(), torsion_from_f(instance, &a.f).minus(&a.torsion.t3)));
    out.push((
        "torsion.NN-expr".into(),
        torsion_from_nijenhuis(instance, &a.nijenhuis).minus(&a.torsion.t3),
    ));
    out.push((
        "lee.theta.frame-range".into(),
        a.lee.theta.minus(&theta_horizontal(instance, &a.lee)),
    ));
    for l in labels {
        let conn = closed_form_connection(instance, l, &a.lee, &a.lc)?;
        out.push((format!("thm4.2.{l}"), conn.difference(&a.fnc)?));
        out.push((
            format!("thm4.3.{l}"),
            closed_form_torsion(instance, l, &a.lee)?.minus(&a.torsion.t),
        ));
        out.push((
            format!("cor4.4.{l}"),
            torsion_from_forms(instance, l, &a.torsion)?.minus(&a.torsion.t),
        ));
        let curv = closed_form_curvature(instance, l, &a.lee, &a.lc, &a.lc_curvature)?;
        out.push((format!("thm4.5.{l}"), curv.r.minus(&a.fnc_curvature.r)));
        let ricci = closed_form_ricci(instance, l, &a.lee, &a.lc, &a.lc_curvature, &a.fnc_curvature)?;
        out.push((format!("cor4.6.{l}.rho"), ricci.rho_residual));
        out.push((format!("cor4.6.{l}.rho_star"), ricci.rho_star_residual));
        out.push((format!("cor4.6.{l}.tau"), Tensor::scalar_in(d, ricci.tau_residual)));
        out.push((format!("cor4.6.{l}.tau_star"), Tensor::scalar_in(d, ricci.tau_star_residual)));
    }
    let mut reports: Vec<IdentityReport> = out
        .into_iter()
        .map(|(id, t)| IdentityReport::from_residual(id, Category::PaperCrosscheck, t))
        .collect();
    reports.sort_by(|x, y| x.id.cmp(&y.id));
    Ok(reports)
}

/// Which suites to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Core,
    Paper,
    All,
}

/// Both suites (as selected) over one shared analysis, sorted by id.
pub fn run_suites(instance: &PiManifoldInstance, suite: Suite) -> Result<(Analysis, Vec<IdentityReport>)> {
    let a = Analysis::new(instance)?;
    let mut reports = Vec::new();
    if suite != Suite::Paper {
        reports.extend(identity_suite(instance, &a)?);
    }
    if suite != Suite::Core {
        reports.extend(crosscheck_suite(instance, &a)?);
    }
    reports.sort_by(|x, y| x.id.cmp(&y.id));
    Ok((a, reports))
}

/// A residual table observed on the five-dimensional example.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordedFinding {
    pub id: &'static str,
    pub entries: Vec<(Vec<usize>, Rational)>,
}

/// Index tuples and integer values of nonzero residual components.
type Table = &'static [(&'static [usize], i64)];

const THM45_F4: Table = &[
    (&[1, 2, 3, 4], 2),
    (&[1, 2, 4, 3], -2),
    (&[1, 3, 1, 3], -2),
    (&[1, 3, 3, 1], 2),
    (&[1, 4, 2, 3], -2),
    (&[1, 4, 3, 2], 2),
    (&[2, 1, 3, 4], -2),
    (&[2, 1, 4, 3], 2),
    (&[2, 3, 1, 4], -2),
    (&[2, 3, 4, 1], 2),
    (&[2, 4, 2, 4], -2),
    (&[2, 4, 4, 2], 2),
    (&[3, 1, 1, 3], 2),
    (&[3, 1, 3, 1], -2),
    (&[3, 2, 1, 4], 2),
    (&[3, 2, 4, 1], -2),
    (&[3, 4, 1, 2], 2),
    (&[3, 4, 2, 1], -2),
    (&[4, 1, 2, 3], 2),
    (&[4, 1, 3, 2], -2),
    (&[4, 2, 2, 4], 2),
    (&[4, 2, 4, 2], -2),
    (&[4, 3, 1, 2], -2),
    (&[4, 3, 2, 1], 2),
];

const COR46_F4_RHO: Table = &[(&[1, 1], 2), (&[2, 2], 2), (&[3, 3], 2), (&[4, 4], 2)];

const COR46_F4_RHO_STAR: Table = &[(&[1, 3], -6), (&[2, 4], -6), (&[3, 1], -6), (&[4, 2], -6)];

/// Residual tables of the cross-checks that do not hold on the
/// five-dimensional example, identical for every `(λ, μ)`.
pub fn recorded_findings() -> Vec<RecordedFinding> {
    [
        ("cor4.6.F4.rho", COR46_F4_RHO),
        ("cor4.6.F4.rho_star", COR46_F4_RHO_STAR),
        ("thm4.5.F4", THM45_F4),
    ]
    .into_iter()
    .map(|(id, table)| RecordedFinding {
        id,
        entries: table.iter().map(|(ix, v)| (ix.to_vec(), int(*v))).collect(),
    })
    .collect()
}
