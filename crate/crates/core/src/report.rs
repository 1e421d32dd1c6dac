//! JSON reports and plain-text tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::classifier::ClassificationReport;
use crate::levi_civita::{Connection, CurvatureBundle};
use crate::pi_manifold::PiManifoldInstance;
use crate::spec_file::format_combo;
use crate::tensor::{format_rational, Rational, Tensor};
use crate::verify::IdentityReport;

#[derive(Debug, Serialize)]
pub struct JsonReport {
    pub instance: String,
    pub params: BTreeMap<String, String>,
    pub classification: JsonClassification,
    pub reports: Vec<JsonIdentity>,
}

#[derive(Debug, Serialize)]
pub struct JsonClassification {
    pub label: String,
    pub zero_classes: Vec<String>,
    pub theta_xi: String,
    pub theta_star_xi: String,
    pub f4_prime: bool,
    pub para_sasaki: bool,
    pub paracontact: bool,
}

#[derive(Debug, Serialize)]
pub struct JsonIdentity {
    pub id: String,
    pub category: &'static str,
    pub status: &'static str,
    pub max_abs_residual: String,
    pub witness: Option<Vec<usize>>,
    /// The full residual tensor as nested arrays, a bare string for scalars.
    pub residual: serde_json::Value,
    /// Nonzero residual entries as `[index, value]` pairs.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<(Vec<usize>, String)>,
}

impl From<&IdentityReport> for JsonIdentity {
    fn from(r: &IdentityReport) -> Self {
        JsonIdentity {
            id: r.id.clone(),
            category: r.category.as_str(),
            status: r.status.as_str(),
            max_abs_residual: format_rational(&r.max_abs_residual),
            witness: r.witness.clone(),
            residual: nested(&r.residual),
            components: r.components().into_iter().map(|(i, v)| (i, format_rational(&v))).collect(),
        }
    }
}

/// Row-major nested arrays of `"p/q"` strings.
pub fn nested(t: &Tensor) -> serde_json::Value {
    fn level(t: &Tensor, prefix: &mut Vec<usize>) -> serde_json::Value {
        if prefix.len() == t.order() {
            return serde_json::Value::String(format_rational(t.get(prefix)));
        }
        let items = (0..t.dim())
            .map(|i| {
                prefix.push(i);
                let v = level(t, prefix);
                prefix.pop();
                v
            })
            .collect();
        serde_json::Value::Array(items)
    }
    level(t, &mut Vec::new())
}

impl From<&ClassificationReport> for JsonClassification {
    fn from(c: &ClassificationReport) -> Self {
        JsonClassification {
            label: c.label.to_string(),
            zero_classes: c.zero_classes.iter().map(ToString::to_string).collect(),
            theta_xi: format_rational(&c.theta_xi),
            theta_star_xi: format_rational(&c.theta_star_xi),
            f4_prime: c.f4_prime,
            para_sasaki: c.para_sasaki,
            paracontact: c.paracontact,
        }
    }
}

pub fn build_report(
    instance: &PiManifoldInstance,
    classification: &ClassificationReport,
    reports: &[IdentityReport],
) -> JsonReport {
    JsonReport {
        instance: instance.name.clone(),
        params: instance.params.iter().map(|(k, v)| (k.clone(), format_rational(v))).collect(),
        classification: classification.into(),
        reports: reports.iter().map(JsonIdentity::from).collect(),
    }
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json(report: &JsonReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn classification_line(c: &ClassificationReport) -> String {
    format!(
        "class: {}, F4': {}, para-Sasaki: {}, theta(xi) = {}",
        c.label,
        yes_no(c.f4_prime),
        yes_no(c.para_sasaki),
        format_rational(&c.theta_xi)
    )
}

pub fn classification_details(c: &ClassificationReport) -> String {
    let mut out = String::new();
    writeln!(out, "paracontact: {}", yes_no(c.paracontact)).unwrap();
    writeln!(out, "theta*(xi) = {}", format_rational(&c.theta_star_xi)).unwrap();
    for r in &c.residuals {
        let (max, _) = r.residual.max_abs();
        writeln!(out, "  {:<3} residual max |.| = {}", r.label.as_str(), format_rational(&max)).unwrap();
    }
    out
}

fn index_list(ix: &[usize]) -> String {
    ix.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// `name[i,j,...] = v` for every nonzero component, or `name = 0`.
pub fn nonzero_table(name: &str, t: &Tensor) -> String {
    let entries = t.nonzero();
    if entries.is_empty() {
        return format!("{name} = 0\n");
    }
    let mut out = String::new();
    for (ix, v) in entries {
        writeln!(out, "{name}[{}] = {}", index_list(&ix), format_rational(v)).unwrap();
    }
    out
}

pub fn scalar_line(name: &str, v: &Rational) -> String {
    format!("{name} = {}\n", format_rational(v))
}

/// `name(e_i, e_j) = combo` for the nonzero covariant derivatives of basis fields.
pub fn connection_table(name: &str, conn: &Connection) -> String {
    let entries = conn.nonzero();
    if entries.is_empty() {
        return format!("{name} = 0\n");
    }
    let mut out = String::new();
    for (i, j, v) in entries {
        writeln!(out, "{name}_e{i} e{j} = {}", format_combo(&v)).unwrap();
    }
    out
}

pub fn curvature_text(bundle: &CurvatureBundle) -> String {
    let mut out = format!("connection: {}\n", bundle.connection_label);
    out.push_str(&nonzero_table("R", &bundle.r));
    out.push_str(&nonzero_table("rho", &bundle.ricci));
    out.push_str(&scalar_line("tau", &bundle.tau));
    out.push_str(&nonzero_table("rho*", &bundle.ricci_star));
    out.push_str(&scalar_line("tau*", &bundle.tau_star));
    out
}

pub fn report_line(r: &IdentityReport) -> String {
    match &r.witness {
        Some(w) => format!(
            "{:<8} {} ({}) max |.| = {} at [{}]",
            r.status.as_str(),
            r.id,
            r.category.as_str(),
            format_rational(&r.max_abs_residual),
            index_list(w)
        ),
        None => format!("{:<8} {} ({})", r.status.as_str(), r.id, r.category.as_str()),
    }
}
