//! Line-oriented manifold spec files.
//!
//! ```text
//! pim 1
//! n = 2
//! param lambda = 1
//! bracket[0,1] = lambda*e2 - e3
//! phi[1] = e3
//! xi = e0
//! eta = 1, 0, 0, 0, 0
//! g = diag(1, 1, 1, 1, 1)
//! ```

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::pi_manifold::{ensure_valid, LieAlgebra, PiManifoldInstance, PiStructure};
use crate::tensor::{format_rational, parse_rational, Rational, Tensor};

pub const HEADER: &str = "pim 1";
const DEFAULT_NAME: &str = "unnamed";

/// One non-blank, comment-stripped line.
struct Stmt<'a> {
    line: usize,
    /// Byte offset of `text` within the original line.
    offset: usize,
    text: &'a str,
}

impl<'a> Stmt<'a> {
    fn err(&self, at: usize, msg: impl Into<String>) -> Error {
        Error::parse(self.line, self.offset + at + 1, msg)
    }

    /// Splits `lhs = rhs`, returning trimmed parts and the rhs offset in `text`.
    fn assignment(&self) -> Option<(&'a str, &'a str, usize)> {
        let eq = self.text.find('=')?;
        let rhs_raw = &self.text[eq + 1..];
        let lead = rhs_raw.len() - rhs_raw.trim_start().len();
        Some((self.text[..eq].trim(), rhs_raw.trim(), eq + 1 + lead))
    }
}

fn statements(text: &str) -> Vec<Stmt<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let body = raw.split('#').next().unwrap_or("");
            let trimmed = body.trim_start();
            let offset = body.len() - trimmed.len();
            let trimmed = trimmed.trim_end();
            (!trimmed.is_empty()).then_some(Stmt {
                line: i + 1,
                offset,
                text: trimmed,
            })
        })
        .collect()
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn basis_index(s: &str) -> Option<usize> {
    s.strip_prefix('e').filter(|k| !k.is_empty() && k.bytes().all(|b| b.is_ascii_digit()))?.parse().ok()
}

/// Parses `[i]` or `[i,j]` after a keyword.
fn indices(stmt: &Stmt<'_>, lhs: &str, keyword: &str, count: usize, d: usize) -> Result<Vec<usize>> {
    let inner = lhs[keyword.len()..]
        .trim()
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| stmt.err(keyword.len(), format!("expected `{keyword}[...]`")))?;
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    if parts.len() != count {
        return Err(stmt.err(keyword.len(), format!("`{keyword}` takes {count} index(es)")));
    }
    parts
        .iter()
        .map(|p| match p.parse::<usize>() {
            Ok(i) if i < d => Ok(i),
            _ => Err(stmt.err(keyword.len(), format!("index `{p}` is not in 0..{d}"))),
        })
        .collect()
}

struct Scope<'p> {
    d: usize,
    params: &'p BTreeMap<String, Rational>,
}

impl Scope<'_> {
    fn scalar(&self, stmt: &Stmt<'_>, tok: &str, at: usize) -> Result<Rational> {
        if let Some(r) = parse_rational(tok) {
            return Ok(r);
        }
        if let Some(r) = self.params.get(tok) {
            return Ok(r.clone());
        }
        let (neg, body) = match tok.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, tok.strip_prefix('+').unwrap_or(tok)),
        };
        match self.params.get(body) {
            Some(r) if neg => Ok(-r.clone()),
            Some(r) => Ok(r.clone()),
            None if is_ident(body) => Err(stmt.err(at, format!("unknown parameter `{body}`"))),
            None => Err(stmt.err(at, format!("invalid rational `{tok}`"))),
        }
    }

    fn scalar_list(&self, stmt: &Stmt<'_>, text: &str, at: usize) -> Result<Vec<Rational>> {
        let mut out = Vec::new();
        let mut pos = at;
        for part in text.split(',') {
            let lead = part.len() - part.trim_start().len();
            out.push(self.scalar(stmt, part.trim(), pos + lead)?);
            pos += part.len() + 1;
        }
        if out.len() != self.d {
            return Err(stmt.err(at, format!("expected {} values, found {}", self.d, out.len())));
        }
        Ok(out)
    }

    /// `±c*ek` terms; `c` is a rational literal or a parameter and may be
    /// omitted. A lone `0` is the zero vector.
    fn combo(&self, stmt: &Stmt<'_>, text: &str, at: usize) -> Result<Vec<Rational>> {
        let mut v = vec![Rational::zero(); self.d];
        if text == "0" {
            return Ok(v);
        }
        let bytes = text.as_bytes();
        let mut i = 0;
        let mut first = true;
        while i < bytes.len() {
            while i < bytes.len() && bytes[i].is_ascii_whitespace() {
                i += 1;
            }
            let mut sign = Rational::one();
            if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
                if bytes[i] == b'-' {
                    sign = -sign;
                }
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_whitespace() {
                    i += 1;
                }
            } else if !first {
                return Err(stmt.err(at + i, "expected `+` or `-` between terms"));
            }
            let start = i;
            while i < bytes.len() && !matches!(bytes[i], b'+' | b'-') {
                i += 1;
            }
            let term = text[start..i].trim_end();
            if term.is_empty() {
                return Err(stmt.err(at + start, "expected a term"));
            }
            let (coef, basis_tok, basis_at) = match term.split_once('*') {
                Some((c, b)) => {
                    let c_trim = c.trim();
                    let coef = self.scalar(stmt, c_trim, at + start)?;
                    let b_lead = b.len() - b.trim_start().len();
                    (coef, b.trim(), at + start + c.len() + 1 + b_lead)
                }
                None => (Rational::one(), term, at + start),
            };
            let k = basis_index(basis_tok)
                .ok_or_else(|| stmt.err(basis_at, format!("expected a basis symbol `ek`, found `{basis_tok}`")))?;
            if k >= self.d {
                return Err(stmt.err(basis_at, format!("basis symbol `{basis_tok}` is out of range 0..{}", self.d)));
            }
            v[k] += sign * coef;
            first = false;
        }
        Ok(v)
    }
}

fn first_word(s: &str) -> &str {
    s.split(|c: char| c == '[' || c.is_whitespace()).next().unwrap_or("")
}

/// Parses a spec file, applies `overrides` to declared parameters, and
/// validates the result.
pub fn parse_spec(text: &str, overrides: &BTreeMap<String, Rational>) -> Result<PiManifoldInstance> {
    let stmts = statements(text);
    let header = stmts.first().ok_or_else(|| Error::parse(1, 1, "empty spec file"))?;
    if header.text.split_whitespace().collect::<Vec<_>>() != ["pim", "1"] {
        return Err(header.err(0, format!("expected header `{HEADER}`")));
    }
    let body = &stmts[1..];

    let mut n: Option<usize> = None;
    let mut name: Option<String> = None;
    let mut params: BTreeMap<String, Rational> = BTreeMap::new();
    for stmt in body {
        let (lhs, rhs, rhs_at) = stmt.assignment().ok_or_else(|| stmt.err(0, "expected `=`"))?;
        match first_word(lhs) {
            "n" if lhs == "n" => {
                if n.is_some() {
                    return Err(stmt.err(0, "duplicate `n`"));
                }
                n = Some(match rhs.parse::<usize>() {
                    Ok(v) if v >= 1 => v,
                    _ => return Err(stmt.err(rhs_at, format!("`n` must be a positive integer, found `{rhs}`"))),
                });
            }
            "name" if lhs == "name" => {
                if name.is_some() {
                    return Err(stmt.err(0, "duplicate `name`"));
                }
                name = Some(rhs.to_string());
            }
            "param" => {
                let pname = lhs["param".len()..].trim();
                if !is_ident(pname) || basis_index(pname).is_some() {
                    return Err(stmt.err(5, format!("invalid parameter name `{pname}`")));
                }
                if params.contains_key(pname) {
                    return Err(stmt.err(5, format!("duplicate parameter `{pname}`")));
                }
                let value = parse_rational(rhs).ok_or_else(|| stmt.err(rhs_at, format!("invalid rational `{rhs}`")))?;
                params.insert(pname.to_string(), value);
            }
            _ => {}
        }
    }
    let n = n.ok_or_else(|| Error::parse(header.line, 1, "missing `n = ...`"))?;
    for (k, v) in overrides {
        match params.get_mut(k) {
            Some(slot) => *slot = v.clone(),
            None => return Err(Error::parse(0, 0, format!("override of undeclared parameter `{k}`"))),
        }
    }

    let d = 2 * n + 1;
    let scope = Scope { d, params: &params };
    let mut brackets: BTreeMap<(usize, usize), Vec<Rational>> = BTreeMap::new();
    let mut phi_cols: BTreeMap<usize, Vec<Rational>> = BTreeMap::new();
    let mut xi: Option<Vec<Rational>> = None;
    let mut eta: Option<Vec<Rational>> = None;
    let mut g = vec![vec![Rational::zero(); d]; d];
    let mut g_diag_seen = false;

    for stmt in body {
        let (lhs, rhs, rhs_at) = stmt.assignment().expect("checked in the first pass");
        match first_word(lhs) {
            "n" | "name" | "param" => {}
            "bracket" => {
                let ix = indices(stmt, lhs, "bracket", 2, d)?;
                let (i, j) = (ix[0], ix[1]);
                if i == j {
                    return Err(stmt.err(0, "bracket of a basis vector with itself is zero"));
                }
                let mut v = scope.combo(stmt, rhs, rhs_at)?;
                let key = if i < j {
                    (i, j)
                } else {
                    v.iter_mut().for_each(|c| *c = -c.clone());
                    (j, i)
                };
                if brackets.insert(key, v).is_some() {
                    return Err(stmt.err(0, format!("duplicate bracket [{},{}]", key.0, key.1)));
                }
            }
            "phi" => {
                let i = indices(stmt, lhs, "phi", 1, d)?[0];
                if phi_cols.insert(i, scope.combo(stmt, rhs, rhs_at)?).is_some() {
                    return Err(stmt.err(0, format!("duplicate phi[{i}]")));
                }
            }
            "xi" if lhs == "xi" => {
                if xi.replace(scope.combo(stmt, rhs, rhs_at)?).is_some() {
                    return Err(stmt.err(0, "duplicate `xi`"));
                }
            }
            "eta" if lhs == "eta" => {
                if eta.replace(scope.scalar_list(stmt, rhs, rhs_at)?).is_some() {
                    return Err(stmt.err(0, "duplicate `eta`"));
                }
            }
            "eta" => {
                let i = indices(stmt, lhs, "eta", 1, d)?[0];
                let slot = eta.get_or_insert_with(|| vec![Rational::zero(); d]);
                slot[i] = scope.scalar(stmt, rhs, rhs_at)?;
            }
            "g" if lhs == "g" => {
                let inner = rhs
                    .strip_prefix("diag(")
                    .and_then(|s| s.strip_suffix(')'))
                    .ok_or_else(|| stmt.err(rhs_at, "expected `diag(...)`"))?;
                if g_diag_seen {
                    return Err(stmt.err(0, "duplicate `g = diag(...)`"));
                }
                g_diag_seen = true;
                for (i, v) in scope.scalar_list(stmt, inner, rhs_at + 5)?.into_iter().enumerate() {
                    g[i][i] = v;
                }
            }
            "g" => {
                let ix = indices(stmt, lhs, "g", 2, d)?;
                let v = scope.scalar(stmt, rhs, rhs_at)?;
                g[ix[0]][ix[1]] = v.clone();
                g[ix[1]][ix[0]] = v;
            }
            other => return Err(stmt.err(0, format!("unknown statement `{other}`"))),
        }
    }

    let first = body.first().map_or(header.line, |s| s.line);
    let xi = xi.ok_or_else(|| Error::parse(first, 1, "missing `xi = ...`"))?;
    let eta = eta.ok_or_else(|| Error::parse(first, 1, "missing `eta = ...`"))?;
    let algebra = LieAlgebra::from_brackets(d, &brackets)?;
    let phi = Tensor::from_fn(d, 1, 1, |ix| {
        phi_cols.get(&ix[1]).map_or_else(Rational::zero, |col| col[ix[0]].clone())
    });
    let g = Tensor::from_fn(d, 0, 2, |ix| g[ix[0]][ix[1]].clone());
    let structure = PiStructure::new(phi, Tensor::vector(xi), Tensor::covector(eta), g).map_err(|e| match e {
        Error::SingularMetric => Error::Validation {
            identity: "g-nondegenerate".into(),
        },
        Error::NotSymmetric(..) => Error::Validation {
            identity: "g-symmetric".into(),
        },
        other => other,
    })?;
    let instance = PiManifoldInstance::new(name.unwrap_or_else(|| DEFAULT_NAME.to_string()), algebra, structure)?
        .with_params(params);
    ensure_valid(&instance)?;
    Ok(instance)
}

/// `c*ek` terms joined by signs, or `0`.
pub fn format_combo(v: &[Rational]) -> String {
    let mut out = String::new();
    for (k, c) in v.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
        let mag = c.abs();
        let sign = if c.is_negative() { "-" } else { "+" };
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(&format!(" {sign} "));
        }
        if !mag.is_one() {
            out.push_str(&format_rational(&mag));
            out.push('*');
        }
        out.push_str(&format!("e{k}"));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn join(values: impl IntoIterator<Item = Rational>) -> String {
    values.into_iter().map(|r| format_rational(&r)).collect::<Vec<_>>().join(", ")
}

/// Numeric spec text for `instance`; parameters are recorded but brackets are
/// written with their evaluated coefficients.
pub fn emit_spec(instance: &PiManifoldInstance) -> String {
    let d = instance.dim();
    let s = &instance.structure;
    let mut out = format!("{HEADER}\nname = {}\nn = {}\n", instance.name, instance.n());
    for (k, v) in &instance.params {
        out.push_str(&format!("param {k} = {}\n", format_rational(v)));
    }
    for i in 0..d {
        for j in i + 1..d {
            let b = instance.algebra.bracket_basis(i, j);
            if b.iter().any(|c| !c.is_zero()) {
                out.push_str(&format!("bracket[{i},{j}] = {}\n", format_combo(b)));
            }
        }
    }
    for i in 0..d {
        let col: Vec<Rational> = (0..d).map(|a| s.phi().get(&[a, i]).clone()).collect();
        if col.iter().any(|c| !c.is_zero()) {
            out.push_str(&format!("phi[{i}] = {}\n", format_combo(&col)));
        }
    }
    out.push_str(&format!("xi = {}\n", format_combo(s.xi_vec())));
    out.push_str(&format!("eta = {}\n", join(s.eta().as_slice().iter().cloned())));
    let g = &s.metric().g;
    out.push_str(&format!("g = diag({})\n", join((0..d).map(|i| g.get(&[i, i]).clone()))));
    for i in 0..d {
        for j in i + 1..d {
            let v = g.get(&[i, j]);
            if !v.is_zero() {
                out.push_str(&format!("g[{i},{j}] = {}\n", format_rational(v)));
            }
        }
    }
    out
}
