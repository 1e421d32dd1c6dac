//! Exact rational scalars and dense frame-indexed tensors.
//!
//! A [`Tensor`] of type `(p, q)` over a `d`-dimensional frame stores `d^(p+q)`
//! rational components. Indices are laid out contravariant first, then
//! covariant, in row-major order, so the component `T^{a b}_{i j k}` lives at
//! index tuple `[a, b, i, j, k]`.
//!
//! All structure tensors in this crate are left-invariant, so components are
//! constants and covariant derivatives reduce to algebra on the connection
//! coefficients.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::levi_civita::Connection;

/// Exact rational number, always in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Checked division.
pub fn div(a: &Rational, b: &Rational) -> Result<Rational> {
    if b.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(a / b)
}

/// Parses `p` or `p/q` with an optional sign.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (text, None),
    };
    let num_ok = {
        let digits = num.strip_prefix(['+', '-']).unwrap_or(num);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !num_ok {
        return None;
    }
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = match den {
        Some(d) if !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()) => d.parse().ok()?,
        Some(_) => return None,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

/// Canonical text form: `p` for integers, `p/q` otherwise.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// The `i`-th frame vector.
pub fn basis(dim: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); dim];
    v[i] = Rational::one();
    v
}

pub fn vec_add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_scale(s: &Rational, a: &[Rational]) -> Vec<Rational> {
    a.iter().map(|x| s * x).collect()
}

/// `Σ s_i v_i` over a list of scaled vectors of common dimension.
pub fn vec_combine(dim: usize, terms: &[(Rational, &[Rational])]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); dim];
    for (s, v) in terms {
        if s.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(v.iter()) {
            if !x.is_zero() {
                *o += s * x;
            }
        }
    }
    out
}

fn sparse(v: &[Rational]) -> Vec<(usize, &Rational)> {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).collect()
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tensor {
    dim: usize,
    contra: usize,
    cov: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tensor({},{}; d={}) {{", self.contra, self.cov, self.dim)?;
        let mut first = true;
        for (idx, v) in self.nonzero() {
            if !first {
                write!(f, ",")?;
            }
            first = false;
            write!(f, " {idx:?}: {v}")?;
        }
        write!(f, " }}")
    }
}

impl Tensor {
    pub fn zeros(dim: usize, contra: usize, cov: usize) -> Self {
        assert!(dim > 0, "frame dimension must be positive");
        let len = dim.pow((contra + cov) as u32);
        Tensor {
            dim,
            contra,
            cov,
            data: vec![Rational::zero(); len],
        }
    }

    pub fn from_fn(
        dim: usize,
        contra: usize,
        cov: usize,
        mut f: impl FnMut(&[usize]) -> Rational,
    ) -> Self {
        let mut t = Tensor::zeros(dim, contra, cov);
        let mut idx = vec![0usize; contra + cov];
        for slot in 0..t.data.len() {
            t.data[slot] = f(&idx);
            increment(&mut idx, dim);
        }
        t
    }

    pub fn from_components(dim: usize, contra: usize, cov: usize, data: Vec<Rational>) -> Result<Self> {
        let expected = dim.pow((contra + cov) as u32);
        if dim == 0 || data.len() != expected {
            return Err(Error::DimMismatch(format!(
                "({contra},{cov}) tensor over dimension {dim} needs {expected} components, got {}",
                data.len()
            )));
        }
        Ok(Tensor { dim, contra, cov, data })
    }

    pub fn scalar(value: Rational) -> Self {
        Tensor {
            dim: 1,
            contra: 0,
            cov: 0,
            data: vec![value],
        }
    }

    /// Rank-0 tensor tagged with a frame dimension.
    pub fn scalar_in(dim: usize, value: Rational) -> Self {
        Tensor {
            dim,
            contra: 0,
            cov: 0,
            data: vec![value],
        }
    }

    pub fn vector(components: Vec<Rational>) -> Self {
        let dim = components.len();
        Tensor {
            dim,
            contra: 1,
            cov: 0,
            data: components,
        }
    }

    pub fn covector(components: Vec<Rational>) -> Self {
        let dim = components.len();
        Tensor {
            dim,
            contra: 0,
            cov: 1,
            data: components,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Tensor::from_fn(dim, 1, 1, |ix| if ix[0] == ix[1] { Rational::one() } else { Rational::zero() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn contra_rank(&self) -> usize {
        self.contra
    }

    pub fn cov_rank(&self) -> usize {
        self.cov
    }

    pub fn order(&self) -> usize {
        self.contra + self.cov
    }

    pub fn components(&self) -> &[Rational] {
        &self.data
    }

    pub fn into_components(self) -> Vec<Rational> {
        self.data
    }

    fn offset(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.order(), "index arity");
        idx.iter().fold(0, |acc, &i| {
            assert!(i < self.dim, "index {i} out of range for dimension {}", self.dim);
            acc * self.dim + i
        })
    }

    pub fn get(&self, idx: &[usize]) -> &Rational {
        &self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: Rational) {
        let o = self.offset(idx);
        self.data[o] = value;
    }

    /// Scalar value of a rank-0 tensor.
    pub fn value(&self) -> &Rational {
        assert_eq!(self.order(), 0, "value() on a non-scalar tensor");
        &self.data[0]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Nonzero components with their index tuples, in index order.
    pub fn nonzero(&self) -> Vec<(Vec<usize>, &Rational)> {
        let mut out = Vec::new();
        let mut idx = vec![0usize; self.order()];
        for v in &self.data {
            if !v.is_zero() {
                out.push((idx.clone(), v));
            }
            increment(&mut idx, self.dim);
        }
        out
    }

    /// Largest absolute component and the first index tuple attaining it.
    pub fn max_abs(&self) -> (Rational, Option<Vec<usize>>) {
        let mut best = Rational::zero();
        let mut at = None;
        for (idx, v) in self.nonzero() {
            let a = v.abs();
            if a > best {
                best = a;
                at = Some(idx);
            }
        }
        (best, at)
    }

    fn check_same_shape(&self, other: &Tensor) -> Result<()> {
        if self.dim != other.dim || self.contra != other.contra || self.cov != other.cov {
            return Err(Error::DimMismatch(format!(
                "({},{}; d={}) vs ({},{}; d={})",
                self.contra, self.cov, self.dim, other.contra, other.cov, other.dim
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Tensor) -> Result<Tensor> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn checked_sub(&self, other: &Tensor) -> Result<Tensor> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    /// Component-wise difference; panics on shape mismatch.
    pub fn minus(&self, other: &Tensor) -> Tensor {
        self.checked_sub(other).expect("tensor shapes must agree")
    }

    pub fn plus(&self, other: &Tensor) -> Tensor {
        self.checked_add(other).expect("tensor shapes must agree")
    }

    fn zip_with(&self, other: &Tensor, f: impl Fn(&Rational, &Rational) -> Rational) -> Tensor {
        Tensor {
            dim: self.dim,
            contra: self.contra,
            cov: self.cov,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn scaled(&self, s: &Rational) -> Tensor {
        Tensor {
            dim: self.dim,
            contra: self.contra,
            cov: self.cov,
            data: self.data.iter().map(|a| s * a).collect(),
        }
    }

    pub fn require_rank(&self, contra: usize, cov: usize) -> Result<()> {
        if self.contra != contra || self.cov != cov {
            return Err(Error::RankMismatch {
                expected_contra: contra,
                expected_cov: cov,
                found_contra: self.contra,
                found_cov: self.cov,
            });
        }
        Ok(())
    }

    /// Tensor product; contravariant indices of `self` then `other`, then
    /// covariant indices of `self` then `other`.
    pub fn outer(&self, other: &Tensor) -> Result<Tensor> {
        if self.dim != other.dim && self.order() > 0 && other.order() > 0 {
            return Err(Error::DimMismatch(format!("{} vs {}", self.dim, other.dim)));
        }
        let dim = if self.order() > 0 { self.dim } else { other.dim };
        let (p1, q1) = (self.contra, self.cov);
        let (p2, q2) = (other.contra, other.cov);
        Ok(Tensor::from_fn(dim, p1 + p2, q1 + q2, |ix| {
            let mut a = Vec::with_capacity(p1 + q1);
            a.extend_from_slice(&ix[..p1]);
            a.extend_from_slice(&ix[p1 + p2..p1 + p2 + q1]);
            let mut b = Vec::with_capacity(p2 + q2);
            b.extend_from_slice(&ix[p1..p1 + p2]);
            b.extend_from_slice(&ix[p1 + p2 + q1..]);
            self.get(&a) * other.get(&b)
        }))
    }

    /// Evaluates a `(0,k)` tensor on `k` vectors.
    pub fn eval(&self, args: &[&[Rational]]) -> Rational {
        assert_eq!(self.contra, 0, "eval() needs a covariant tensor");
        assert_eq!(args.len(), self.cov, "eval() arity");
        let sparse_args: Vec<_> = args.iter().map(|a| sparse(a)).collect();
        let mut acc = Rational::zero();
        let mut idx = vec![0usize; self.cov];
        self.eval_rec(&sparse_args, 0, &mut idx, Rational::one(), &mut acc, &[]);
        acc
    }

    /// Evaluates a `(1,k)` tensor on `k` vectors, giving a vector.
    pub fn apply(&self, args: &[&[Rational]]) -> Vec<Rational> {
        assert_eq!(self.contra, 1, "apply() needs a (1,k) tensor");
        assert_eq!(args.len(), self.cov, "apply() arity");
        let sparse_args: Vec<_> = args.iter().map(|a| sparse(a)).collect();
        (0..self.dim)
            .map(|a| {
                let mut acc = Rational::zero();
                let mut idx = vec![0usize; self.cov];
                self.eval_rec(&sparse_args, 0, &mut idx, Rational::one(), &mut acc, &[a]);
                acc
            })
            .collect()
    }

    fn eval_rec(
        &self,
        args: &[Vec<(usize, &Rational)>],
        slot: usize,
        idx: &mut Vec<usize>,
        weight: Rational,
        acc: &mut Rational,
        prefix: &[usize],
    ) {
        if slot == args.len() {
            let mut full = prefix.to_vec();
            full.extend_from_slice(idx);
            let c = self.get(&full);
            if !c.is_zero() {
                *acc += weight * c;
            }
            return;
        }
        for &(i, x) in &args[slot] {
            idx[slot] = i;
            self.eval_rec(args, slot + 1, idx, &weight * x, acc, prefix);
        }
    }

    /// Components of a `(1,0)` or `(0,1)` tensor.
    pub fn as_slice(&self) -> &[Rational] {
        assert_eq!(self.order(), 1, "as_slice() needs a rank-1 tensor");
        &self.data
    }

    /// Row-major `d×d` matrix of a rank-2 tensor.
    pub fn matrix(&self) -> Vec<Vec<Rational>> {
        assert_eq!(self.order(), 2, "matrix() needs a rank-2 tensor");
        self.data.chunks(self.dim).map(<[Rational]>::to_vec).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        assert_eq!(self.order(), 2);
        (0..self.dim).all(|i| (0..self.dim).all(|j| self.get(&[i, j]) == self.get(&[j, i])))
    }

    /// Swaps two index positions of the same variance.
    pub fn transpose(&self, a: usize, b: usize) -> Tensor {
        Tensor::from_fn(self.dim, self.contra, self.cov, |ix| {
            let mut j = ix.to_vec();
            j.swap(a, b);
            self.get(&j).clone()
        })
    }
}

fn increment(idx: &mut [usize], dim: usize) {
    for slot in idx.iter_mut().rev() {
        *slot += 1;
        if *slot < dim {
            return;
        }
        *slot = 0;
    }
}

/// A metric together with its exact inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricPair {
    pub g: Tensor,
    pub g_inv: Tensor,
}

impl MetricPair {
    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn inner(&self, x: &[Rational], y: &[Rational]) -> Rational {
        self.g.eval(&[x, y])
    }

    /// Lowers a vector to the covector `g(x, ·)`.
    pub fn flat_vec(&self, x: &[Rational]) -> Vec<Rational> {
        let d = self.dim();
        (0..d)
            .map(|j| {
                (0..d)
                    .filter(|&i| !x[i].is_zero())
                    .map(|i| &x[i] * self.g.get(&[i, j]))
                    .sum()
            })
            .collect()
    }

    /// Raises a covector with the inverse metric.
    pub fn sharp_vec(&self, form: &[Rational]) -> Vec<Rational> {
        let d = self.dim();
        (0..d)
            .map(|i| {
                (0..d)
                    .filter(|&j| !form[j].is_zero())
                    .map(|j| self.g_inv.get(&[i, j]) * &form[j])
                    .sum()
            })
            .collect()
    }

    /// `Σ_{ij} g^{ij} f(i, j)` over the full frame.
    pub fn trace(&self, mut f: impl FnMut(usize, usize) -> Rational) -> Rational {
        let d = self.dim();
        let mut acc = Rational::zero();
        for i in 0..d {
            for j in 0..d {
                let w = self.g_inv.get(&[i, j]);
                if !w.is_zero() {
                    acc += w * f(i, j);
                }
            }
        }
        acc
    }
}

/// Exact inverse of a symmetric metric by Gauss-Jordan elimination.
pub fn metric_inverse(g: &Tensor) -> Result<MetricPair> {
    g.require_rank(0, 2)?;
    let d = g.dim();
    for i in 0..d {
        for j in (i + 1)..d {
            if g.get(&[i, j]) != g.get(&[j, i]) {
                return Err(Error::NotSymmetric(i, j));
            }
        }
    }
    let inv = invert(&g.matrix()).ok_or(Error::SingularMetric)?;
    let g_inv = Tensor::from_fn(d, 2, 0, |ix| inv[ix[0]][ix[1]].clone());
    Ok(MetricPair { g: g.clone(), g_inv })
}

fn invert(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let p = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x /= &p;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            let pivot_row = a[col].clone();
            for (x, p) in a[r].iter_mut().zip(&pivot_row) {
                *x -= &factor * p;
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Contracts two index positions. Positions count contravariant slots first,
/// then covariant ones. Two slots of the same variance are traced through
/// the metric.
pub fn contract(t: &Tensor, slot_a: usize, slot_b: usize, metric: Option<&MetricPair>) -> Result<Tensor> {
    let order = t.order();
    if slot_a == slot_b || slot_a >= order || slot_b >= order {
        return Err(Error::SlotMismatch(slot_a, slot_b));
    }
    let (a, b) = if slot_a < slot_b { (slot_a, slot_b) } else { (slot_b, slot_a) };
    let a_up = a < t.contra;
    let b_up = b < t.contra;
    let d = t.dim;
    let weights: Option<&Tensor> = match (a_up, b_up) {
        (true, false) | (false, true) => None,
        (false, false) => Some(&metric.ok_or(Error::MissingMetric)?.g_inv),
        (true, true) => Some(&metric.ok_or(Error::MissingMetric)?.g),
    };
    if let Some(m) = metric {
        if m.dim() != d {
            return Err(Error::DimMismatch(format!("metric {} vs tensor {}", m.dim(), d)));
        }
    }
    let removed_up = usize::from(a_up) + usize::from(b_up);
    let new_contra = t.contra - removed_up;
    let new_cov = t.cov - (2 - removed_up);
    Ok(Tensor::from_fn(d, new_contra, new_cov, |ix| {
        let mut full = Vec::with_capacity(order);
        let mut rest = ix.iter();
        for slot in 0..order {
            if slot == a || slot == b {
                full.push(0);
            } else {
                full.push(*rest.next().unwrap());
            }
        }
        let mut acc = Rational::zero();
        match weights {
            None => {
                for i in 0..d {
                    full[a] = i;
                    full[b] = i;
                    acc += t.get(&full);
                }
            }
            Some(w) => {
                for i in 0..d {
                    for j in 0..d {
                        let wij = w.get(&[i, j]);
                        if wij.is_zero() {
                            continue;
                        }
                        full[a] = i;
                        full[b] = j;
                        acc += wij * t.get(&full);
                    }
                }
            }
        }
        acc
    }))
}

/// Metric dual vector of a 1-form: `form(·) = g(sharp, ·)`.
pub fn sharp(form: &Tensor, metric: &MetricPair) -> Result<Tensor> {
    form.require_rank(0, 1)?;
    if form.dim() != metric.dim() {
        return Err(Error::DimMismatch(format!("form {} vs metric {}", form.dim(), metric.dim())));
    }
    Ok(Tensor::vector(metric.sharp_vec(form.as_slice())))
}

/// Lowers a vector to the 1-form `g(x, ·)`.
pub fn flat(vector: &Tensor, metric: &MetricPair) -> Result<Tensor> {
    vector.require_rank(1, 0)?;
    if vector.dim() != metric.dim() {
        return Err(Error::DimMismatch(format!("vector {} vs metric {}", vector.dim(), metric.dim())));
    }
    Ok(Tensor::covector(metric.flat_vec(vector.as_slice())))
}

/// `(S⊼P)(x,y,z,w) = S(x,z)P(y,w) − S(y,z)P(x,w) + S(y,w)P(x,z) − S(x,w)P(y,z)`.
pub fn kulkarni_nomizu(s: &Tensor, p: &Tensor) -> Result<Tensor> {
    s.require_rank(0, 2)?;
    p.require_rank(0, 2)?;
    if s.dim() != p.dim() {
        return Err(Error::DimMismatch(format!("{} vs {}", s.dim(), p.dim())));
    }
    Ok(Tensor::from_fn(s.dim(), 0, 4, |ix| {
        let (x, y, z, w) = (ix[0], ix[1], ix[2], ix[3]);
        s.get(&[x, z]) * p.get(&[y, w]) - s.get(&[y, z]) * p.get(&[x, w]) + s.get(&[y, w]) * p.get(&[x, z])
            - s.get(&[x, w]) * p.get(&[y, z])
    }))
}

/// Covariant derivative of a tensor with constant frame components.
///
/// The result has one extra covariant slot, placed first, holding the
/// direction: `(∇t)(b_i, ...) = (∇_{b_i} t)(...)`.
pub fn covariant_derivative(t: &Tensor, conn: &Connection) -> Result<Tensor> {
    let d = t.dim();
    if conn.dim() != d {
        return Err(Error::DimMismatch(format!("tensor {} vs connection {}", d, conn.dim())));
    }
    let (p, q) = (t.contra, t.cov);
    Ok(Tensor::from_fn(d, p, q + 1, |ix| {
        let dir = ix[p];
        let mut src: Vec<usize> = ix[..p].to_vec();
        src.extend_from_slice(&ix[p + 1..]);
        let mut acc = Rational::zero();
        for s in 0..p {
            let a = src[s];
            let mut j = src.clone();
            for c in 0..d {
                let gamma = conn.coeff(dir, c, a);
                if gamma.is_zero() {
                    continue;
                }
                j[s] = c;
                acc += gamma * t.get(&j);
            }
        }
        for s in p..p + q {
            let b = src[s];
            let mut j = src.clone();
            for m in 0..d {
                let gamma = conn.coeff(dir, b, m);
                if gamma.is_zero() {
                    continue;
                }
                j[s] = m;
                acc -= gamma * t.get(&j);
            }
        }
        acc
    }))
}

/// Inertia `(positive, negative, zero)` of a symmetric matrix, computed by
/// exact congruence diagonalisation.
pub fn inertia(t: &Tensor) -> Result<(usize, usize, usize)> {
    t.require_rank(0, 2)?;
    if !t.is_symmetric() {
        return Err(Error::NotSymmetric(0, 0));
    }
    let mut a = t.matrix();
    let n = a.len();
    let (mut pos, mut neg, mut zero) = (0, 0, 0);
    let mut k = 0;
    while k < n {
        if let Some(p) = (k..n).find(|&i| !a[i][i].is_zero()) {
            a.swap(k, p);
            for row in a.iter_mut() {
                row.swap(k, p);
            }
        } else if let Some((i, j)) = (k..n)
            .flat_map(|i| (k..n).map(move |j| (i, j)))
            .find(|&(i, j)| i != j && !a[i][j].is_zero())
        {
            // a_ii = a_jj = 0 here; adding row/col j to i makes a_ii = 2 a_ij.
            let row_j = a[j].clone();
            for (x, v) in a[i].iter_mut().zip(row_j) {
                *x += v;
            }
            for row in a.iter_mut() {
                let v = row[j].clone();
                row[i] += v;
            }
            a.swap(k, i);
            for row in a.iter_mut() {
                row.swap(k, i);
            }
        } else {
            zero += n - k;
            break;
        }
        let pivot = a[k][k].clone();
        if pivot.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for r in (k + 1)..n {
            if a[r][k].is_zero() {
                continue;
            }
            let f = &a[r][k] / &pivot;
            let pivot_row = a[k].clone();
            for (x, p) in a[r][k..].iter_mut().zip(&pivot_row[k..]) {
                *x -= &f * p;
            }
        }
        for x in &mut a[k][k + 1..] {
            *x = Rational::zero();
        }
        k += 1;
    }
    Ok((pos, neg, zero))
}
