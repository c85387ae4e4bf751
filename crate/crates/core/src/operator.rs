//! Exact operators on a finite window: partial injections of basis indices
//! with escape flags, and sparse matrices over the Gaussian rationals.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Mul};

use num::{BigInt, BigRational, Complex, One, ToPrimitive, Zero};
use serde_json::{json, Value};

pub type Scalar = Complex<BigRational>;

pub fn scalar(re: i64, im: i64) -> Scalar {
    Complex::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
}

pub fn abs_sq(z: &Scalar) -> BigRational {
    &z.re * &z.re + &z.im * &z.im
}

fn int_json(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(x) => json!(x),
        None => json!(v.to_string()),
    }
}

/// Partial map on window indices, injective where defined.
///
/// `escapes` are domain indices whose true image lies outside the window;
/// `co_escapes` are range-side indices whose true preimage does.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartialInjection {
    dim: usize,
    map: BTreeMap<usize, usize>,
    image: BTreeSet<usize>,
    escapes: BTreeSet<usize>,
    co_escapes: BTreeSet<usize>,
}

impl PartialInjection {
    pub fn empty(dim: usize) -> Self {
        PartialInjection { dim, ..Default::default() }
    }

    pub fn identity_on(dim: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut t = PartialInjection::empty(dim);
        for i in indices {
            t.insert(i, i);
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Panics if `to` already has a preimage or an index is out of range.
    pub fn insert(&mut self, from: usize, to: usize) {
        assert!(from < self.dim && to < self.dim, "index outside window");
        if let Some(old) = self.map.get(&from) {
            self.image.remove(old);
        }
        assert!(self.image.insert(to), "not injective at {to}");
        self.map.insert(from, to);
    }

    pub fn flag_escape(&mut self, from: usize) {
        self.escapes.insert(from);
    }

    pub fn flag_co_escape(&mut self, to: usize) {
        self.co_escapes.insert(to);
    }

    pub fn get(&self, i: usize) -> Option<usize> {
        self.map.get(&i).copied()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.map.iter().map(|(&a, &b)| (a, b))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn escapes(&self) -> &BTreeSet<usize> {
        &self.escapes
    }

    pub fn co_escapes(&self) -> &BTreeSet<usize> {
        &self.co_escapes
    }

    pub fn is_escape_free(&self) -> bool {
        self.escapes.is_empty() && self.co_escapes.is_empty()
    }

    pub fn domain(&self) -> BTreeSet<usize> {
        self.map.keys().copied().collect()
    }

    pub fn range(&self) -> BTreeSet<usize> {
        self.image.clone()
    }

    pub fn adjoint(&self) -> Self {
        PartialInjection {
            dim: self.dim,
            map: self.map.iter().map(|(&a, &b)| (b, a)).collect(),
            image: self.domain(),
            escapes: self.co_escapes.clone(),
            co_escapes: self.escapes.clone(),
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &PartialInjection) -> PartialInjection {
        assert_eq!(self.dim, other.dim, "window mismatch");
        let mut out = PartialInjection::empty(self.dim);
        out.escapes = other.escapes.clone();
        for (i, j) in other.pairs() {
            if let Some(k) = self.get(j) {
                out.insert(i, k);
            } else if self.escapes.contains(&j) {
                out.escapes.insert(i);
            }
        }
        out.co_escapes = self.co_escapes.clone();
        for &j in &other.co_escapes {
            if let Some(k) = self.get(j) {
                out.co_escapes.insert(k);
            }
        }
        out
    }

    /// Equality on indices where neither side escapes.
    pub fn agrees_with(&self, other: &PartialInjection) -> bool {
        self.disagreements(other).is_empty()
    }

    pub fn disagreements(&self, other: &PartialInjection) -> Vec<usize> {
        (0..self.dim)
            .filter(|i| !self.escapes.contains(i) && !other.escapes.contains(i))
            .filter(|&i| self.get(i) != other.get(i))
            .collect()
    }

    /// Defined exactly on `indices`, fixing each.
    pub fn is_identity_on(&self, indices: &BTreeSet<usize>) -> bool {
        self.domain() == *indices && self.pairs().all(|(a, b)| a == b)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "map": self.pairs().map(|(a, b)| [a, b]).collect::<Vec<_>>(),
            "escapes": self.escapes.iter().collect::<Vec<_>>(),
        })
    }
}

/// Sparse square matrix over the Gaussian rationals; zero entries are never
/// stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowMatrix {
    dim: usize,
    entries: BTreeMap<(usize, usize), Scalar>,
}

impl WindowMatrix {
    pub fn zero(dim: usize) -> Self {
        WindowMatrix { dim, entries: BTreeMap::new() }
    }

    pub fn identity_on(dim: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut m = WindowMatrix::zero(dim);
        for i in indices {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn unit(dim: usize, i: usize, j: usize) -> Self {
        let mut m = WindowMatrix::zero(dim);
        m.set(i, j, Scalar::one());
        m
    }

    /// Matrix of a partial injection: column `from` has a 1 in row `to`.
    pub fn from_injection(t: &PartialInjection) -> Self {
        let mut m = WindowMatrix::zero(t.dim());
        for (from, to) in t.pairs() {
            m.set(to, from, Scalar::one());
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.entries.get(&(i, j)).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        assert!(i < self.dim && j < self.dim, "index outside window");
        if v.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), v);
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.entries.iter().map(|(&(i, j), v)| (i, j, v))
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scale(&self, k: &Scalar) -> Self {
        let mut out = WindowMatrix::zero(self.dim);
        for (i, j, v) in self.entries() {
            out.set(i, j, v * k);
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = WindowMatrix::zero(self.dim);
        for (i, j, v) in self.entries() {
            out.set(j, i, v.conj());
        }
        out
    }

    /// Image of a sparse column vector.
    pub fn apply(&self, x: &BTreeMap<usize, Scalar>) -> BTreeMap<usize, Scalar> {
        let mut out: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (i, j, v) in self.entries() {
            if let Some(c) = x.get(&j) {
                *out.entry(i).or_insert_with(Scalar::zero) += v * c;
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    /// Squared norm of column `j`, i.e. `‖M e_j‖²`.
    pub fn column_norm_sq(&self, j: usize) -> BigRational {
        self.entries()
            .filter(|&(_, c, _)| c == j)
            .map(|(_, _, v)| abs_sq(v))
            .fold(BigRational::zero(), |a, b| a + b)
    }

    /// Conjugation `e_i e_j* ↦ e_σi e_σj*`; entries on indices outside the
    /// domain of `sigma` are dropped.
    pub fn relabel(&self, sigma: &PartialInjection) -> Self {
        let mut out = WindowMatrix::zero(self.dim);
        for (i, j, v) in self.entries() {
            if let (Some(a), Some(b)) = (sigma.get(i), sigma.get(j)) {
                out.set(a, b, v.clone());
            }
        }
        out
    }

    pub fn support_indices(&self) -> BTreeSet<usize> {
        self.entries().flat_map(|(i, j, _)| [i, j]).collect()
    }

    pub fn to_json(&self, basis: &[String]) -> Value {
        let entries: Vec<Value> = self
            .entries()
            .map(|(i, j, v)| {
                json!([
                    i,
                    j,
                    int_json(v.re.numer()),
                    int_json(v.re.denom()),
                    int_json(v.im.numer()),
                    int_json(v.im.denom())
                ])
            })
            .collect();
        json!({ "basis": basis, "entries": entries })
    }
}

impl Add for &WindowMatrix {
    type Output = WindowMatrix;
    fn add(self, rhs: &WindowMatrix) -> WindowMatrix {
        assert_eq!(self.dim, rhs.dim, "window mismatch");
        let mut out = self.clone();
        for (i, j, v) in rhs.entries() {
            let s = out.get(i, j) + v;
            out.set(i, j, s);
        }
        out
    }
}

impl Mul for &WindowMatrix {
    type Output = WindowMatrix;
    fn mul(self, rhs: &WindowMatrix) -> WindowMatrix {
        assert_eq!(self.dim, rhs.dim, "window mismatch");
        let mut rows: BTreeMap<usize, Vec<(usize, &Scalar)>> = BTreeMap::new();
        for (k, j, v) in rhs.entries() {
            rows.entry(k).or_default().push((j, v));
        }
        let mut acc: BTreeMap<(usize, usize), Scalar> = BTreeMap::new();
        for (i, k, a) in self.entries() {
            for &(j, b) in rows.get(&k).map(Vec::as_slice).unwrap_or(&[]) {
                *acc.entry((i, j)).or_insert_with(Scalar::zero) += a * b;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        WindowMatrix { dim: self.dim, entries: acc }
    }
}

/// Random Gaussian rational with small numerators, for sampled checks.
pub fn random_scalar<R: rand::Rng>(rng: &mut R) -> Scalar {
    let part = |rng: &mut R| {
        let n: i64 = rng.gen_range(-9..=9);
        let d: i64 = rng.gen_range(1..=5);
        BigRational::new(n.into(), d.into())
    };
    let re = part(rng);
    let im = part(rng);
    Complex::new(re, im)
}
