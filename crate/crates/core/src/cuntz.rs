//! Isometries `T_φi` built from partitions of a countable directed poset,
//! checked against the Cuntz relations on finite windows.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::PartialInjection;
use crate::path::Path;
use crate::poset::{Elem, Poset};
use crate::rep::represent;
use crate::window::{build_window, BasisWindow, WindowParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Arity {
    Finite(usize),
    Infinite,
}

/// A partition of ℕ into blocks `E_1, E_2, …` with bijections `φ_i: E_i → ℕ`.
pub trait PartitionScheme: fmt::Debug + Send + Sync {
    fn name(&self) -> String;
    fn arity(&self) -> Arity;
    /// Index `i >= 1` of the block containing `x`.
    fn block(&self, x: u64) -> usize;
    /// `φ_i(x)`, or `None` when `x ∉ E_i`.
    fn phi(&self, i: usize, x: u64) -> Option<u64>;
    /// `φ_i⁻¹(k)`, or `None` on overflow.
    fn phi_inv(&self, i: usize, k: u64) -> Option<u64>;
}

#[derive(Clone, Copy, Debug)]
pub struct Residue {
    pub n: u64,
}

impl PartitionScheme for Residue {
    fn name(&self) -> String {
        format!("residue({})", self.n)
    }

    fn arity(&self) -> Arity {
        Arity::Finite(self.n as usize)
    }

    fn block(&self, x: u64) -> usize {
        (x % self.n) as usize + 1
    }

    fn phi(&self, i: usize, x: u64) -> Option<u64> {
        (self.block(x) == i).then(|| (x - (i as u64 - 1)) / self.n)
    }

    fn phi_inv(&self, i: usize, k: u64) -> Option<u64> {
        k.checked_mul(self.n)?.checked_add(i as u64 - 1)
    }
}

/// `E_i = {2^{i-1}(2m+1) - 1}`: block index is one more than the number of
/// trailing zeros of `x + 1`.
#[derive(Clone, Copy, Debug)]
pub struct Dyadic;

impl PartitionScheme for Dyadic {
    fn name(&self) -> String {
        "dyadic".into()
    }

    fn arity(&self) -> Arity {
        Arity::Infinite
    }

    fn block(&self, x: u64) -> usize {
        (x + 1).trailing_zeros() as usize + 1
    }

    fn phi(&self, i: usize, x: u64) -> Option<u64> {
        (self.block(x) == i).then(|| ((x + 1) >> (i - 1)) / 2)
    }

    fn phi_inv(&self, i: usize, k: u64) -> Option<u64> {
        let odd = k.checked_mul(2)?.checked_add(1)?;
        let shift = u32::try_from(i - 1).ok()?;
        let v = odd.checked_shl(shift)?;
        (v >> shift == odd).then(|| v - 1)
    }
}

pub fn residue_scheme(n: u64) -> Result<Residue> {
    if n == 0 {
        return Err(Error::BadBlockIndex(0));
    }
    Ok(Residue { n })
}

pub fn dyadic_infinite_scheme() -> Dyadic {
    Dyadic
}

type Constructor = Box<dyn Fn(Option<u64>) -> Result<Box<dyn PartitionScheme>> + Send + Sync>;

/// Partition schemes selectable by name.
pub struct SchemeRegistry {
    entries: BTreeMap<String, Constructor>,
}

impl Default for SchemeRegistry {
    fn default() -> Self {
        let mut r = SchemeRegistry { entries: BTreeMap::new() };
        r.register("residue", |n| Ok(Box::new(residue_scheme(n.unwrap_or(2))?)));
        r.register("dyadic", |_| Ok(Box::new(Dyadic)));
        r
    }
}

impl SchemeRegistry {
    pub fn register<F>(&mut self, name: &str, ctor: F)
    where
        F: Fn(Option<u64>) -> Result<Box<dyn PartitionScheme>> + Send + Sync + 'static,
    {
        self.entries.insert(name.to_string(), Box::new(ctor));
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.keys().map(String::as_str).collect()
    }

    pub fn build(&self, name: &str, arity: Option<u64>) -> Result<Box<dyn PartitionScheme>> {
        match self.entries.get(name) {
            Some(ctor) => ctor(arity),
            None => Err(Error::Format(format!("unknown scheme {name:?}; known: {}", self.names().join(", ")))),
        }
    }
}

/// Directed window over an enumerated countable poset; element `k` of the
/// enumeration stands for `k ∈ ℕ`.
#[derive(Clone, Debug)]
pub struct CuntzWindow {
    window: BasisWindow,
}

impl CuntzWindow {
    /// ℕ cut to `{0, …, n-1}`.
    pub fn nat(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::DisconnectedPoset);
        }
        Self::from_poset(&Poset::chain(n))
    }

    pub fn from_poset(p: &Poset) -> Result<Self> {
        if !p.is_upward_directed() {
            return Err(Error::NotDirected);
        }
        if !p.is_monotone_enumeration() {
            return Err(Error::Format("elements must be listed in a monotone enumeration".into()));
        }
        Ok(CuntzWindow { window: build_window(p, WindowParams::Directed)? })
    }

    pub fn size(&self) -> u64 {
        self.window.poset().len() as u64
    }

    pub fn window(&self) -> &BasisWindow {
        &self.window
    }

    pub fn index(&self, a: u64, b: u64) -> usize {
        self.window.pair_index(Elem(a as u32), Elem(b as u32))
    }

    /// `(a, b)` with `e_{[a,b]}` at `idx`.
    pub fn pair(&self, idx: usize) -> (u64, u64) {
        let n = self.size() as usize;
        ((idx / n) as u64, (idx % n) as u64)
    }

    /// `T_{[a,b]}`.
    pub fn unit(&self, a: u64, b: u64) -> PartialInjection {
        represent(&self.window, self.window.path(self.index(a, b)))
    }
}

fn check_block(scheme: &dyn PartitionScheme, i: usize) -> Result<()> {
    match scheme.arity() {
        _ if i == 0 => Err(Error::BadBlockIndex(i)),
        Arity::Finite(n) if i > n => Err(Error::BadBlockIndex(i)),
        _ => Ok(()),
    }
}

/// `T_φi e_{[a,b]} = e_{[φ_i⁻¹(a), b]}`.
pub fn t_phi(w: &CuntzWindow, scheme: &dyn PartitionScheme, i: usize) -> Result<PartialInjection> {
    check_block(scheme, i)?;
    let n = w.size();
    let mut t = PartialInjection::empty(w.window.len());
    for a in 0..n {
        let target = scheme.phi_inv(i, a).filter(|&x| x < n);
        for b in 0..n {
            match target {
                Some(x) => t.insert(w.index(a, b), w.index(x, b)),
                None => t.flag_escape(w.index(a, b)),
            }
        }
    }
    for c in 0..n {
        if scheme.phi(i, c).is_some_and(|k| k >= n) {
            for b in 0..n {
                t.flag_co_escape(w.index(c, b));
            }
        }
    }
    Ok(t)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Region {
    /// Every `[a, b]` with `a <= a_max` is certified; `None` if not even
    /// `a = 0` is.
    pub a_max: Option<u64>,
    /// Number of certified basis indices.
    pub indices: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationVerdict {
    pub name: String,
    pub certified_region: Region,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CuntzWindowReport {
    #[serde(rename = "N")]
    pub n: u64,
    pub scheme: String,
    pub relations: Vec<RelationVerdict>,
    /// Indices outside every checked range projection (infinite schemes).
    pub defect_support: Vec<usize>,
    /// Escaped indices per generator.
    pub escapes: Vec<usize>,
}

impl CuntzWindowReport {
    pub fn holds(&self) -> bool {
        self.relations.iter().all(|r| r.holds)
    }
}

fn region(w: &CuntzWindow, certified: &BTreeSet<usize>) -> Region {
    let n = w.size();
    let full_row = |a: u64| (0..n).all(|b| certified.contains(&w.index(a, b)));
    let rows = (0..n).take_while(|&a| full_row(a)).count() as u64;
    Region { a_max: rows.checked_sub(1), indices: certified.len() }
}

fn everything(w: &CuntzWindow) -> BTreeSet<usize> {
    (0..w.window.len()).collect()
}

/// Isometry, orthogonality and completeness (or domination by the identity)
/// for the first `m` generators, each on the indices where it is exact.
pub fn verify_cuntz(w: &CuntzWindow, scheme: &dyn PartitionScheme, m: usize) -> Result<CuntzWindowReport> {
    let m = match scheme.arity() {
        Arity::Finite(n) => n,
        Arity::Infinite => m,
    };
    let gens: Vec<PartialInjection> = (1..=m).map(|i| t_phi(w, scheme, i)).collect::<Result<_>>()?;
    let all = everything(w);
    let mut relations = Vec::new();

    for (k, t) in gens.iter().enumerate() {
        let live: BTreeSet<usize> = all.difference(t.escapes()).copied().collect();
        let prod = t.adjoint().compose(t);
        relations.push(RelationVerdict {
            name: format!("isometry T{0}* T{0} = id", k + 1),
            holds: prod.is_identity_on(&live),
            certified_region: region(w, &live),
        });
    }

    let mut live_pairs = all.clone();
    let mut orthogonal = true;
    for (i, ti) in gens.iter().enumerate() {
        for (j, tj) in gens.iter().enumerate() {
            if i == j {
                continue;
            }
            let prod = ti.adjoint().compose(tj);
            let live: BTreeSet<usize> = all.difference(prod.escapes()).copied().collect();
            orthogonal &= live.iter().all(|&x| prod.get(x).is_none());
            live_pairs = live_pairs.intersection(&live).copied().collect();
        }
    }
    if m > 1 {
        relations.push(RelationVerdict {
            name: "orthogonality Ti* Tj = 0".into(),
            holds: orthogonal,
            certified_region: region(w, &live_pairs),
        });
    }

    // Σ T_i T_i* as a sum of range projections: each is diagonal, they are
    // disjoint, and together they cover everything not escaping.
    let mut covered = BTreeSet::new();
    let mut edge = BTreeSet::new();
    let mut disjoint = true;
    for t in &gens {
        let proj = t.compose(&t.adjoint());
        edge.extend(proj.escapes().iter().copied());
        disjoint &= proj.pairs().all(|(x, y)| x == y);
        for x in proj.domain() {
            disjoint &= covered.insert(x);
        }
    }
    let live: BTreeSet<usize> = all.difference(&edge).copied().collect();
    let defect: BTreeSet<usize> = live.difference(&covered).copied().collect();
    let mut defect_support = Vec::new();
    match scheme.arity() {
        Arity::Finite(_) => relations.push(RelationVerdict {
            name: "completeness sum Ti Ti* = id".into(),
            holds: disjoint && defect.is_empty(),
            certified_region: region(w, &live),
        }),
        Arity::Infinite => {
            let expected: BTreeSet<usize> = live
                .iter()
                .copied()
                .filter(|&x| scheme.block(w.pair(x).0) > m)
                .collect();
            relations.push(RelationVerdict {
                name: format!("sub-identity sum_(i<={m}) Ti Ti* <= id"),
                holds: disjoint && defect == expected,
                certified_region: region(w, &live),
            });
            defect_support = defect.into_iter().collect();
        }
    }
    Ok(CuntzWindowReport {
        n: w.size(),
        scheme: scheme.name(),
        relations,
        defect_support,
        escapes: gens.iter().map(|t| t.escapes().len()).collect(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct IdealReport {
    pub checked: usize,
    /// Products whose expected factor lies outside the window.
    pub skipped: usize,
    pub failures: Vec<String>,
}

impl IdealReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// `T_φi T_{[a,b]} = T_{[φ_i⁻¹(a), b]}`, and `T_{[a,b]} T_φi` is
/// `T_{[a, φ_i(b)]}` for `b ∈ E_i`, zero otherwise.
pub fn ideal_products_check(
    w: &CuntzWindow,
    scheme: &dyn PartitionScheme,
    blocks: usize,
    samples: &[(u64, u64)],
) -> Result<IdealReport> {
    let n = w.size();
    let gens: Vec<PartialInjection> = (1..=blocks).map(|i| t_phi(w, scheme, i)).collect::<Result<_>>()?;
    let mut report = IdealReport { checked: 0, skipped: 0, failures: Vec::new() };
    for &(a, b) in samples {
        let tab = w.unit(a, b);
        for (k, t) in gens.iter().enumerate() {
            let i = k + 1;
            match scheme.phi_inv(i, a).filter(|&x| x < n) {
                Some(x) => {
                    report.checked += 1;
                    if !t.compose(&tab).agrees_with(&w.unit(x, b)) {
                        report.failures.push(format!("T{i} [{a},{b}] != [{x},{b}]"));
                    }
                }
                None => report.skipped += 1,
            }
            report.checked += 1;
            let right = tab.compose(t);
            let ok = match scheme.phi(i, b) {
                Some(y) => right.agrees_with(&w.unit(a, y)),
                None => right.is_empty(),
            };
            if !ok {
                report.failures.push(format!("[{a},{b}] T{i} is not a single unit"));
            }
        }
    }
    Ok(report)
}

pub fn sample_pairs(w: &CuntzWindow, count: usize, seed: u64) -> Vec<(u64, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = w.size();
    (0..count).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct QuotientEvidence {
    pub scheme: String,
    /// The generators satisfy the Cuntz relations on their certified regions.
    pub relations_certified: bool,
    /// Every `T_φi T_p` and `T_p T_φi` is a single represented unit or zero.
    pub ideal_closure_certified: bool,
    pub quotient_isomorphism: &'static str,
    pub report: CuntzWindowReport,
}

pub fn quotient_generator_evidence(w: &CuntzWindow, scheme: &dyn PartitionScheme, m: usize) -> Result<QuotientEvidence> {
    let report = verify_cuntz(w, scheme, m)?;
    let blocks = match scheme.arity() {
        Arity::Finite(n) => n,
        Arity::Infinite => m,
    };
    let n = w.size();
    let all: Vec<(u64, u64)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
    let ideal = ideal_products_check(w, scheme, blocks, &all)?;
    Ok(QuotientEvidence {
        scheme: scheme.name(),
        relations_certified: report.holds(),
        ideal_closure_certified: ideal.holds(),
        quotient_isomorphism: "NOT CHECKED",
        report,
    })
}

/// The basis path `[a, b]`.
pub fn unit_path(w: &CuntzWindow, a: u64, b: u64) -> Path {
    w.window.path(w.index(a, b)).clone()
}
