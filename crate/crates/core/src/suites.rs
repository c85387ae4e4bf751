//! Named verification suites, selectable at runtime.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cuntz::{
    dyadic_infinite_scheme, ideal_products_check, quotient_generator_evidence, residue_scheme, sample_pairs,
    verify_cuntz, CuntzWindow, PartitionScheme,
};
use crate::enumerate::paths_up_to;
use crate::error::{Error, Result};
use crate::laws::{axiom_laws, directed_collapse, inverse_semigroup_laws, property_laws, LawReport};
use crate::net::{gamma_by_translation, gamma_path, net_verify};
use crate::operator::{random_scalar, WindowMatrix};
use crate::path::Path;
use crate::poset::Poset;
use crate::rep::{block_decomposition_check, projector_check, represent, restriction_rank, unitary_on_block_check};
use crate::window::{build_window, BasisWindow, WindowParams, DEFAULT_DEPTH};

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub depth: usize,
    /// Reduced-length bound for windows over non-directed posets.
    pub max_len: usize,
    /// Simplex count for enumerated paths.
    pub simplices: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { depth: DEFAULT_DEPTH, max_len: 6, simplices: 3, samples: 100, seed: 0 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub laws: Vec<LawReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.laws.iter().all(LawReport::passed)
    }
}

pub trait Suite: Send + Sync {
    fn name(&self) -> &'static str;
    fn needs_poset(&self) -> bool {
        true
    }
    fn run(&self, poset: Option<&Poset>, cfg: &SuiteConfig) -> Result<SuiteReport>;
}

fn require(poset: Option<&Poset>) -> Result<&Poset> {
    poset.ok_or_else(|| Error::Format("this suite needs --poset".into()))
}

pub struct AxiomSuite;
pub struct RepresentationSuite;
pub struct NetSuite;
pub struct CuntzSuite;

impl Suite for AxiomSuite {
    fn name(&self) -> &'static str {
        "axioms"
    }

    fn run(&self, poset: Option<&Poset>, cfg: &SuiteConfig) -> Result<SuiteReport> {
        let p = require(poset)?;
        let paths = paths_up_to(p, cfg.simplices);
        let mut laws = vec![axiom_laws(p)];
        laws.extend(property_laws(p, &paths, cfg.depth));
        laws.extend(inverse_semigroup_laws(p, &paths, cfg.depth));
        if p.is_upward_directed() {
            laws.push(directed_collapse(p, &paths)?);
        }
        Ok(SuiteReport { suite: self.name().into(), laws })
    }
}

impl Suite for RepresentationSuite {
    fn name(&self) -> &'static str {
        "rep"
    }

    fn run(&self, poset: Option<&Poset>, cfg: &SuiteConfig) -> Result<SuiteReport> {
        let p = require(poset)?;
        let w = build_window(p, WindowParams::Reduced { max_len: cfg.max_len, depth: cfg.depth }.directed_if(p))?;
        Ok(SuiteReport { suite: self.name().into(), laws: representation_laws(&w, cfg) })
    }
}

impl Suite for NetSuite {
    fn name(&self) -> &'static str {
        "net"
    }

    fn run(&self, poset: Option<&Poset>, cfg: &SuiteConfig) -> Result<SuiteReport> {
        let p = require(poset)?;
        let w = build_window(p, WindowParams::Reduced { max_len: cfg.max_len, depth: cfg.depth }.directed_if(p))?;
        Ok(SuiteReport { suite: self.name().into(), laws: net_laws(&w, cfg)? })
    }
}

impl Suite for CuntzSuite {
    fn name(&self) -> &'static str {
        "cuntz"
    }

    fn needs_poset(&self) -> bool {
        false
    }

    fn run(&self, _poset: Option<&Poset>, cfg: &SuiteConfig) -> Result<SuiteReport> {
        Ok(SuiteReport { suite: self.name().into(), laws: cuntz_laws(cfg)? })
    }
}

impl WindowParams {
    /// Replaces `self` by `Directed` on upward-directed posets.
    pub fn directed_if(self, p: &Poset) -> Self {
        if p.is_upward_directed() {
            WindowParams::Directed
        } else {
            self
        }
    }
}

pub struct SuiteRegistry {
    suites: BTreeMap<&'static str, Box<dyn Suite>>,
}

impl Default for SuiteRegistry {
    fn default() -> Self {
        let mut r = SuiteRegistry { suites: BTreeMap::new() };
        r.register(Box::new(AxiomSuite));
        r.register(Box::new(RepresentationSuite));
        r.register(Box::new(NetSuite));
        r.register(Box::new(CuntzSuite));
        r
    }
}

impl SuiteRegistry {
    pub fn register(&mut self, suite: Box<dyn Suite>) {
        self.suites.insert(suite.name(), suite);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.suites.keys().copied().collect()
    }

    pub fn get(&self, name: &str) -> Result<&dyn Suite> {
        self.suites
            .get(name)
            .map(Box::as_ref)
            .ok_or_else(|| Error::Format(format!("unknown suite {name:?}; known: {}", self.names().join(", "))))
    }
}

fn sample_pairs_of<'a, F>(items: &'a [Path], limit: usize, rng: &mut ChaCha8Rng, keep: F) -> Vec<(&'a Path, &'a Path)>
where
    F: Fn(&Path, &Path) -> bool,
{
    let mut pairs: Vec<(&Path, &Path)> =
        items.iter().flat_map(|x| items.iter().map(move |y| (x, y))).filter(|(x, y)| keep(x, y)).collect();
    if pairs.len() > limit {
        pairs.shuffle(rng);
        pairs.truncate(limit);
    }
    pairs
}

/// Partial-isometry, projector, homomorphism, adjoint and block laws of the
/// represented basis.
pub fn representation_laws(w: &BasisWindow, cfg: &SuiteConfig) -> Vec<LawReport> {
    let poset = w.poset();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut iso = LawReport::new("partial isometry T T* T = T");
    let mut proj = LawReport::new("range and source projectors");
    let mut adj = LawReport::new("adjoint is an involution and equals T_(p⁻¹)");
    let mut inv = LawReport::new("S^a blocks are invariant");
    let mut hom = LawReport::new("T_p T_q = T_(p*q)");
    let reps: Vec<_> = w.basis().iter().map(|q| represent(w, q)).collect();
    for (q, t) in w.basis().iter().zip(&reps) {
        let name = || q.render(poset);
        iso.check(t.compose(&t.adjoint()).compose(t).agrees_with(t), name);
        if t.is_escape_free() {
            proj.check(projector_check(w, q).map(|r| r.holds()).unwrap_or(false), name);
        }
        adj.check(t.adjoint().adjoint() == *t && t.adjoint().agrees_with(&represent(w, &q.inverse())), name);
        inv.check(t.pairs().all(|(i, j)| w.path(i).start() == w.path(j).start()), name);
    }
    let limit = cfg.samples.max(1) * 40;
    for (x, y) in sample_pairs_of(w.basis(), limit, &mut rng, |_, _| true) {
        let lhs = represent(w, x).compose(&represent(w, y));
        hom.check(lhs.agrees_with(&represent(w, &x.compose(poset, y))), || {
            format!("{} ; {}", x.render(poset), y.render(poset))
        });
    }
    let mut laws = vec![iso, proj, adj, inv, hom];
    if w.is_directed() {
        let mut rank = LawReport::new("restriction to each S^a has rank one");
        for q in w.basis() {
            for a in poset.elements() {
                rank.check(restriction_rank(w, q, a).ok() == Some(1), || {
                    format!("{} on S^{}", q.render(poset), poset.name(a))
                });
            }
        }
        laws.push(rank);
    } else {
        let mut unitary = LawReport::new("loops act unitarily on their block");
        for q in w.basis().iter().filter(|q| q.is_loop()) {
            unitary.check(unitary_on_block_check(w, q).map(|r| r.holds).unwrap_or(false), || q.render(poset));
        }
        laws.push(unitary);
    }
    let mut blocks = LawReport::new("combinations are block diagonal over S^a");
    for _ in 0..cfg.samples {
        let m = random_combination(w, &mut rng);
        blocks.check(block_decomposition_check(w, &m).is_ok(), || "random combination".into());
    }
    laws.push(blocks);
    laws
}

/// `Σ α_i T_{p_i}` over one to four random basis paths.
pub fn random_combination(w: &BasisWindow, rng: &mut ChaCha8Rng) -> WindowMatrix {
    let terms = rng.gen_range(1..=4);
    (0..terms).fold(WindowMatrix::zero(w.len()), |acc, _| {
        let q = w.basis().choose(rng).expect("nonempty window");
        &acc + &WindowMatrix::from_injection(&represent(w, q)).scale(&random_scalar(rng))
    })
}

/// Unitarity, cocycle and *-morphism laws, plus functoriality of `γ` on
/// sampled composable pairs.
pub fn net_laws(w: &BasisWindow, cfg: &SuiteConfig) -> Result<Vec<LawReport>> {
    let poset = w.poset();
    let report = net_verify(w, 4, cfg.seed)?;
    let mut net = LawReport::new("net: unitarity, cocycle, *-morphism");
    net.checked = report.chains_checked;
    net.failures = report.failures;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    let mut functor = LawReport::new("γ_(p*q) = γ_p ∘ γ_q");
    let mut translation = LawReport::new("γ_p is right translation by p⁻¹");
    let pairs = sample_pairs_of(w.basis(), 50, &mut rng, |x, y| x.start() == y.end());
    for (x, y) in pairs {
        let both = gamma_path(w, &x.compose(poset, y))?;
        let split = gamma_path(w, x)?.after(&gamma_path(w, y)?)?;
        functor.check(both.agrees_on_units(w, &split), || format!("{} ; {}", x.render(poset), y.render(poset)));
    }
    for q in w.basis().iter().take(cfg.samples) {
        translation.check(gamma_path(w, q)?.agrees_on_units(w, &gamma_by_translation(w, q)?), || q.render(poset));
    }
    Ok(vec![net, functor, translation])
}

fn cuntz_relations(name: &str, w: &CuntzWindow, scheme: &dyn PartitionScheme, m: usize) -> Result<LawReport> {
    let report = verify_cuntz(w, scheme, m)?;
    let mut law = LawReport::new(name);
    for r in &report.relations {
        law.check(r.holds, || format!("{} on {:?}", r.name, r.certified_region));
    }
    Ok(law)
}

/// Residue-2 relations at `N = 16`, the dyadic prefix `m = 3` at `N = 32`,
/// ideal products, partition totality and bijection laws.
pub fn cuntz_laws(cfg: &SuiteConfig) -> Result<Vec<LawReport>> {
    let residue = residue_scheme(2)?;
    let dyadic = dyadic_infinite_scheme();
    let w16 = CuntzWindow::nat(16)?;
    let w32 = CuntzWindow::nat(32)?;
    let mut laws = vec![
        cuntz_relations("residue(2) relations, N = 16", &w16, &residue, 2)?,
        cuntz_relations("dyadic prefix m = 3, N = 32", &w32, &dyadic, 3)?,
    ];
    let ideal = ideal_products_check(&w16, &residue, 2, &sample_pairs(&w16, cfg.samples, cfg.seed))?;
    let mut law = LawReport::new("ideal products are single units");
    law.checked = ideal.checked;
    law.failures = ideal.failures;
    laws.push(law);

    let ev = quotient_generator_evidence(&w16, &residue, 2)?;
    let mut law = LawReport::new("quotient generator evidence");
    law.check(ev.relations_certified && ev.ideal_closure_certified, || "evidence incomplete".into());
    laws.push(law);

    let mut total = LawReport::new("partitions are total, phi bijective");
    let schemes: [&dyn PartitionScheme; 3] = [&residue, &residue_scheme(3)?, &dyadic];
    for s in schemes {
        for x in 0..10_000u64 {
            let i = s.block(x);
            let claims = (1..=i + 1).filter(|&j| s.phi(j, x).is_some()).count();
            let back = s.phi(i, x).and_then(|k| s.phi_inv(i, k));
            total.check(claims == 1 && back == Some(x), || format!("{} at {x}", s.name()));
            let k = x;
            let y = s.phi_inv(i, k);
            total.check(y.and_then(|y| s.phi(i, y)) == Some(k), || format!("{} inverse at {k}", s.name()));
        }
    }
    laws.push(total);
    Ok(laws)
}
