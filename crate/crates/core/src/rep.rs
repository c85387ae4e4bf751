//! The left regular representation `T_p e_q = e_{p*q}` on a window.

use std::collections::{BTreeMap, BTreeSet};

use num::{BigRational, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::homology::h1_data;
use crate::operator::{abs_sq, PartialInjection, Scalar, WindowMatrix};
use crate::path::Path;
use crate::poset::Elem;
use crate::window::{BasisWindow, Locate};

/// `T_p` as a partial injection of window indices.
pub fn represent(w: &BasisWindow, p: &Path) -> PartialInjection {
    let mut t = PartialInjection::empty(w.len());
    let Some((end, start)) = p.endpoints() else {
        return t;
    };
    let poset = w.poset();
    for &q in w.block_end(start) {
        match w.locate(&p.compose(poset, w.path(q))) {
            Locate::Index(i) => t.insert(q, i),
            Locate::Escaped | Locate::Unresolved => t.flag_escape(q),
            Locate::Zero => unreachable!("endpoints meet"),
        }
    }
    let image = t.range();
    for &r in w.block_end(end) {
        if !image.contains(&r) {
            t.flag_co_escape(r);
        }
    }
    t
}

pub fn adjoint(t: &PartialInjection) -> PartialInjection {
    t.adjoint()
}

/// Right translation `e_q ↦ e_{q*p}` for `q` starting at the end of `p`.
pub fn right_translate(w: &BasisWindow, p: &Path) -> PartialInjection {
    let mut t = PartialInjection::empty(w.len());
    let Some((end, start)) = p.endpoints() else {
        return t;
    };
    let poset = w.poset();
    for &q in w.block_start(end) {
        match w.locate(&w.path(q).compose(poset, p)) {
            Locate::Index(i) => t.insert(q, i),
            Locate::Escaped | Locate::Unresolved => t.flag_escape(q),
            Locate::Zero => unreachable!("endpoints meet"),
        }
    }
    let image = t.range();
    for &r in w.block_start(start) {
        if !image.contains(&r) {
            t.flag_co_escape(r);
        }
    }
    t
}

/// Linear combination `Σ α_i T_{p_i}` as a matrix.
pub fn combination(w: &BasisWindow, terms: &[(Scalar, Path)]) -> WindowMatrix {
    terms.iter().fold(WindowMatrix::zero(w.len()), |acc, (alpha, p)| {
        &acc + &WindowMatrix::from_injection(&represent(w, p)).scale(alpha)
    })
}

fn block_set(indices: &[usize]) -> BTreeSet<usize> {
    indices.iter().copied().collect()
}

fn escape_error(t: &PartialInjection) -> Error {
    Error::WindowEscape(t.escapes().union(t.co_escapes()).copied().collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectorReport {
    /// `T T* T = T`.
    pub partial_isometry: bool,
    /// `T T*` is the identity of the `S_{∂₀p}` block and zero elsewhere.
    pub range_projector: bool,
    /// `T* T` is the identity of the `S_{∂₁p}` block and zero elsewhere.
    pub source_projector: bool,
    /// `T*` agrees with `T_{p⁻¹}`.
    pub adjoint_is_inverse: bool,
}

impl ProjectorReport {
    pub fn holds(&self) -> bool {
        self.partial_isometry && self.range_projector && self.source_projector && self.adjoint_is_inverse
    }
}

pub fn projector_check(w: &BasisWindow, p: &Path) -> Result<ProjectorReport> {
    let (end, start) = p.endpoints().ok_or(Error::ZeroPath)?;
    let t = represent(w, p);
    if !t.is_escape_free() {
        return Err(escape_error(&t));
    }
    let ts = t.adjoint();
    let range = t.compose(&ts);
    let source = ts.compose(&t);
    Ok(ProjectorReport {
        partial_isometry: t.compose(&source) == t,
        range_projector: range.is_identity_on(&block_set(w.block_end(end))),
        source_projector: source.is_identity_on(&block_set(w.block_end(start))),
        adjoint_is_inverse: ts == represent(w, &p.inverse()),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct UnitaryReport {
    /// Block indices away from the window edge.
    pub interior: Vec<usize>,
    pub escaped: Vec<usize>,
    pub holds: bool,
}

/// `T_g` on the `S_a` block, `g` a loop at `a`.
pub fn unitary_on_block_check(w: &BasisWindow, g: &Path) -> Result<UnitaryReport> {
    let poset = w.poset();
    if !g.is_loop() {
        return Err(Error::NotALoop(g.render(poset)));
    }
    let a = g.start().expect("loop");
    let t = represent(w, g);
    let block = block_set(w.block_end(a));
    let edge: BTreeSet<usize> = t.escapes().union(t.co_escapes()).copied().collect();
    let interior: BTreeSet<usize> = block.difference(&edge).copied().collect();
    if interior.is_empty() && !block.is_empty() {
        return Err(escape_error(&t));
    }
    let ts = t.adjoint();
    let fixes = |m: &PartialInjection| interior.iter().all(|&i| m.get(i) == Some(i));
    let holds = t.domain().is_subset(&block) && t.range().is_subset(&block)
        && fixes(&ts.compose(&t))
        && fixes(&t.compose(&ts));
    Ok(UnitaryReport {
        interior: interior.into_iter().collect(),
        escaped: edge.into_iter().collect(),
        holds,
    })
}

/// Rank of `T_p` restricted to the `S^a` block.
pub fn restriction_rank(w: &BasisWindow, p: &Path, a: Elem) -> Result<usize> {
    if !w.is_directed() {
        return Err(Error::NotDirected);
    }
    let t = represent(w, p);
    Ok(w.block_start(a).iter().filter(|&&i| t.get(i).is_some()).count())
}

/// Fails on the first entry coupling two different `S^a` blocks.
pub fn block_decomposition_check(w: &BasisWindow, m: &WindowMatrix) -> Result<()> {
    for (i, j, _) in m.entries() {
        if w.path(i).start() != w.path(j).start() {
            return Err(Error::CouplingFound(i, j));
        }
    }
    Ok(())
}

/// The path `p2 * p1⁻¹` carrying `e_{p1}` to `e_{p2}`.
pub fn irreducibility_witness(w: &BasisWindow, a: Elem, p1: &Path, p2: &Path) -> Result<Path> {
    let poset = w.poset();
    for q in [p1, p2] {
        if q.start() != Some(a) {
            return Err(Error::EndpointMismatch(format!("{} does not start at {}", q.render(poset), poset.name(a))));
        }
    }
    let (i1, i2) = (w.index_of(p1)?, w.index_of(p2)?);
    let p = p2.compose(poset, &p1.inverse());
    let t = represent(w, &p);
    if t.get(i1) != Some(i2) {
        return Err(Error::WindowEscape(vec![i1]));
    }
    Ok(p)
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitReport {
    /// Window index of `p * g^n` for `n = 1..=N`.
    pub indices: Vec<usize>,
    pub pairwise_orthogonal: bool,
    /// `‖A x_n‖²` as exact rationals.
    pub squared_norms: Vec<String>,
    /// `Σ |α_i|²`.
    pub expected: String,
    pub constant: bool,
    /// False when `A = 0`, where the argument has nothing to say.
    pub nonzero: bool,
}

impl OrbitReport {
    pub fn holds(&self) -> bool {
        self.pairwise_orthogonal && self.constant && self.squared_norms.iter().all(|s| *s == self.expected)
    }
}

/// Tracks `‖A e_{p*gⁿ}‖²` for `A = Σ α_i T_{q_i}` along a non-trivial loop.
pub fn noncompactness_orbit_check(
    w: &BasisWindow,
    terms: &[(Scalar, Path)],
    p: &Path,
    g: &Path,
    count: usize,
) -> Result<OrbitReport> {
    let poset = w.poset();
    if !g.is_loop() || g.end() != p.start() {
        return Err(Error::NotComposable(format!("{} is not a loop at the start of {}", g.render(poset), p.render(poset))));
    }
    let trivial = match h1_data(poset) {
        Ok(h) => h.h1_class(poset, g)?.iter().all(Zero::is_zero),
        Err(_) => true,
    };
    if trivial || w.is_directed() {
        return Err(Error::TrivialLoop);
    }
    let maps: Vec<(Scalar, PartialInjection)> = terms.iter().map(|(a, q)| (a.clone(), represent(w, q))).collect();
    let mut indices = Vec::new();
    let mut norms = Vec::new();
    let mut gn = Path::identity(g.start().expect("loop"));
    for _ in 0..count {
        gn = gn.compose(poset, g);
        let x = w.index_of(&p.compose(poset, &gn)).map_err(|_| Error::WindowEscape(vec![]))?;
        let mut image: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (alpha, t) in &maps {
            if t.escapes().contains(&x) {
                return Err(Error::WindowEscape(vec![x]));
            }
            if let Some(y) = t.get(x) {
                *image.entry(y).or_insert_with(Scalar::zero) += alpha;
            }
        }
        let norm = image.values().map(abs_sq).fold(BigRational::zero(), |s, v| s + v);
        indices.push(x);
        norms.push(norm);
    }
    let expected = terms.iter().map(|(a, _)| abs_sq(a)).fold(BigRational::zero(), |s, v| s + v);
    let distinct: BTreeSet<usize> = indices.iter().copied().collect();
    Ok(OrbitReport {
        pairwise_orthogonal: distinct.len() == indices.len(),
        constant: norms.windows(2).all(|v| v[0] == v[1]),
        nonzero: !expected.is_zero(),
        squared_norms: norms.iter().map(ToString::to_string).collect(),
        expected: expected.to_string(),
        indices,
    })
}
