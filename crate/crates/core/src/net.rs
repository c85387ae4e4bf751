//! Block unitaries `U_ab` and the conjugation net `γ` over the poset.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::{random_scalar, PartialInjection, WindowMatrix};
use crate::path::{Path, Simplex1};
use crate::poset::Elem;
use crate::rep::{represent, right_translate};
use crate::window::BasisWindow;

/// `U_ab e_q = e_{q*(a,b)}` from `S^a` to `S^b`.
#[derive(Clone, Debug)]
pub struct BlockUnitary {
    pub a: Elem,
    pub b: Elem,
    pub map: PartialInjection,
}

pub fn block_unitary(w: &BasisWindow, a: Elem, b: Elem) -> Result<BlockUnitary> {
    let p = w.poset();
    if !p.le(a, b) {
        return Err(Error::NotRelated(p.name(a).into(), p.name(b).into()));
    }
    let step = Path::down(p, a, b)?;
    Ok(BlockUnitary { a, b, map: right_translate(w, &step) })
}

impl BlockUnitary {
    /// `U*U` and `UU*` are the block identities away from escapes.
    pub fn is_unitary(&self, w: &BasisWindow) -> bool {
        let m = &self.map;
        let interior = |block: &[usize], edge: &BTreeSet<usize>| -> BTreeSet<usize> {
            block.iter().copied().filter(|i| !edge.contains(i)).collect()
        };
        let src = interior(w.block_start(self.a), m.escapes());
        let dst = interior(w.block_start(self.b), m.co_escapes());
        m.adjoint().compose(m).is_identity_on(&src) && m.compose(&m.adjoint()).is_identity_on(&dst)
    }

    pub fn matrix(&self) -> WindowMatrix {
        WindowMatrix::from_injection(&self.map)
    }
}

/// Conjugation by an index bijection from the `S^source` block onto the
/// `S^target` block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetMorphism {
    pub source: Elem,
    pub target: Elem,
    pub map: PartialInjection,
}

impl NetMorphism {
    pub fn identity(w: &BasisWindow, a: Elem) -> Self {
        NetMorphism {
            source: a,
            target: a,
            map: PartialInjection::identity_on(w.len(), w.block_start(a).iter().copied()),
        }
    }

    fn relation(w: &BasisWindow, a: Elem, b: Elem) -> Result<Self> {
        let u = block_unitary(w, a, b)?;
        Ok(NetMorphism { source: a, target: b, map: u.map })
    }

    pub fn inverse(&self) -> Self {
        NetMorphism { source: self.target, target: self.source, map: self.map.adjoint() }
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &NetMorphism) -> Result<Self> {
        if first.target != self.source {
            return Err(Error::NotComposable("morphism blocks do not meet".into()));
        }
        Ok(NetMorphism { source: first.source, target: self.target, map: self.map.compose(&first.map) })
    }

    pub fn apply(&self, w: &BasisWindow, m: &WindowMatrix) -> Result<WindowMatrix> {
        let block: BTreeSet<usize> = w.block_start(self.source).iter().copied().collect();
        for (i, j, _) in m.entries() {
            if !block.contains(&i) || !block.contains(&j) {
                return Err(Error::OffBlock(i, j));
            }
        }
        let escaped: Vec<usize> = m
            .support_indices()
            .into_iter()
            .filter(|&i| self.map.get(i).is_none())
            .collect();
        if !escaped.is_empty() {
            return Err(Error::WindowEscape(escaped));
        }
        Ok(m.relabel(&self.map))
    }

    /// Extensional equality on the matrix units of the source block, over
    /// indices neither side marks as escaping.
    pub fn agrees_on_units(&self, w: &BasisWindow, other: &NetMorphism) -> bool {
        if self.source != other.source || self.target != other.target {
            return false;
        }
        let live: Vec<usize> = w
            .block_start(self.source)
            .iter()
            .copied()
            .filter(|i| !self.map.escapes().contains(i) && !other.map.escapes().contains(i))
            .collect();
        live.iter().all(|&i| {
            live.iter().all(|&j| {
                let unit = WindowMatrix::unit(w.len(), i, j);
                match (self.apply(w, &unit), other.apply(w, &unit)) {
                    (Ok(x), Ok(y)) => x == y,
                    _ => false,
                }
            })
        })
    }
}

/// `γ_ba(M) = U_ab M U_ab*`, computed as a relabelling.
pub fn gamma(w: &BasisWindow, a: Elem, b: Elem, m: &WindowMatrix) -> Result<WindowMatrix> {
    NetMorphism::relation(w, a, b)?.apply(w, m)
}

/// The same conjugation as an explicit matrix product.
pub fn gamma_by_product(w: &BasisWindow, a: Elem, b: Elem, m: &WindowMatrix) -> Result<WindowMatrix> {
    let u = block_unitary(w, a, b)?.matrix();
    Ok(&(&u * m) * &u.adjoint())
}

pub fn gamma_simplex(w: &BasisWindow, s: &Simplex1) -> Result<NetMorphism> {
    let p = w.poset();
    if !s.is_valid(p) {
        return Err(Error::InvalidSimplex(s.render(p)));
    }
    let up = NetMorphism::relation(w, s.b, s.x)?;
    let down = NetMorphism::relation(w, s.a, s.x)?.inverse();
    down.after(&up)
}

/// Composite of the simplex morphisms along `to_simplices(p)`, rightmost
/// first.
pub fn gamma_path(w: &BasisWindow, p: &Path) -> Result<NetMorphism> {
    let poset = w.poset();
    let word = p.to_simplices(poset)?;
    let start = p.start().ok_or(Error::ZeroPath)?;
    let mut acc = NetMorphism::identity(w, start);
    for s in word.iter().rev() {
        acc = gamma_simplex(w, s)?.after(&acc)?;
    }
    Ok(acc)
}

/// `γ_p` read directly as right translation by `p⁻¹`.
pub fn gamma_by_translation(w: &BasisWindow, p: &Path) -> Result<NetMorphism> {
    let (end, start) = p.endpoints().ok_or(Error::ZeroPath)?;
    Ok(NetMorphism { source: start, target: end, map: right_translate(w, &p.inverse()) })
}

/// `T_p` cut down to the `S^a` block, dropping indices in `avoid`.
pub fn block_sample(w: &BasisWindow, p: &Path, a: Elem, avoid: &BTreeSet<usize>) -> WindowMatrix {
    let t = represent(w, p);
    let mut m = WindowMatrix::zero(w.len());
    for &i in w.block_start(a) {
        if let Some(j) = t.get(i) {
            if !avoid.contains(&i) && !avoid.contains(&j) {
                m.set(j, i, num::One::one());
            }
        }
    }
    m
}

#[derive(Clone, Debug, Serialize)]
pub struct CocycleReport {
    pub units_agree: bool,
    pub samples: usize,
    pub failures: Vec<usize>,
}

impl CocycleReport {
    pub fn holds(&self) -> bool {
        self.units_agree && self.failures.is_empty()
    }
}

pub fn cocycle_check(w: &BasisWindow, a: Elem, b: Elem, c: Elem, samples: &[WindowMatrix]) -> Result<CocycleReport> {
    let p = w.poset();
    if !(p.le(a, b) && p.le(b, c)) {
        return Err(Error::NotAChain(p.name(a).into(), p.name(b).into(), p.name(c).into()));
    }
    let ba = NetMorphism::relation(w, a, b)?;
    let cb = NetMorphism::relation(w, b, c)?;
    let ca = NetMorphism::relation(w, a, c)?;
    let units_agree = cb.after(&ba)?.agrees_on_units(w, &ca);
    let mut failures = Vec::new();
    for (k, m) in samples.iter().enumerate() {
        let two = ba.apply(w, m).and_then(|x| cb.apply(w, &x));
        let one = ca.apply(w, m);
        match (two, one) {
            (Ok(x), Ok(y)) if x == y => {}
            _ => failures.push(k),
        }
    }
    Ok(CocycleReport { units_agree, samples: samples.len(), failures })
}

#[derive(Clone, Debug, Serialize)]
pub struct NetReport {
    pub chains_checked: usize,
    pub samples_per_chain: usize,
    pub failures: Vec<String>,
}

fn edge_indices(maps: &[&PartialInjection]) -> BTreeSet<usize> {
    maps.iter().flat_map(|m| m.escapes().iter().chain(m.co_escapes()).copied()).collect()
}

/// Unitarity, *-morphism laws and the cocycle identity over every chain
/// `a <= b <= c`, with sampled block matrices.
pub fn net_verify(w: &BasisWindow, samples_per_chain: usize, seed: u64) -> Result<NetReport> {
    let p = w.poset();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut chains = 0;
    let elems: Vec<Elem> = p.elements().collect();
    for &a in &elems {
        for &b in elems.iter().filter(|&&b| p.le(a, b)) {
            let u = block_unitary(w, a, b)?;
            if !u.is_unitary(w) {
                failures.push(format!("U({},{}) is not unitary", p.name(a), p.name(b)));
            }
            for &c in elems.iter().filter(|&&c| p.le(b, c)) {
                chains += 1;
                let ub = block_unitary(w, b, c)?;
                let uc = block_unitary(w, a, c)?;
                let avoid = edge_indices(&[&u.map, &ub.map, &uc.map]);
                let samples = sample_block(w, a, &avoid, samples_per_chain, &mut rng);
                let r = cocycle_check(w, a, b, c, &samples)?;
                if !r.holds() {
                    failures.push(format!("cocycle fails on {} <= {} <= {}", p.name(a), p.name(b), p.name(c)));
                }
                for pair in samples.windows(2) {
                    let (m, n) = (&pair[0], &pair[1]);
                    let lhs = gamma(w, a, b, &(m * n));
                    let rhs = gamma(w, a, b, m).and_then(|x| gamma(w, a, b, n).map(|y| &x * &y));
                    let star = gamma(w, a, b, &m.adjoint()).and_then(|x| gamma(w, a, b, m).map(|y| x == y.adjoint()));
                    let dual = gamma_by_product(w, a, b, m).and_then(|x| gamma(w, a, b, m).map(|y| x == y));
                    let product = matches!((lhs, rhs), (Ok(x), Ok(y)) if x == y);
                    if !product || star.ok() != Some(true) || dual.ok() != Some(true) {
                        failures.push(format!("*-morphism law fails for {} <= {}", p.name(a), p.name(b)));
                    }
                }
            }
        }
    }
    Ok(NetReport { chains_checked: chains, samples_per_chain, failures })
}

/// Block identity, represented paths cut to the block, and random
/// combinations of both.
pub fn sample_block(
    w: &BasisWindow,
    a: Elem,
    avoid: &BTreeSet<usize>,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<WindowMatrix> {
    let interior: Vec<usize> = w.block_start(a).iter().copied().filter(|i| !avoid.contains(i)).collect();
    let mut out = vec![WindowMatrix::identity_on(w.len(), interior.iter().copied())];
    let mut paths: Vec<&Path> = w.basis().iter().collect();
    paths.shuffle(rng);
    for q in paths {
        if out.len() >= count {
            break;
        }
        let m = block_sample(w, q, a, avoid);
        if !m.is_zero() {
            out.push(m);
        }
    }
    while out.len() < count && out.len() > 1 {
        let i = rng.gen_range(0..out.len());
        let j = rng.gen_range(0..out.len());
        let m = &out[i].scale(&random_scalar(rng)) + &out[j].scale(&random_scalar(rng));
        out.push(m);
    }
    out.truncate(count.max(1));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::Poset;
    use crate::window::{build_window, WindowParams};

    fn chain() -> BasisWindow {
        build_window(&Poset::chain(3), WindowParams::Directed).unwrap()
    }

    #[test]
    fn chain_unitaries() {
        let w = chain();
        let u = block_unitary(&w, Elem(0), Elem(1)).unwrap();
        for x in 0..3 {
            assert_eq!(u.map.get(w.pair_index(Elem(x), Elem(0))), Some(w.pair_index(Elem(x), Elem(1))));
        }
        assert!(u.is_unitary(&w));
        let id = block_unitary(&w, Elem(1), Elem(1)).unwrap();
        assert!(id.map.is_identity_on(&w.block_start(Elem(1)).iter().copied().collect()));
        let d = build_window(&Poset::diamond(), WindowParams::Directed).unwrap();
        assert!(matches!(block_unitary(&d, Elem(0), Elem(1)), Err(Error::NotRelated(_, _))));
    }

    #[test]
    fn gamma_moves_represented_operators() {
        let w = chain();
        let p = w.poset();
        let none = BTreeSet::new();
        let t12 = Path::down(p, Elem(1), Elem(2)).unwrap();
        let m0 = block_sample(&w, &t12, Elem(0), &none);
        let m1 = block_sample(&w, &t12, Elem(1), &none);
        assert_eq!(gamma(&w, Elem(0), Elem(1), &m0).unwrap(), m1);
        assert_eq!(gamma_by_product(&w, Elem(0), Elem(1), &m0).unwrap(), m1);
        let id0 = WindowMatrix::identity_on(w.len(), w.block_start(Elem(0)).iter().copied());
        let id1 = WindowMatrix::identity_on(w.len(), w.block_start(Elem(1)).iter().copied());
        assert_eq!(gamma(&w, Elem(0), Elem(1), &id0).unwrap(), id1);
        assert!(gamma(&w, Elem(0), Elem(1), &WindowMatrix::zero(w.len())).unwrap().is_zero());
        assert!(matches!(gamma(&w, Elem(0), Elem(1), &m1), Err(Error::OffBlock(_, _))));
    }

    #[test]
    fn cocycle_and_simplices() {
        let w = chain();
        let p = w.poset();
        let r = cocycle_check(&w, Elem(0), Elem(1), Elem(2), &[]).unwrap();
        assert!(r.holds());
        assert!(cocycle_check(&w, Elem(1), Elem(1), Elem(1), &[]).unwrap().holds());
        assert!(matches!(cocycle_check(&w, Elem(2), Elem(1), Elem(0), &[]), Err(Error::NotAChain(..))));

        let s = Simplex1 { a: Elem(0), x: Elem(2), b: Elem(1) };
        let g = gamma_simplex(&w, &s).unwrap();
        let manual = NetMorphism::relation(&w, Elem(0), Elem(2))
            .unwrap()
            .inverse()
            .after(&NetMorphism::relation(&w, Elem(1), Elem(2)).unwrap())
            .unwrap();
        assert!(g.agrees_on_units(&w, &manual));
        let unit = Simplex1 { a: Elem(1), x: Elem(1), b: Elem(1) };
        assert!(gamma_simplex(&w, &unit).unwrap().agrees_on_units(&w, &NetMorphism::identity(&w, Elem(1))));
        // supports 1 and 2 are comparable, so the morphisms coincide
        let other = gamma_simplex(&w, &Simplex1 { a: Elem(0), x: Elem(1), b: Elem(1) }).unwrap();
        assert!(g.agrees_on_units(&w, &other));
        let path = s.to_path(p);
        assert!(gamma_path(&w, &path).unwrap().agrees_on_units(&w, &gamma_by_translation(&w, &path).unwrap()));
    }

    #[test]
    fn diamond_simplex_round_trip() {
        let d = Poset::diamond();
        let w = build_window(&d, WindowParams::Directed).unwrap();
        let (a, b, c) = (d.elem("a").unwrap(), d.elem("b").unwrap(), d.elem("c").unwrap());
        let there = gamma_simplex(&w, &Simplex1 { a: b, x: c, b: a }).unwrap();
        assert_eq!((there.source, there.target), (a, b));
        let back = gamma_simplex(&w, &Simplex1 { a, x: c, b }).unwrap();
        assert!(back.after(&there).unwrap().agrees_on_units(&w, &NetMorphism::identity(&w, a)));
        let report = net_verify(&w, 4, 1).unwrap();
        assert!(report.failures.is_empty(), "{:?}", report.failures);
    }

    #[test]
    fn circle_winding_morphism_is_nontrivial() {
        let c = Poset::circle();
        let w = build_window(&c, WindowParams::Reduced { max_len: 10, depth: 2 }).unwrap();
        let e = |n: &str| c.elem(n).unwrap();
        let g = Path::from_simplices(
            &c,
            &[Simplex1 { a: e("a1"), x: e("b1"), b: e("a2") }, Simplex1 { a: e("a2"), x: e("b2"), b: e("a1") }],
        )
        .unwrap();
        let gg = gamma_path(&w, &g).unwrap();
        assert!(gg.agrees_on_units(&w, &gamma_by_translation(&w, &g).unwrap()));
        assert!(!gg.agrees_on_units(&w, &NetMorphism::identity(&w, e("a1"))));
        let back = gamma_path(&w, &g.compose(&c, &g.inverse())).unwrap();
        assert!(back.agrees_on_units(&w, &NetMorphism::identity(&w, e("a1"))));
        let report = net_verify(&w, 3, 2).unwrap();
        assert!(report.failures.is_empty(), "{:?}", report.failures);
    }
}
