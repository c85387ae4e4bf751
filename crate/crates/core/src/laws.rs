//! Exhaustive checks of the semigroup laws over enumerated paths.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::Result;
use crate::path::Path;
use crate::poset::{Elem, Poset};
use crate::word::{loop_group, replay, Classifier, Engine, Verdict};

#[derive(Clone, Debug, Default, Serialize)]
pub struct LawReport {
    pub name: String,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl LawReport {
    pub fn new(name: &str) -> Self {
        LawReport { name: name.into(), ..Default::default() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.failures.len() < 20 {
            self.failures.push(what());
        }
    }
}

/// Semantic equality through class ids; `None` is the zero path.
pub struct ClassOracle<'a> {
    poset: &'a Poset,
    classifier: Classifier,
    cache: HashMap<Path, Option<usize>>,
    pub unresolved: usize,
}

impl<'a> ClassOracle<'a> {
    pub fn new(poset: &'a Poset, depth: usize) -> Self {
        ClassOracle { poset, classifier: Classifier::new(poset, depth), cache: HashMap::new(), unresolved: 0 }
    }

    /// Class id, or `None` when the word problem stays undecided.
    pub fn id(&mut self, path: &Path) -> Option<Option<usize>> {
        if let Some(&c) = self.cache.get(path) {
            return Some(c);
        }
        match self.classifier.classify(self.poset, path) {
            Ok(c) => {
                self.cache.insert(path.clone(), c);
                Some(c)
            }
            Err(_) => {
                self.unresolved += 1;
                None
            }
        }
    }

    pub fn same(&mut self, a: &Path, b: &Path) -> bool {
        a == b || matches!((self.id(a), self.id(b)), (Some(x), Some(y)) if x == y)
    }
}

/// The defining relations of elementary paths, for every chain `a <= b <= c`.
pub fn axiom_laws(p: &Poset) -> LawReport {
    let mut r = LawReport::new("elementary relations");
    let d = |x: Elem, y: Elem| Path::down(p, x, y).expect("ordered");
    let u = |x: Elem, y: Elem| Path::up(p, x, y).expect("ordered");
    let i = Path::identity;
    for a in p.elements() {
        for b in p.elements().filter(|&b| p.le(a, b)) {
            for c in p.elements().filter(|&c| p.le(b, c)) {
                let (na, nb, nc) = (p.name(a), p.name(b), p.name(c));
                let cases = [
                    ("down merge", d(a, b).compose(p, &d(b, c)), d(a, c)),
                    ("up merge", u(c, b).compose(p, &u(b, a)), u(c, a)),
                    ("cancel up-down", u(b, a).compose(p, &d(a, b)), i(b)),
                    ("cancel down-up", d(a, b).compose(p, &u(b, a)), i(a)),
                    ("unit after down", d(a, b).compose(p, &i(b)), d(a, b)),
                    ("unit before down", i(a).compose(p, &d(a, b)), d(a, b)),
                    ("unit after up", u(b, a).compose(p, &i(a)), u(b, a)),
                    ("unit before up", i(b).compose(p, &u(b, a)), u(b, a)),
                    ("unit idempotent", i(a).compose(p, &i(a)), i(a)),
                ];
                for (k, lhs, rhs) in cases {
                    r.check(lhs == rhs, || format!("{k} fails on {na} <= {nb} <= {nc}"));
                }
            }
        }
    }
    r
}

/// Inverses, units, anti-multiplicativity of inversion, and two-sided
/// cancellation.
pub fn property_laws(p: &Poset, paths: &[Path], depth: usize) -> Vec<LawReport> {
    let mut oracle = ClassOracle::new(p, depth);
    let mut inv = LawReport::new("inverses: p⁻¹p = i_b, pp⁻¹ = i_a");
    let mut unit = LawReport::new("units: i_a p = p i_b = p");
    let mut anti = LawReport::new("inverse of a product: (pq)⁻¹ = q⁻¹p⁻¹");
    let mut cancel = LawReport::new("two-sided cancellation");
    for q in paths {
        let (a, b) = q.endpoints().expect("nonzero");
        let qi = q.inverse();
        inv.check(
            oracle.same(&qi.compose(p, q), &Path::identity(b)) && oracle.same(&q.compose(p, &qi), &Path::identity(a)),
            || q.render(p),
        );
        unit.check(
            oracle.same(&Path::identity(a).compose(p, q), q) && oracle.same(&q.compose(p, &Path::identity(b)), q),
            || q.render(p),
        );
    }
    for x in paths {
        for y in paths.iter().filter(|y| y.end() == x.start()) {
            let lhs = x.compose(p, y).inverse();
            let rhs = y.inverse().compose(p, &x.inverse());
            anti.check(oracle.same(&lhs, &rhs), || format!("{} ; {}", x.render(p), y.render(p)));
        }
    }

    let classes = class_representatives(&mut oracle, paths);
    for x in &classes {
        let mut left: BTreeMap<usize, usize> = BTreeMap::new();
        let mut right: BTreeMap<usize, usize> = BTreeMap::new();
        for (k, y) in classes.iter().enumerate() {
            for (prod, seen) in [(x.compose(p, y), &mut left), (y.compose(p, x), &mut right)] {
                match oracle.id(&prod) {
                    Some(Some(c)) => {
                        let first = *seen.entry(c).or_insert(k);
                        cancel.check(first == k, || format!("{} does not cancel", x.render(p)));
                    }
                    Some(None) => {}
                    None => cancel.check(false, || format!("undecided product with {}", x.render(p))),
                }
            }
        }
    }
    if oracle.unresolved > 0 {
        cancel.failures.push(format!("{} undecided equalities", oracle.unresolved));
    }
    vec![inv, unit, anti, cancel]
}

fn class_representatives(oracle: &mut ClassOracle<'_>, paths: &[Path]) -> Vec<Path> {
    let mut seen = BTreeMap::new();
    for q in paths {
        if let Some(Some(c)) = oracle.id(q) {
            seen.entry(c).or_insert_with(|| q.clone());
        }
    }
    seen.into_values().collect()
}

/// Each enumerated class has exactly one mutual inverse among the
/// candidates, namely `p⁻¹`, and idempotents commute.
pub fn inverse_semigroup_laws(p: &Poset, paths: &[Path], depth: usize) -> Vec<LawReport> {
    let mut oracle = ClassOracle::new(p, depth);
    let mut unique = LawReport::new("unique mutual inverse");
    let mut commute = LawReport::new("idempotents commute");
    let mut candidates = class_representatives(&mut oracle, paths);
    candidates.push(Path::zero());
    let prod3 = |x: &Path, y: &Path| Path::product(p, [x, y, x]);
    for x in &candidates {
        let mut found = Vec::new();
        for y in &candidates {
            if oracle.same(&prod3(x, y), x) && oracle.same(&prod3(y, x), y) {
                found.push(y.clone());
            }
        }
        let ok = found.len() == 1 && oracle.same(&found[0], &x.inverse());
        unique.check(ok, || format!("{} has {} inverses", x.render(p), found.len()));
    }
    let idempotents: Vec<&Path> = candidates.iter().filter(|e| oracle.same(&e.compose(p, e), e)).collect();
    for e in &idempotents {
        commute.check(e.is_zero() || e.is_trivial(), || format!("unexpected idempotent {}", e.render(p)));
        for f in &idempotents {
            commute.check(oracle.same(&e.compose(p, f), &f.compose(p, e)), || {
                format!("{} and {} do not commute", e.render(p), f.render(p))
            });
        }
    }
    vec![unique, commute]
}

/// On an upward-directed poset all paths with equal endpoints are equal,
/// with replayable traces, and every loop generator is trivial.
pub fn directed_collapse(p: &Poset, paths: &[Path]) -> Result<LawReport> {
    let mut r = LawReport::new("directed collapse");
    let engine = Engine::new(p);
    let mut groups: BTreeMap<(Elem, Elem), Vec<&Path>> = BTreeMap::new();
    for q in paths {
        groups.entry(q.endpoints().expect("nonzero")).or_default().push(q);
    }
    for group in groups.values() {
        for x in group {
            for y in group {
                let ok = match engine.equal(p, x, y, 0) {
                    Verdict::Equal { trace } => replay(p, x, y, &trace).is_ok(),
                    _ => false,
                };
                r.check(ok, || format!("{} vs {}", x.render(p), y.render(p)));
            }
        }
    }
    for a in p.elements() {
        let lg = loop_group(p, a, 0)?;
        for g in &lg.generators {
            r.check(g.reduces_to_unit, || format!("generator {} at {}", g.path.render(p), p.name(a)));
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::paths_up_to;

    #[test]
    fn laws_hold_on_small_posets() {
        for p in [Poset::diamond(), Poset::chain(3), Poset::circle()] {
            assert!(axiom_laws(&p).passed());
            let paths = paths_up_to(&p, 2);
            for r in property_laws(&p, &paths, 3).into_iter().chain(inverse_semigroup_laws(&p, &paths, 3)) {
                assert!(r.passed(), "{}: {:?}", r.name, r.failures);
                assert!(r.checked > 0);
            }
        }
    }

    #[test]
    fn collapse_on_diamond() {
        let d = Poset::diamond();
        let r = directed_collapse(&d, &paths_up_to(&d, 3)).unwrap();
        assert!(r.passed() && r.checked == 9);
        // two supports for the same endpoints give distinct normal forms here
        let p = Poset::build(&["a", "b", "x", "y"], &[("a", "x"), ("b", "x"), ("x", "y")]).unwrap();
        let paths = paths_up_to(&p, 3);
        assert!(paths.len() > 16);
        let r = directed_collapse(&p, &paths).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
    }
}
