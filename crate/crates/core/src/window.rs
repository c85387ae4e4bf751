//! Finite, certified-distinct fragments of the path basis.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::path::{normalize, Path, Step};
use crate::poset::{Elem, Poset};
use crate::word::{Classifier, Lookup};

pub const DEFAULT_DEPTH: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WindowParams {
    /// Every endpoint pair once; upward-directed posets only.
    Directed,
    /// All classes of reduced paths with at most `max_len` elementary steps.
    Reduced { max_len: usize, depth: usize },
}

impl WindowParams {
    /// `Directed` when the poset allows it, otherwise reduced paths of length
    /// at most `max_len`.
    pub fn auto(p: &Poset, max_len: usize) -> Self {
        if p.is_upward_directed() {
            WindowParams::Directed
        } else {
            WindowParams::Reduced { max_len, depth: DEFAULT_DEPTH }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Locate {
    Index(usize),
    Zero,
    /// The class is certified absent from the window.
    Escaped,
    /// The word problem could not decide membership.
    Unresolved,
}

#[derive(Clone, Debug)]
pub struct BasisWindow {
    poset: Poset,
    params: WindowParams,
    basis: Vec<Path>,
    by_end: Vec<Vec<usize>>,
    by_start: Vec<Vec<usize>>,
    forms: HashMap<Path, usize>,
    classifier: Option<Classifier>,
}

pub fn build_window(p: &Poset, params: WindowParams) -> Result<BasisWindow> {
    if p.is_empty() || !p.is_connected() {
        return Err(Error::DisconnectedPoset);
    }
    let n = p.len();
    let mut w = BasisWindow {
        poset: p.clone(),
        params,
        basis: Vec::new(),
        by_end: vec![Vec::new(); n],
        by_start: vec![Vec::new(); n],
        forms: HashMap::new(),
        classifier: None,
    };
    match params {
        WindowParams::Directed => {
            if !p.is_upward_directed() {
                return Err(Error::NotDirected);
            }
            for end in p.elements() {
                for start in p.elements() {
                    let z = p.first_upper_bound(end, start).expect("directed");
                    let raw = [Step::unchecked(p, z, end), Step::unchecked(p, start, z)];
                    w.push(normalize(p, &raw));
                }
            }
        }
        WindowParams::Reduced { max_len, depth } => {
            let mut classifier = Classifier::new(p, depth);
            let mut frontier: Vec<Path> = p.elements().map(Path::identity).collect();
            let mut seen: HashMap<Path, ()> = HashMap::new();
            let mut level = 0;
            loop {
                let mut next = Vec::new();
                for path in frontier {
                    if seen.insert(path.clone(), ()).is_some() {
                        continue;
                    }
                    let before = classifier.representatives().len();
                    let id = classifier.classify(p, &path)?.expect("nonzero");
                    if id == before {
                        w.push(path.clone());
                    } else {
                        w.forms.insert(path.clone(), id);
                    }
                    if level < max_len {
                        let end = path.end().expect("nonzero");
                        for y in p.elements().filter(|&y| y != end && p.comparable(y, end)) {
                            let step = Path::step(p, end, y).expect("comparable");
                            let ext = step.compose(p, &path);
                            if ext.len() > level {
                                next.push(ext);
                            }
                        }
                    }
                }
                if next.is_empty() {
                    break;
                }
                frontier = next;
                level += 1;
            }
            w.classifier = Some(classifier);
        }
    }
    Ok(w)
}

impl BasisWindow {
    fn push(&mut self, path: Path) {
        let id = self.basis.len();
        let (end, start) = path.endpoints().expect("basis paths are nonzero");
        self.by_end[end.index()].push(id);
        self.by_start[start.index()].push(id);
        self.forms.insert(path.clone(), id);
        self.basis.push(path);
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn params(&self) -> WindowParams {
        self.params
    }

    pub fn is_directed(&self) -> bool {
        self.params == WindowParams::Directed
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Path] {
        &self.basis
    }

    pub fn path(&self, i: usize) -> &Path {
        &self.basis[i]
    }

    pub fn basis_names(&self) -> Vec<String> {
        self.basis.iter().map(|q| q.render(&self.poset)).collect()
    }

    /// `S_a`: indices of basis paths ending at `a`.
    pub fn block_end(&self, a: Elem) -> &[usize] {
        &self.by_end[a.index()]
    }

    /// `S^a`: indices of basis paths starting at `a`.
    pub fn block_start(&self, a: Elem) -> &[usize] {
        &self.by_start[a.index()]
    }

    pub fn locate(&self, q: &Path) -> Locate {
        let Some((end, start)) = q.endpoints() else {
            return Locate::Zero;
        };
        if let Some(&i) = self.forms.get(q) {
            return Locate::Index(i);
        }
        match &self.classifier {
            None => Locate::Index(end.index() * self.poset.len() + start.index()),
            Some(c) => match c.lookup(&self.poset, q) {
                // class ids count new classes in discovery order, like the basis
                Lookup::Found(i) => Locate::Index(i),
                Lookup::Absent => Locate::Escaped,
                Lookup::Unresolved => Locate::Unresolved,
            },
        }
    }

    pub fn index_of(&self, q: &Path) -> Result<usize> {
        match self.locate(q) {
            Locate::Index(i) => Ok(i),
            Locate::Zero => Err(Error::ZeroPath),
            Locate::Escaped | Locate::Unresolved => Err(Error::WindowEscape(Vec::new())),
        }
    }

    /// Directed windows: the index of `[end, start]`.
    pub fn pair_index(&self, end: Elem, start: Elem) -> usize {
        debug_assert!(self.is_directed());
        end.index() * self.poset.len() + start.index()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::h1_data;

    #[test]
    fn directed_window_is_all_endpoint_pairs() {
        let d = Poset::diamond();
        let w = build_window(&d, WindowParams::Directed).unwrap();
        assert_eq!(w.len(), 9);
        for a in d.elements() {
            assert_eq!(w.block_end(a).len(), 3);
            assert_eq!(w.block_start(a).len(), 3);
        }
        let (a, b, c) = (d.elem("a").unwrap(), d.elem("b").unwrap(), d.elem("c").unwrap());
        assert_eq!(w.path(w.pair_index(a, c)), &Path::down(&d, a, c).unwrap());
        let there = Path::up(&d, c, b).unwrap();
        let via = Path::down(&d, a, c).unwrap().compose(&d, &there);
        assert_eq!(w.locate(&via), Locate::Index(w.pair_index(a, b)));
        assert_eq!(w.locate(&Path::zero()), Locate::Zero);
    }

    #[test]
    fn singleton_window() {
        let w = build_window(&Poset::chain(1), WindowParams::auto(&Poset::chain(1), 3)).unwrap();
        assert_eq!(w.len(), 1);
        assert!(w.path(0).is_trivial());
    }

    #[test]
    fn circle_window_classes() {
        let c = Poset::circle();
        let w = build_window(&c, WindowParams::Reduced { max_len: 2, depth: 2 }).unwrap();
        let h = h1_data(&c).unwrap();
        let mut keys: Vec<_> = w
            .basis()
            .iter()
            .map(|q| (q.endpoints().unwrap(), h.relative_class(&c, q).unwrap()))
            .collect();
        let n = keys.len();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), n);
        // non-backtracking walks of length <= 2 on a 4-cycle: 4 + 8 + 8
        assert_eq!(n, 20);
        let a1 = c.elem("a1").unwrap();
        assert_eq!(w.block_end(a1).len(), 5);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            build_window(&Poset::antichain(2), WindowParams::Directed),
            Err(Error::DisconnectedPoset)
        ));
        assert!(matches!(
            build_window(&Poset::circle(), WindowParams::Directed),
            Err(Error::NotDirected)
        ));
    }
}
