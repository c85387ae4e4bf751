//! Paths of the path semigroup: elementary steps, the semigroup product with
//! the formal zero, inversion, normal forms and the 1-simplex view.
//!
//! Steps are stored in written order: the leftmost factor is applied last,
//! so `steps()[0]` ends the path and the last step starts it.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poset::{Elem, Poset};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    /// `to < from`, written `d(to, from)`.
    Down,
    /// `to > from`, written `u(to, from)`.
    Up,
    /// `to == from`, the unit `i(a)`.
    Trivial,
}

/// An elementary path between comparable elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step {
    from: Elem,
    to: Elem,
    dir: Direction,
}

impl Step {
    pub fn new(p: &Poset, from: Elem, to: Elem) -> Result<Self> {
        if !p.comparable(from, to) {
            return Err(Error::NotComparable(p.name(from).into(), p.name(to).into()));
        }
        Ok(Step::unchecked(p, from, to))
    }

    /// Caller guarantees comparability.
    pub(crate) fn unchecked(p: &Poset, from: Elem, to: Elem) -> Self {
        let dir = if from == to {
            Direction::Trivial
        } else if p.le(to, from) {
            Direction::Down
        } else {
            Direction::Up
        };
        Step { from, to, dir }
    }

    pub fn trivial(a: Elem) -> Self {
        Step { from: a, to: a, dir: Direction::Trivial }
    }

    #[inline]
    pub fn from(&self) -> Elem {
        self.from
    }

    #[inline]
    pub fn to(&self) -> Elem {
        self.to
    }

    #[inline]
    pub fn direction(&self) -> Direction {
        self.dir
    }

    pub fn inverse(&self) -> Self {
        let dir = match self.dir {
            Direction::Down => Direction::Up,
            Direction::Up => Direction::Down,
            Direction::Trivial => Direction::Trivial,
        };
        Step { from: self.to, to: self.from, dir }
    }

    pub fn render(&self, p: &Poset) -> String {
        let (to, from) = (p.name(self.to), p.name(self.from));
        match self.dir {
            Direction::Down => format!("d({to},{from})"),
            Direction::Up => format!("u({to},{from})"),
            Direction::Trivial => format!("i({to})"),
        }
    }
}

/// A normal-form path, or the empty path `0` (an empty step list).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Path {
    steps: Vec<Step>,
}

impl fmt::Debug for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("Path(0)");
        }
        f.write_str("Path(")?;
        for (k, s) in self.steps.iter().enumerate() {
            if k > 0 {
                f.write_str(" * ")?;
            }
            write!(f, "{}->{}", s.from.0, s.to.0)?;
        }
        f.write_str(")")
    }
}

impl Path {
    pub fn zero() -> Self {
        Path { steps: Vec::new() }
    }

    pub fn identity(a: Elem) -> Self {
        Path { steps: vec![Step::trivial(a)] }
    }

    /// Single elementary path from `from` to `to`.
    pub fn step(p: &Poset, from: Elem, to: Elem) -> Result<Self> {
        let s = Step::new(p, from, to)?;
        Ok(Path { steps: vec![s] })
    }

    /// `(b, a)` with `b <= a`: down from `a` to `b`.
    pub fn down(p: &Poset, b: Elem, a: Elem) -> Result<Self> {
        if !p.le(b, a) {
            return Err(Error::WrongOrientation(p.name(b).into(), "below", p.name(a).into()));
        }
        Path::step(p, a, b)
    }

    /// Overlined `(b, a)` with `b >= a`: up from `a` to `b`.
    pub fn up(p: &Poset, b: Elem, a: Elem) -> Result<Self> {
        if !p.le(a, b) {
            return Err(Error::WrongOrientation(p.name(b).into(), "above", p.name(a).into()));
        }
        Path::step(p, a, b)
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.steps.is_empty()
    }

    /// Steps in written order.
    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// Steps in the order they are traversed.
    pub fn travel(&self) -> impl DoubleEndedIterator<Item = &Step> + ExactSizeIterator {
        self.steps.iter().rev()
    }

    /// Number of nontrivial steps.
    pub fn len(&self) -> usize {
        self.steps.iter().filter(|s| s.dir != Direction::Trivial).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_trivial(&self) -> bool {
        self.steps.len() == 1 && self.steps[0].dir == Direction::Trivial
    }

    /// `∂₁`, the starting point.
    pub fn start(&self) -> Option<Elem> {
        self.steps.last().map(|s| s.from)
    }

    /// `∂₀`, the ending point.
    pub fn end(&self) -> Option<Elem> {
        self.steps.first().map(|s| s.to)
    }

    /// `(end, start)`, or `None` for `0`.
    pub fn endpoints(&self) -> Option<(Elem, Elem)> {
        Some((self.end()?, self.start()?))
    }

    pub fn is_loop(&self) -> bool {
        matches!(self.endpoints(), Some((e, s)) if e == s)
    }

    pub fn inverse(&self) -> Path {
        Path { steps: self.steps.iter().rev().map(Step::inverse).collect() }
    }

    /// Semigroup product `self * q`: apply `q`, then `self`.
    pub fn compose(&self, p: &Poset, q: &Path) -> Path {
        if self.is_zero() || q.is_zero() || self.start() != q.end() {
            return Path::zero();
        }
        let mut stack = Vec::with_capacity(self.steps.len() + q.steps.len());
        let start = q.start().expect("nonzero");
        for &s in q.steps.iter().rev().chain(self.steps.iter().rev()) {
            push_reduced(p, &mut stack, s);
        }
        finish(stack, start)
    }

    /// Right-to-left product of several factors.
    pub fn product<'a>(p: &Poset, factors: impl IntoIterator<Item = &'a Path>) -> Path {
        let mut iter = factors.into_iter();
        let Some(first) = iter.next() else {
            return Path::zero();
        };
        iter.fold(first.clone(), |acc, f| acc.compose(p, f))
    }

    pub fn power(&self, p: &Poset, n: usize) -> Path {
        match self.end() {
            None => Path::zero(),
            Some(_) if n == 0 => Path::identity(self.start().expect("nonzero")),
            Some(_) => (1..n).fold(self.clone(), |acc, _| acc.compose(p, self)),
        }
    }

    pub fn render(&self, p: &Poset) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let parts: Vec<String> = self.steps.iter().map(|s| s.render(p)).collect();
        parts.join(" * ")
    }

    pub fn to_simplices(&self, _p: &Poset) -> Result<Vec<Simplex1>> {
        if self.is_zero() {
            return Err(Error::ZeroPath);
        }
        if self.is_trivial() {
            let a = self.steps[0].from;
            return Ok(vec![Simplex1 { a, x: a, b: a }]);
        }
        let travel: Vec<Step> = self.travel().copied().collect();
        let mut out = Vec::with_capacity(travel.len() / 2 + 1);
        let mut i = 0;
        while i < travel.len() {
            let s = travel[i];
            match s.dir {
                Direction::Up => {
                    if let Some(t) = travel.get(i + 1) {
                        out.push(Simplex1 { a: t.to, x: s.to, b: s.from });
                        i += 2;
                    } else {
                        out.push(Simplex1 { a: s.to, x: s.to, b: s.from });
                        i += 1;
                    }
                }
                // only a leading down step reaches here; pad with a trivial wing
                _ => {
                    out.push(Simplex1 { a: s.to, x: s.from, b: s.from });
                    i += 1;
                }
            }
        }
        out.reverse();
        Ok(out)
    }

    pub fn from_simplices(p: &Poset, word: &[Simplex1]) -> Result<Path> {
        let Some(first) = word.first() else {
            return Err(Error::ZeroPath);
        };
        if let Some(bad) = word.iter().find(|s| !s.is_valid(p)) {
            return Err(Error::InvalidSimplex(bad.render(p)));
        }
        for w in word.windows(2) {
            if w[0].b != w[1].a {
                return Err(Error::NotComposable(format!(
                    "{} * {}",
                    w[0].render(p),
                    w[1].render(p)
                )));
            }
        }
        let mut stack = Vec::with_capacity(2 * word.len());
        let start = word.last().map(|s| s.b).unwrap_or(first.b);
        for s in word.iter().rev() {
            push_reduced(p, &mut stack, Step::unchecked(p, s.b, s.x));
            push_reduced(p, &mut stack, Step::unchecked(p, s.x, s.a));
        }
        Ok(finish(stack, start))
    }

    pub fn display<'a>(&'a self, p: &'a Poset) -> PathDisplay<'a> {
        PathDisplay { path: self, poset: p }
    }
}

/// Normal form of a raw written-order step word; `0` when the word is empty
/// or some consecutive steps do not meet.
pub fn normalize(p: &Poset, raw: &[Step]) -> Path {
    let Some(last) = raw.last() else {
        return Path::zero();
    };
    if raw.windows(2).any(|w| w[0].from != w[1].to) {
        return Path::zero();
    }
    let mut stack = Vec::with_capacity(raw.len());
    for &s in raw.iter().rev() {
        push_reduced(p, &mut stack, s);
    }
    finish(stack, last.from)
}

// Travel-order stack reduction. Two consecutive steps whose outer endpoints
// are comparable fold into the single step between them: this covers merging
// same-direction runs, cancelling inverse pairs, and collapsing wedges whose
// ends are comparable. Trivial steps vanish.
fn push_reduced(p: &Poset, stack: &mut Vec<Step>, mut s: Step) {
    loop {
        if s.dir == Direction::Trivial {
            return;
        }
        match stack.last() {
            Some(&t) if p.comparable(t.from, s.to) => {
                stack.pop();
                s = Step::unchecked(p, t.from, s.to);
            }
            _ => {
                stack.push(s);
                return;
            }
        }
    }
}

fn finish(mut stack: Vec<Step>, start: Elem) -> Path {
    if stack.is_empty() {
        return Path::identity(start);
    }
    stack.reverse();
    Path { steps: stack }
}

pub struct PathDisplay<'a> {
    path: &'a Path,
    poset: &'a Poset,
}

impl fmt::Display for PathDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.path.render(self.poset))
    }
}

/// The 1-simplex `[a^x b] = (a, x) * overline(x, b)`: up from `b` to the
/// support `x`, then down to `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Simplex1 {
    pub a: Elem,
    pub x: Elem,
    pub b: Elem,
}

impl Simplex1 {
    pub fn new(p: &Poset, a: Elem, x: Elem, b: Elem) -> Result<Self> {
        let s = Simplex1 { a, x, b };
        if !(p.le(a, x) && p.le(b, x)) {
            return Err(Error::InvalidSimplex(s.render(p)));
        }
        Ok(s)
    }

    pub fn is_valid(&self, p: &Poset) -> bool {
        p.le(self.a, self.x) && p.le(self.b, self.x)
    }

    pub fn is_unit(&self) -> bool {
        self.a == self.x && self.x == self.b
    }

    pub fn inverse(&self) -> Self {
        Simplex1 { a: self.b, x: self.x, b: self.a }
    }

    pub fn to_path(&self, p: &Poset) -> Path {
        Path::from_simplices(p, std::slice::from_ref(self)).expect("single simplex")
    }

    pub fn render(&self, p: &Poset) -> String {
        format!("[{}^{} {}]", p.name(self.a), p.name(self.x), p.name(self.b))
    }

    /// Replace the support by `y`, reachable from the current support through
    /// comparable supports that all bound both endpoints.
    pub fn support_move(&self, p: &Poset, y: Elem) -> Result<Simplex1> {
        let invalid = || Error::InvalidSupport { simplex: self.render(p), support: p.name(y).into() };
        if !(p.le(self.a, y) && p.le(self.b, y)) || !self.is_valid(p) {
            return Err(invalid());
        }
        if support_chain(p, self.a, self.b, self.x, y).is_none() {
            return Err(invalid());
        }
        Ok(Simplex1 { a: self.a, x: y, b: self.b })
    }

    /// `[a^x b] * [b^y c] = [a^z c]` for `x, y <= z`.
    pub fn merge(&self, p: &Poset, right: &Simplex1, z: Elem) -> Result<Simplex1> {
        if self.b != right.a {
            return Err(Error::NotAdjacent(self.render(p), right.render(p)));
        }
        if !(p.le(self.x, z) && p.le(right.x, z)) {
            return Err(Error::NotAnUpperBound {
                x: p.name(self.x).into(),
                y: p.name(right.x).into(),
                z: p.name(z).into(),
            });
        }
        Ok(Simplex1 { a: self.a, x: z, b: right.b })
    }

    /// Inverse of a merge through `mid` with supports `(x, y)`; requires the
    /// three supports to share an upper bound.
    pub fn split(&self, p: &Poset, mid: Elem, x: Elem, y: Elem) -> Result<(Simplex1, Simplex1)> {
        let left = Simplex1::new(p, self.a, x, mid)?;
        let right = Simplex1::new(p, mid, y, self.b)?;
        if p.common_upper_bounds(&[x, y, self.x]).is_empty() {
            return Err(Error::NoCommonBound(vec![
                p.name(x).into(),
                p.name(y).into(),
                p.name(self.x).into(),
            ]));
        }
        Ok((left, right))
    }
}

/// Chain of supports from `x` to `y`, consecutive entries comparable, every
/// entry bounding `a` and `b`.
pub fn support_chain(p: &Poset, a: Elem, b: Elem, x: Elem, y: Elem) -> Option<Vec<Elem>> {
    let bounds = p.upper_bounds(a, b);
    if !bounds.contains(&x) || !bounds.contains(&y) {
        return None;
    }
    let mut prev: Vec<Option<Elem>> = vec![None; p.len()];
    let mut seen = vec![false; p.len()];
    seen[x.index()] = true;
    let mut queue = VecDeque::from([x]);
    while let Some(u) = queue.pop_front() {
        if u == y {
            let mut chain = vec![y];
            let mut cur = y;
            while let Some(w) = prev[cur.index()] {
                chain.push(w);
                cur = w;
            }
            chain.reverse();
            return Some(chain);
        }
        for &v in &bounds {
            if !seen[v.index()] && p.comparable(u, v) {
                seen[v.index()] = true;
                prev[v.index()] = Some(u);
                queue.push_back(v);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(p: &Poset, n: &str) -> Elem {
        p.elem(n).unwrap()
    }

    fn winding(c: &Poset) -> Path {
        let s1 = Simplex1::new(c, e(c, "a1"), e(c, "b1"), e(c, "a2")).unwrap();
        let s2 = Simplex1::new(c, e(c, "a2"), e(c, "b2"), e(c, "a1")).unwrap();
        Path::from_simplices(c, &[s1, s2]).unwrap()
    }

    #[test]
    fn step_directions() {
        let d = Poset::diamond();
        let s = Path::step(&d, e(&d, "c"), e(&d, "a")).unwrap();
        assert_eq!(s.steps()[0].direction(), Direction::Down);
        assert_eq!(s.endpoints(), Some((e(&d, "a"), e(&d, "c"))));
        assert!(Path::step(&d, e(&d, "a"), e(&d, "a")).unwrap().is_trivial());
        assert!(matches!(Path::step(&d, e(&d, "a"), e(&d, "b")), Err(Error::NotComparable(..))));
    }

    #[test]
    fn axioms_on_chain() {
        let ch = Poset::chain(3);
        let (x0, x1, x2) = (Elem(0), Elem(1), Elem(2));
        let d01 = Path::down(&ch, x0, x1).unwrap();
        let d12 = Path::down(&ch, x1, x2).unwrap();
        assert_eq!(d01.compose(&ch, &d12), Path::down(&ch, x0, x2).unwrap());
        let u10 = Path::up(&ch, x1, x0).unwrap();
        assert_eq!(u10.compose(&ch, &d01), Path::identity(x1));
        assert_eq!(d01.compose(&ch, &u10), Path::identity(x0));
        assert_eq!(d01.compose(&ch, &Path::identity(x1)), d01);
        assert_eq!(Path::identity(x0).compose(&ch, &d01), d01);
        assert_eq!(Path::identity(x0).compose(&ch, &Path::identity(x0)), Path::identity(x0));
        assert!(Path::identity(x0).compose(&ch, &Path::identity(x1)).is_zero());
        assert!(Path::zero().compose(&ch, &d01).is_zero());
    }

    #[test]
    fn diamond_cancellation() {
        let d = Poset::diamond();
        let (a, b, c) = (e(&d, "a"), e(&d, "b"), e(&d, "c"));
        let acb = Simplex1::new(&d, a, c, b).unwrap().to_path(&d);
        let bca = Simplex1::new(&d, b, c, a).unwrap().to_path(&d);
        assert_eq!(acb.compose(&d, &bca), Path::identity(a));
        assert_eq!(acb.inverse(), bca);
    }

    #[test]
    fn normalize_examples() {
        let ch = Poset::chain(3);
        let raw = [Step::new(&ch, Elem(1), Elem(0)).unwrap(), Step::new(&ch, Elem(2), Elem(1)).unwrap()];
        assert_eq!(normalize(&ch, &raw), Path::down(&ch, Elem(0), Elem(2)).unwrap());
        let d = Poset::diamond();
        let (a, c) = (e(&d, "a"), e(&d, "c"));
        let raw = [Step::new(&d, c, a).unwrap(), Step::new(&d, a, c).unwrap()];
        assert_eq!(normalize(&d, &raw), Path::identity(a));
        assert_eq!(normalize(&d, &[Step::trivial(a), Step::trivial(a)]), Path::identity(a));
        assert!(normalize(&d, &[]).is_zero());
        let broken = [Step::new(&d, c, a).unwrap(), Step::new(&d, c, a).unwrap()];
        assert!(normalize(&d, &broken).is_zero());
    }

    #[test]
    fn endpoints_and_zero() {
        let d = Poset::diamond();
        let ac = Path::down(&d, e(&d, "a"), e(&d, "c")).unwrap();
        assert_eq!(ac.endpoints(), Some((e(&d, "a"), e(&d, "c"))));
        assert_eq!(Path::zero().endpoints(), None);
        assert_eq!(Path::identity(e(&d, "b")).endpoints(), Some((e(&d, "b"), e(&d, "b"))));
        assert_eq!(ac.inverse().inverse(), ac);
        assert_eq!(Path::identity(e(&d, "a")).inverse(), Path::identity(e(&d, "a")));
        assert!(Path::zero().inverse().is_zero());
    }

    #[test]
    fn simplex_regrouping() {
        let d = Poset::diamond();
        let s = Simplex1::new(&d, e(&d, "a"), e(&d, "c"), e(&d, "b")).unwrap();
        assert_eq!(s.to_path(&d).to_simplices(&d).unwrap(), vec![s]);

        let c = Poset::circle();
        let g = winding(&c);
        let word = g.to_simplices(&c).unwrap();
        assert_eq!(
            word,
            vec![
                Simplex1 { a: e(&c, "a1"), x: e(&c, "b1"), b: e(&c, "a2") },
                Simplex1 { a: e(&c, "a2"), x: e(&c, "b2"), b: e(&c, "a1") },
            ]
        );
        assert_eq!(Path::from_simplices(&c, &word).unwrap(), g);

        let ch = Poset::chain(3);
        let d02 = Path::down(&ch, Elem(0), Elem(2)).unwrap();
        assert_eq!(d02.to_simplices(&ch).unwrap(), vec![Simplex1 { a: Elem(0), x: Elem(2), b: Elem(2) }]);
        let u20 = d02.inverse();
        assert_eq!(u20.to_simplices(&ch).unwrap(), vec![Simplex1 { a: Elem(2), x: Elem(2), b: Elem(0) }]);
        assert!(Path::zero().to_simplices(&ch).is_err());
        let bad = [Simplex1 { a: Elem(0), x: Elem(1), b: Elem(1) }, Simplex1 { a: Elem(0), x: Elem(2), b: Elem(2) }];
        assert!(matches!(Path::from_simplices(&ch, &bad), Err(Error::NotComposable(_))));
    }

    #[test]
    fn support_moves() {
        let d = Poset::diamond();
        let s = Simplex1::new(&d, e(&d, "a"), e(&d, "c"), e(&d, "b")).unwrap();
        assert_eq!(s.support_move(&d, e(&d, "c")).unwrap(), s);

        let p = Poset::build(&["a", "b", "x", "y"], &[("a", "x"), ("b", "x"), ("x", "y")]).unwrap();
        let s = Simplex1::new(&p, e(&p, "a"), e(&p, "x"), e(&p, "b")).unwrap();
        let moved = s.support_move(&p, e(&p, "y")).unwrap();
        assert_eq!(moved.x, e(&p, "y"));
        assert_eq!(s.to_path(&p).endpoints(), moved.to_path(&p).endpoints());

        let c = Poset::circle();
        let s = Simplex1::new(&c, e(&c, "a1"), e(&c, "b1"), e(&c, "a2")).unwrap();
        assert!(matches!(s.support_move(&c, e(&c, "b2")), Err(Error::InvalidSupport { .. })));
    }

    #[test]
    fn merge_and_split() {
        let ch = Poset::chain(3);
        let s1 = Simplex1 { a: Elem(0), x: Elem(1), b: Elem(1) };
        let s2 = Simplex1 { a: Elem(1), x: Elem(2), b: Elem(2) };
        let m = s1.merge(&ch, &s2, Elem(2)).unwrap();
        assert_eq!(m, Simplex1 { a: Elem(0), x: Elem(2), b: Elem(2) });
        assert_eq!(
            Path::from_simplices(&ch, &[s1, s2]).unwrap(),
            m.to_path(&ch)
        );
        assert_eq!(m.split(&ch, Elem(1), Elem(1), Elem(2)).unwrap(), (s1, s2));

        let d = Poset::diamond();
        let (a, b, c) = (e(&d, "a"), e(&d, "b"), e(&d, "c"));
        let m = Simplex1 { a, x: c, b }.merge(&d, &Simplex1 { a: b, x: c, b: a }, c).unwrap();
        assert_eq!(m, Simplex1 { a, x: c, b: a });
        assert_eq!(m.to_path(&d), Path::identity(a));

        let circ = Poset::circle();
        let (a1, a2, b1, b2) = (e(&circ, "a1"), e(&circ, "a2"), e(&circ, "b1"), e(&circ, "b2"));
        let l = Simplex1 { a: a1, x: b1, b: a2 };
        let r = Simplex1 { a: a2, x: b2, b: a1 };
        for z in circ.elements() {
            assert!(matches!(l.merge(&circ, &r, z), Err(Error::NotAnUpperBound { .. })));
        }
        assert!(matches!(l.merge(&circ, &l, b1), Err(Error::NotAdjacent(..))));
        assert!(matches!(l.split(&circ, a1, b1, b2), Err(Error::NoCommonBound(_))));

        let s = Simplex1 { a, x: c, b };
        let (u, v) = s.split(&d, a, c, c).unwrap();
        assert_eq!(u.to_path(&d), Path::identity(a));
        assert_eq!(v, s);
    }

    #[test]
    fn rendering() {
        let c = Poset::circle();
        assert_eq!(winding(&c).render(&c), "d(a1,b1) * u(b1,a2) * d(a2,b2) * u(b2,a1)");
        assert_eq!(Path::zero().render(&c), "0");
        assert_eq!(Path::identity(e(&c, "a2")).render(&c), "i(a2)");
    }
}
