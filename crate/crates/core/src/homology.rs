//! First integer homology of the order complex (vertices, comparable pairs,
//! strict 3-chains), used as an abelian invariant of path classes.
//!
//! Cycles are coordinatized by their values on the chords of a fixed
//! spanning tree; boundaries of 3-chains become the columns of the relation
//! matrix whose Smith form gives `H1 = Z^rank + torsion`.

use std::collections::HashMap;

use num::{BigInt, Integer, One, Zero};

use crate::error::{Error, Result};
use crate::path::{Direction, Path};
use crate::poset::{Elem, Poset, SpanningTree};
use crate::snf::{smith_normal_form, IntMatrix, Smith};

#[derive(Clone, Debug)]
pub struct HomologyData {
    /// Comparable pairs `(lower, upper)`, sorted by declaration.
    pub edges: Vec<(Elem, Elem)>,
    edge_index: HashMap<(Elem, Elem), usize>,
    pub triangles: Vec<(Elem, Elem, Elem)>,
    /// Vertices x edges.
    pub boundary1: IntMatrix,
    /// Edges x triangles.
    pub boundary2: IntMatrix,
    pub tree: SpanningTree,
    /// Edge indices outside the tree, in edge order.
    pub chords: Vec<usize>,
    /// Smith form of `boundary2` restricted to chord rows.
    pub smith: Smith,
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

/// A class in `H1`: free coordinates followed by torsion residues.
pub type ClassVector = Vec<BigInt>;

pub fn h1_data(p: &Poset) -> Result<HomologyData> {
    if p.is_empty() || !p.is_connected() {
        return Err(Error::DisconnectedPoset);
    }
    let graph = p.comparability_graph();
    let edge_index = graph.edge_index();
    let edges = graph.edges.clone();
    let triangles = p.triangles();

    let mut boundary1 = IntMatrix::zeros(p.len(), edges.len());
    for (k, &(a, b)) in edges.iter().enumerate() {
        boundary1[(b.index(), k)] += 1;
        boundary1[(a.index(), k)] -= 1;
    }
    let mut boundary2 = IntMatrix::zeros(edges.len(), triangles.len());
    for (t, &(a, b, c)) in triangles.iter().enumerate() {
        boundary2[(edge_index[&(b, c)], t)] += 1;
        boundary2[(edge_index[&(a, c)], t)] -= 1;
        boundary2[(edge_index[&(a, b)], t)] += 1;
    }

    let tree = graph.spanning_tree(Elem(0));
    let chords: Vec<usize> = edges
        .iter()
        .enumerate()
        .filter(|(_, &(a, b))| !tree.contains_edge(a, b))
        .map(|(k, _)| k)
        .collect();
    let relations = boundary2.select_rows(&chords);
    let smith = smith_normal_form(&relations);
    let rank = chords.len() - smith.rank();
    let torsion = smith.invariants.iter().filter(|d| !d.is_one()).cloned().collect();
    Ok(HomologyData {
        edges,
        edge_index,
        triangles,
        boundary1,
        boundary2,
        tree,
        chords,
        smith,
        rank,
        torsion,
    })
}

impl HomologyData {
    /// Edge 1-chain of a walk: `+1` per upward traversal, `-1` per downward.
    pub fn edge_vector(&self, path: &Path) -> Vec<BigInt> {
        let mut z = vec![BigInt::zero(); self.edges.len()];
        for s in path.travel() {
            match s.direction() {
                Direction::Up => z[self.edge_index[&(s.from(), s.to())]] += 1,
                Direction::Down => z[self.edge_index[&(s.to(), s.from())]] -= 1,
                Direction::Trivial => {}
            }
        }
        z
    }

    fn route_vector(&self, p: &Poset, from: Elem, to: Elem) -> Vec<BigInt> {
        let mut z = vec![BigInt::zero(); self.edges.len()];
        for w in self.tree.route(from, to).windows(2) {
            let (u, v) = (w[0], w[1]);
            if p.le(u, v) {
                z[self.edge_index[&(u, v)]] += 1;
            } else {
                z[self.edge_index[&(v, u)]] -= 1;
            }
        }
        z
    }

    pub fn class_of_cycle(&self, z: &[BigInt]) -> ClassVector {
        let coords: Vec<BigInt> = self.chords.iter().map(|&k| z[k].clone()).collect();
        let transformed = self.smith.left.mul_vec(&coords);
        let r = self.smith.rank();
        let mut out: ClassVector = transformed[r..].to_vec();
        for (i, d) in self.smith.invariants.iter().enumerate() {
            if !d.is_one() {
                out.push(transformed[i].mod_floor(d));
            }
        }
        out
    }

    pub fn h1_class(&self, p: &Poset, path: &Path) -> Result<ClassVector> {
        if !path.is_loop() {
            return Err(Error::NotALoop(path.render(p)));
        }
        Ok(self.class_of_cycle(&self.edge_vector(path)))
    }

    /// Class of a path closed up by the tree route from its end back to its
    /// start. Equal paths share endpoints and relative class.
    pub fn relative_class(&self, p: &Poset, path: &Path) -> Result<ClassVector> {
        let (end, start) = path.endpoints().ok_or(Error::ZeroPath)?;
        let mut z = self.edge_vector(path);
        for (acc, r) in z.iter_mut().zip(self.route_vector(p, end, start)) {
            *acc += r;
        }
        Ok(self.class_of_cycle(&z))
    }

    /// Image of a single upward edge under the class map (before torsion
    /// reduction), for chord edges; tree edges project to zero.
    pub fn edge_projection(&self, edge: usize) -> Vec<BigInt> {
        let k = self.chords.len();
        let mut unit = vec![BigInt::zero(); k];
        if let Some(pos) = self.chords.iter().position(|&c| c == edge) {
            unit[pos] = BigInt::one();
        }
        self.smith.left.mul_vec(&unit)
    }

    pub fn zero_class(&self) -> ClassVector {
        vec![BigInt::zero(); self.rank + self.torsion.len()]
    }

    pub fn is_boundary(&self, z: &[BigInt]) -> bool {
        self.class_of_cycle(z).iter().all(Zero::is_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::Simplex1;

    fn rank_over_q(m: &IntMatrix) -> usize {
        // fraction-free elimination on a copy
        let mut a: Vec<Vec<BigInt>> =
            (0..m.rows()).map(|i| (0..m.cols()).map(|j| m[(i, j)].clone()).collect()).collect();
        let mut rank = 0;
        for col in 0..m.cols() {
            let Some(piv) = (rank..a.len()).find(|&i| !a[i][col].is_zero()) else {
                continue;
            };
            a.swap(rank, piv);
            for i in 0..a.len() {
                if i != rank && !a[i][col].is_zero() {
                    let (f, g) = (a[rank][col].clone(), a[i][col].clone());
                    let pivot = a[rank].clone();
                    for (x, y) in a[i].iter_mut().zip(&pivot) {
                        *x = &*x * &f - y * &g;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn betti1(p: &Poset) -> usize {
        let h = h1_data(p).unwrap();
        h.edges.len() - rank_over_q(&h.boundary1) - rank_over_q(&h.boundary2)
    }

    #[test]
    fn ranks_match_rational_oracle() {
        for (p, expected) in [(Poset::chain(3), 0), (Poset::circle(), 1), (Poset::diamond(), 0)] {
            let h = h1_data(&p).unwrap();
            assert_eq!(h.rank, expected);
            assert_eq!(betti1(&p), expected);
            assert!(h.torsion.is_empty());
            assert!(h.boundary1.mul(&h.boundary2).is_zero());
        }
    }

    #[test]
    fn disconnected_is_rejected() {
        assert!(matches!(h1_data(&Poset::antichain(2)), Err(Error::DisconnectedPoset)));
    }

    #[test]
    fn winding_classes_are_linear() {
        let c = Poset::circle();
        let h = h1_data(&c).unwrap();
        let e = |n: &str| c.elem(n).unwrap();
        let g = Path::from_simplices(
            &c,
            &[
                Simplex1 { a: e("a1"), x: e("b1"), b: e("a2") },
                Simplex1 { a: e("a2"), x: e("b2"), b: e("a1") },
            ],
        )
        .unwrap();
        let one = h.h1_class(&c, &g).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].magnitude(), &num::BigUint::one());
        let two = h.h1_class(&c, &g.compose(&c, &g)).unwrap();
        assert_eq!(two[0], &one[0] * 2);
        assert_eq!(h.h1_class(&c, &Path::identity(e("a1"))).unwrap(), h.zero_class());
        assert_eq!(h.h1_class(&c, &g.inverse()).unwrap()[0], -&one[0]);
        let s = Path::step(&c, e("a1"), e("b1")).unwrap();
        assert!(matches!(h.h1_class(&c, &s), Err(Error::NotALoop(_))));
    }
}
