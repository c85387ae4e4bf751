//! Exhaustive generators: simplices, short paths, and small posets up to
//! isomorphism.

use std::collections::{BTreeSet, HashSet};

use itertools::Itertools;

use crate::path::{Path, Simplex1};
use crate::poset::Poset;

/// Every valid `[a^x b]`, ordered by `(a, x, b)`.
pub fn simplices(p: &Poset) -> Vec<Simplex1> {
    let mut out = Vec::new();
    for a in p.elements() {
        for x in p.elements().filter(|&x| p.le(a, x)) {
            for b in p.elements().filter(|&b| p.le(b, x)) {
                out.push(Simplex1 { a, x, b });
            }
        }
    }
    out
}

/// Normal forms of all products of `1..=k` simplices, without the zero
/// path, in sorted order.
pub fn paths_up_to(p: &Poset, k: usize) -> Vec<Path> {
    let simplices: Vec<Path> = simplices(p).iter().map(|s| s.to_path(p)).collect();
    let mut all: BTreeSet<Path> = BTreeSet::new();
    let mut level: Vec<Path> = Vec::new();
    for s in &simplices {
        if all.insert(s.clone()) {
            level.push(s.clone());
        }
    }
    for _ in 1..k {
        let mut next = Vec::new();
        for q in &level {
            for s in &simplices {
                let r = s.compose(p, q);
                if !r.is_zero() && all.insert(r.clone()) {
                    next.push(r);
                }
            }
        }
        level = next;
    }
    all.into_iter().collect()
}

/// Composable simplex words of length `1..=k`.
pub fn simplex_words(p: &Poset, k: usize) -> Vec<Vec<Simplex1>> {
    let simplices = simplices(p);
    let mut out: Vec<Vec<Simplex1>> = simplices.iter().map(|s| vec![*s]).collect();
    let mut level = out.clone();
    for _ in 1..k {
        let mut next = Vec::new();
        for w in &level {
            let head = w[0];
            for s in simplices.iter().filter(|s| s.b == head.a) {
                let mut v = Vec::with_capacity(w.len() + 1);
                v.push(*s);
                v.extend_from_slice(w);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

fn relation_key(n: usize, rel: &[(usize, usize)], perm: &[usize]) -> u64 {
    rel.iter().fold(0u64, |k, &(i, j)| k | 1 << (perm[i] * n + perm[j]))
}

/// All posets on `n` points up to isomorphism, elements named `"0".."n-1"`.
///
/// Every finite poset has a linear extension, so it suffices to scan
/// transitively closed subsets of the pairs `i < j`.
pub fn posets_up_to_iso(n: usize) -> Vec<Poset> {
    assert!(n <= 8, "relation keys fit in 64 bits only up to 8 points");
    let pairs: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
    let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let mut seen: HashSet<u64> = HashSet::new();
    let mut out = Vec::new();
    for mask in 0u64..(1 << pairs.len()) {
        let rel: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let has = |i: usize, j: usize| rel.contains(&(i, j));
        let closed = rel
            .iter()
            .all(|&(i, j)| rel.iter().filter(|&&(k, _)| k == j).all(|&(_, l)| has(i, l)));
        if !closed {
            continue;
        }
        let canon = perms.iter().map(|perm| relation_key(n, &rel, perm)).min().unwrap_or(0);
        if seen.insert(canon) {
            let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
            let le: Vec<(String, String)> = rel.iter().map(|&(i, j)| (i.to_string(), j.to_string())).collect();
            out.push(Poset::build(&names, &le).expect("closed and acyclic"));
        }
    }
    out
}
