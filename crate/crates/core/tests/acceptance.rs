//! Acceptance run: one line per criterion, nonzero exit on any failure.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num::{BigInt, BigRational, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pathnet_core::cuntz::{
    dyadic_infinite_scheme, ideal_products_check, residue_scheme, sample_pairs, verify_cuntz, CuntzWindow,
};
use pathnet_core::enumerate::{paths_up_to, posets_up_to_iso, simplex_words};
use pathnet_core::expr::parse_path;
use pathnet_core::homology::h1_data;
use pathnet_core::laws::{axiom_laws, directed_collapse, inverse_semigroup_laws, property_laws, LawReport};
use pathnet_core::net::{cocycle_check, gamma, gamma_path};
use pathnet_core::operator::{abs_sq, scalar, Scalar, WindowMatrix};
use pathnet_core::rep::{block_decomposition_check, noncompactness_orbit_check, represent, restriction_rank};
use pathnet_core::suites::random_combination;
use pathnet_core::window::{build_window, BasisWindow, WindowParams};
use pathnet_core::word::{equal_paths, Certificate, Verdict};
use pathnet_core::{Elem, Path, Poset, Simplex1};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn laws_ok(reports: &[LawReport]) -> Result<usize, String> {
    for r in reports {
        ensure(r.passed(), format!("{}: {:?}", r.name, r.failures))?;
    }
    Ok(reports.iter().map(|r| r.checked).sum())
}

fn test_posets() -> Vec<(&'static str, Poset)> {
    vec![("diamond", Poset::diamond()), ("chain3", Poset::chain(3)), ("circle", Poset::circle())]
}

fn winding(c: &Poset) -> Path {
    parse_path("[a1^b1 a2] * [a2^b2 a1]", c).expect("winding loop")
}

fn timed(limit: Duration, start: Instant) -> Result<String, String> {
    let t = start.elapsed();
    ensure(t < limit, format!("took {t:.2?}, limit {limit:?}"))?;
    Ok(format!("{t:.2?}"))
}

fn axioms() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for (name, p) in test_posets() {
        let paths = paths_up_to(&p, 3);
        let mut reports = vec![axiom_laws(&p)];
        reports.extend(property_laws(&p, &paths, 4));
        checked += laws_ok(&reports).map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(format!("{checked} checks, {}", timed(Duration::from_secs(5), start)?))
}

fn inverse_semigroup() -> Outcome {
    let mut checked = 0;
    for (name, p) in test_posets() {
        let paths = paths_up_to(&p, 3);
        checked += laws_ok(&inverse_semigroup_laws(&p, &paths, 4)).map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(format!("{checked} checks"))
}

fn directed() -> Outcome {
    let mut posets = Vec::new();
    for n in 1..=6 {
        posets.extend(posets_up_to_iso(n).into_iter().filter(Poset::is_upward_directed));
    }
    // a finite poset is upward directed iff it has a maximum, so the count
    // is the number of posets on one point fewer: 1 + 1 + 2 + 5 + 16 + 63
    ensure(posets.len() == 88, format!("{} directed posets, expected 88", posets.len()))?;
    for p in &posets {
        let top = p.elements().any(|t| p.elements().all(|x| p.le(x, t)));
        ensure(top, "directed poset without a maximum")?;
    }
    let mut checked = 0;
    for p in &posets {
        let r = directed_collapse(p, &paths_up_to(p, 3)).map_err(|e| e.to_string())?;
        checked += laws_ok(std::slice::from_ref(&r))?;
    }
    Ok(format!("{} posets, {checked} checks, no Unknown", posets.len()))
}

// H1 of a complex without triangles is free of rank E - V + components.
fn h1_rank_oracle(p: &Poset) -> (usize, bool) {
    let elems: Vec<Elem> = p.elements().collect();
    let edges: Vec<(Elem, Elem)> =
        elems.iter().flat_map(|&a| elems.iter().map(move |&b| (a, b))).filter(|&(a, b)| p.lt(a, b)).collect();
    let triangles = elems
        .iter()
        .flat_map(|&a| elems.iter().map(move |&b| (a, b)))
        .filter(|&(a, b)| p.lt(a, b))
        .flat_map(|(_, b)| elems.iter().filter(move |&&c| p.lt(b, c)))
        .count();
    let mut comp: Vec<usize> = (0..elems.len()).collect();
    fn find(c: &mut Vec<usize>, x: usize) -> usize {
        if c[x] != x {
            let r = find(c, c[x]);
            c[x] = r;
        }
        c[x]
    }
    for &(a, b) in &edges {
        let (x, y) = (find(&mut comp, a.index()), find(&mut comp, b.index()));
        comp[x] = y;
    }
    let components = (0..elems.len()).filter(|&x| find(&mut comp, x) == x).count();
    (edges.len() + components - elems.len(), triangles == 0)
}

fn homology() -> Outcome {
    let c = Poset::circle();
    let (rank, no_triangles) = h1_rank_oracle(&c);
    ensure(no_triangles && rank == 1, "oracle disagrees with the expected circle")?;
    let h = h1_data(&c).map_err(|e| e.to_string())?;
    ensure(h.rank == rank && h.torsion.is_empty(), format!("rank {} torsion {:?}", h.rank, h.torsion))?;
    let g = winding(&c);
    let a1 = Path::identity(c.elem("a1").unwrap());
    match equal_paths(&c, &g, &a1, 4) {
        Verdict::Distinct(Certificate::Homology { left, right }) => {
            ensure(left.len() == 1 && left[0].abs() == BigInt::from(1), format!("class {left:?}"))?;
            ensure(right.iter().all(Zero::is_zero), format!("class {right:?}"))?;
        }
        v => return Err(format!("g vs i(a1): {v:?}")),
    }
    let v = equal_paths(&c, &g.compose(&c, &g.inverse()), &a1, 4);
    ensure(v.is_equal(), format!("g g⁻¹ vs i(a1): {v:?}"))?;
    Ok("rank 1, torsion-free, Distinct 1 vs 0, g g⁻¹ Equal".into())
}

// T_p computed from the definition e_q -> e_{p*q}; images outside the
// window are dropped.
fn t_oracle(w: &BasisWindow, p: &Path) -> WindowMatrix {
    let mut m = WindowMatrix::zero(w.len());
    for (j, q) in w.basis().iter().enumerate() {
        let r = p.compose(w.poset(), q);
        if let Some((end, start)) = r.endpoints() {
            let i = if w.is_directed() { Some(w.pair_index(end, start)) } else { w.index_of(&r).ok() };
            if let Some(i) = i {
                m.set(i, j, scalar(1, 0));
            }
        }
    }
    m
}

fn representation() -> Outcome {
    let d = Poset::diamond();
    let w = build_window(&d, WindowParams::Directed).map_err(|e| e.to_string())?;
    ensure(w.len() == 9, format!("window of {}", w.len()))?;
    let mats: Vec<WindowMatrix> = w.basis().iter().map(|p| t_oracle(&w, p)).collect();
    for (p, t) in w.basis().iter().zip(&mats) {
        let rep = represent(&w, p);
        ensure(rep.is_escape_free(), format!("{} escapes", p.render(&d)))?;
        ensure(WindowMatrix::from_injection(&rep) == *t, format!("T of {} differs from e_q -> e_(p*q)", p.render(&d)))?;
        ensure(&(t * &t.adjoint()) * t == *t, format!("T T* T != T for {}", p.render(&d)))?;
        let a = p.end().unwrap();
        let block: BTreeSet<usize> = d.elements().map(|x| w.pair_index(a, x)).collect();
        ensure(block.len() == 3 && w.block_end(a).len() == 3, "S_a block is not 3 elements")?;
        ensure(t * &t.adjoint() == WindowMatrix::identity_on(w.len(), block), format!("T T* for {}", p.render(&d)))?;
    }
    let mut pairs = 0;
    for (p, tp) in w.basis().iter().zip(&mats) {
        for (q, tq) in w.basis().iter().zip(&mats) {
            let pq = p.compose(&d, q);
            let prod = represent(&w, p).compose(&represent(&w, q));
            ensure(prod.is_escape_free(), "escape in a product")?;
            ensure(tp * tq == t_oracle(&w, &pq), format!("{} ; {}", p.render(&d), q.render(&d)))?;
            ensure(WindowMatrix::from_injection(&prod) == tp * tq, "composed injection differs")?;
            pairs += 1;
        }
    }
    ensure(pairs == 81, format!("{pairs} pairs"))?;
    Ok("9 partial isometries, 9 range projectors, 81 products, no escapes".into())
}

fn rank_one() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut posets: Vec<Poset> = vec![Poset::diamond(), Poset::chain(3)];
    posets.extend(posets_up_to_iso(4).into_iter().filter(Poset::is_upward_directed));
    let mut ranks = 0;
    let mut windows = Vec::new();
    for p in &posets {
        let w = build_window(p, WindowParams::Directed).map_err(|e| e.to_string())?;
        for q in w.basis() {
            for a in p.elements() {
                // paths from a ending where q starts: one per endpoint pair
                let oracle = w.block_start(a).iter().filter(|&&i| w.path(i).end() == q.start()).count();
                let r = restriction_rank(&w, q, a).map_err(|e| e.to_string())?;
                ensure(r == 1 && oracle == 1, format!("rank {r}, oracle {oracle}"))?;
                ranks += 1;
            }
        }
        windows.push(w);
    }
    for k in 0..100 {
        let w = &windows[k % windows.len()];
        let m = random_combination(w, &mut rng);
        block_decomposition_check(w, &m).map_err(|e| format!("combination {k}: {e}"))?;
    }
    Ok(format!("{} posets, {ranks} rank checks, 100 combinations", posets.len()))
}

fn orbit() -> Outcome {
    let c = Poset::circle();
    // winding <= 6 needs reduced length 24
    let w = build_window(&c, WindowParams::Reduced { max_len: 24, depth: 2 }).map_err(|e| e.to_string())?;
    let a1 = c.elem("a1").unwrap();
    let b1 = c.elem("b1").unwrap();
    let q = Path::identity(a1);
    let q2 = Path::up(&c, b1, a1).unwrap();
    let g = winding(&c);
    let terms: Vec<(Scalar, Path)> = vec![(scalar(1, 0), q.clone()), (scalar(2, 0), q2.clone())];
    let r = noncompactness_orbit_check(&w, &terms, &q, &g, 4).map_err(|e| e.to_string())?;
    ensure(r.holds() && r.nonzero, format!("{r:?}"))?;
    let five = BigRational::from_integer(5.into());
    ensure(r.squared_norms.iter().all(|s| *s == five.to_string()), format!("{:?}", r.squared_norms))?;
    let a = &t_oracle(&w, &q) + &t_oracle(&w, &q2).scale(&scalar(2, 0));
    let mut gn = Path::identity(a1);
    let mut seen = BTreeSet::new();
    for (n, &idx) in r.indices.iter().enumerate() {
        gn = gn.compose(&c, &g);
        let x = w.index_of(&q.compose(&c, &gn)).map_err(|e| e.to_string())?;
        ensure(x == idx && seen.insert(x), format!("index at n = {}", n + 1))?;
        let norm = a.column_norm_sq(x);
        ensure(norm == five, format!("‖A x_{}‖² = {norm}", n + 1))?;
        let direct: BigRational = [&q, &q2]
            .iter()
            .zip([scalar(1, 0), scalar(2, 0)])
            .map(|(t, k)| {
                ensure(!t.compose(&c, &gn).is_zero(), "vanishing image").map(|_| abs_sq(&k))
            })
            .sum::<Result<BigRational, String>>()?;
        ensure(direct == five, "images are not distinct basis vectors")?;
    }
    Ok(format!("window {}, indices {:?}, ‖A x_n‖² = 5", w.len(), r.indices))
}

fn net() -> Outcome {
    let ch = Poset::chain(3);
    let w = build_window(&ch, WindowParams::Directed).map_err(|e| e.to_string())?;
    let (e0, e1, e2) = (Elem(0), Elem(1), Elem(2));
    let block = w.block_start(e0).to_vec();
    let units: Vec<WindowMatrix> =
        block.iter().flat_map(|&i| block.iter().map(move |&j| (i, j))).map(|(i, j)| WindowMatrix::unit(w.len(), i, j)).collect();
    ensure(units.len() == 9, "S^0 block is not 3 elements")?;
    let r = cocycle_check(&w, e0, e1, e2, &units).map_err(|e| e.to_string())?;
    ensure(r.holds(), format!("{r:?}"))?;
    let g = |a, b, m: &WindowMatrix| gamma(&w, a, b, m).map_err(|e| e.to_string());
    for m in &units {
        ensure(g(e1, e2, &g(e0, e1, m)?)? == g(e0, e2, m)?, "cocycle on a unit")?;
        for n in &units {
            ensure(g(e0, e1, &(m * n))? == &g(e0, e1, m)? * &g(e0, e1, n)?, "γ is not multiplicative")?;
        }
        ensure(g(e0, e2, &m.adjoint())? == g(e0, e2, m)?.adjoint(), "γ does not preserve *")?;
        // γ_10 relocates the start of both indices from 0 to 1
        for (i, j, _) in g(e0, e1, m)?.entries() {
            ensure(w.path(i).start() == Some(e1) && w.path(j).start() == Some(e1), "γ_10 leaves S^1")?;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut windows = Vec::new();
    for (_, p) in test_posets() {
        let params = WindowParams::Reduced { max_len: 6, depth: 2 }.directed_if(&p);
        windows.push(build_window(&p, params).map_err(|e| e.to_string())?);
    }
    let mut pairs = 0;
    while pairs < 50 {
        let w = &windows[pairs % windows.len()];
        let p = w.poset();
        let x = w.basis().choose(&mut rng).unwrap();
        let starts: Vec<&Path> = w.basis().iter().filter(|y| y.end() == x.start()).collect();
        let y = *starts.choose(&mut rng).unwrap();
        let both = gamma_path(w, &x.compose(p, y)).map_err(|e| e.to_string())?;
        let split = gamma_path(w, x).and_then(|gx| gamma_path(w, y).and_then(|gy| gx.after(&gy)));
        let split = split.map_err(|e| e.to_string())?;
        ensure(both.agrees_on_units(w, &split), format!("γ fails on {} ; {}", x.render(p), y.render(p)))?;
        pairs += 1;
    }
    Ok(format!("cocycle on 9 units, *-laws on 81 products, {pairs} functoriality pairs"))
}

fn cuntz() -> Outcome {
    let start = Instant::now();
    let res = residue_scheme(2).map_err(|e| e.to_string())?;
    let w16 = CuntzWindow::nat(16).map_err(|e| e.to_string())?;
    let r = verify_cuntz(&w16, &res, 2).map_err(|e| e.to_string())?;
    ensure(r.relations.len() == 4, format!("{} relations", r.relations.len()))?;
    for v in &r.relations {
        ensure(v.holds, format!("{} fails", v.name))?;
        ensure(v.certified_region.a_max.is_some_and(|a| a >= 7), format!("{} certified only to {:?}", v.name, v.certified_region))?;
    }

    let dy = dyadic_infinite_scheme();
    let w32 = CuntzWindow::nat(32).map_err(|e| e.to_string())?;
    let r = verify_cuntz(&w32, &dy, 3).map_err(|e| e.to_string())?;
    for v in &r.relations {
        ensure(v.holds, format!("dyadic: {} fails", v.name))?;
    }
    // a lands in a block past the third iff a + 1 is divisible by 8
    let expected: BTreeSet<(u64, u64)> =
        (0..32).filter(|a| (a + 1) % 8 == 0).flat_map(|a| (0..32).map(move |b| (a, b))).collect();
    let got: BTreeSet<(u64, u64)> = r.defect_support.iter().map(|&i| w32.pair(i)).collect();
    ensure(got == expected, format!("defect support has {} entries, expected {}", got.len(), expected.len()))?;

    let samples = sample_pairs(&w16, 100, 9);
    let ideal = ideal_products_check(&w16, &res, 2, &samples).map_err(|e| e.to_string())?;
    ensure(ideal.holds(), format!("{:?}", ideal.failures))?;
    // the right product by T_φ2 on [3, 5] is the single unit [3, 2]
    let t2 = pathnet_core::cuntz::t_phi(&w16, &res, 2).map_err(|e| e.to_string())?;
    ensure(w16.unit(3, 5).compose(&t2).agrees_with(&w16.unit(3, 2)), "[3,5] T2 != [3,2]")?;
    Ok(format!("residue a <= 7, dyadic defect {} units, 100 ideal samples, {}", got.len(), timed(Duration::from_secs(10), start)?))
}

fn parser() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut posets: Vec<Poset> = test_posets().into_iter().map(|(_, p)| p).collect();
    posets.push(Poset::build(&["a", "b", "x", "y"], &[("a", "x"), ("b", "x"), ("x", "y")]).unwrap());
    let words: Vec<(usize, Vec<Simplex1>)> = posets
        .iter()
        .enumerate()
        .flat_map(|(k, p)| simplex_words(p, 3).into_iter().map(move |w| (k, w)))
        .collect();
    let mut checked = 0;
    while checked < 1000 {
        let (k, word) = &words[rng.gen_range(0..words.len())];
        let p = &posets[*k];
        let mut path = Path::from_simplices(p, word).map_err(|e| e.to_string())?;
        if rng.gen_bool(0.3) {
            path = path.inverse();
        }
        let text = path.render(p);
        let back = parse_path(&text, p).map_err(|e| format!("{text}: {e}"))?;
        ensure(back == path, format!("{text} reparsed differently"))?;
        checked += 1;
    }

    let ab = Poset::build(&["a", "b"], &[("a", "b")]).unwrap();
    let ex1 = parse_path("u(b,a) * d(a,b)", &ab).map_err(|e| e.to_string())?;
    ensure(ex1 == Path::identity(ab.elem("b").unwrap()), "u(b,a) * d(a,b) is not i(b)")?;
    ensure(parse_path("0", &ab).map_err(|e| e.to_string())?.is_zero(), "0 is not zero")?;
    let c = Poset::circle();
    let g = parse_path("[a1^b1 a2] * [a2^b2 a1]", &c).map_err(|e| e.to_string())?;
    let e = |n: &str| c.elem(n).unwrap();
    // written order: down from b1 to a1 last, up from a1 to b2 first
    let steps = [
        Path::down(&c, e("a1"), e("b1")).unwrap(),
        Path::up(&c, e("b1"), e("a2")).unwrap(),
        Path::down(&c, e("a2"), e("b2")).unwrap(),
        Path::up(&c, e("b2"), e("a1")).unwrap(),
    ];
    let expect = Path::product(&c, &steps);
    ensure(g == expect && g.len() == 4 && g.is_loop(), "winding loop expands wrongly")?;
    Ok(format!("{checked} round trips, 3 examples"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("axiom suite", axioms),
        ("inverse semigroup", inverse_semigroup),
        ("directed collapse", directed),
        ("homology certificate", homology),
        ("representation laws", representation),
        ("rank-one law", rank_one),
        ("orbit mechanism", orbit),
        ("net and cocycle", net),
        ("cuntz relations", cuntz),
        ("parser round trip", parser),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let result = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
