//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on failure.

use std::collections::{HashMap, HashSet};
use std::path::PathBuf;
use std::time::Instant;

use gm4::assembly::{
    euler_characteristic, first_homology, invariant_report, is_reduced, isomorphic_reduced, reduce,
    relabel, Comparison, GraphStructure, ReduceError,
};
use gm4::bundles::{fibration_unique, Pi1Element, SurfaceWithBoundary, TorusBundleOverCircle};
use gm4::gl2z::{conjugate_in, Ambient, ConjClass, Mat2};
use gm4::manifest;
use gm4::meyer::{manifold_signature, meyer_cocycle, psi};
use gm4::{BigInt, BigRational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn corpus() -> Vec<(String, GraphStructure)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let mut paths: Vec<_> = std::fs::read_dir(&dir)
        .expect("corpus directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "gm"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            let text = std::fs::read_to_string(&p).unwrap();
            let gs = manifest::load(&text).unwrap_or_else(|e| panic!("{name}: {e:?}"));
            (name, gs)
        })
        .collect()
}

/// Corpus structures that are reduced, either as written or after reduction.
fn reduced_corpus() -> Vec<(String, GraphStructure)> {
    corpus()
        .into_iter()
        .filter_map(|(n, gs)| reduce(&gs).ok().map(|r| (n, r)))
        .collect()
}

fn psi_calibration() -> Outcome {
    for n in -10..=10 {
        for m in [Mat2::unipotent(n), -Mat2::unipotent(n)] {
            let v = psi(&m).map_err(|e| e.to_string())?;
            check(v == int(n), || format!("Ψ({m}) = {v}, expected {n}"))?;
        }
    }
    for m in [Mat2::identity(), -Mat2::identity()] {
        let v = psi(&m).map_err(|e| e.to_string())?;
        check(v == int(0), || format!("Ψ({m}) = {v}"))?;
    }
    Ok("Ψ(±T^n) = n for n in [-10,10], Ψ(±I) = 0".into())
}

fn signature_vanishing() -> Outcome {
    let mut names = Vec::new();
    for (name, gs) in reduced_corpus() {
        if !gs.blocks.iter().all(|b| b.surface().orientable) {
            continue;
        }
        let s = manifold_signature(&gs).map_err(|e| format!("{name}: {e}"))?;
        check(s == int(0), || format!("{name}: σ = {s}"))?;
        names.push(name);
    }
    check(names.len() >= 5, || {
        format!("only {} structures", names.len())
    })?;
    Ok(format!(
        "σ = 0 on {} reduced orientable-base structures",
        names.len()
    ))
}

fn euler_vanishing() -> Outcome {
    let all = corpus();
    for (name, gs) in &all {
        let chi = euler_characteristic(gs);
        check(chi == 0, || format!("{name}: χ = {chi}"))?;
    }
    Ok(format!("χ = 0 on all {} corpus structures", all.len()))
}

fn random_sl2z(rng: &mut ChaCha8Rng, bound: i64) -> Mat2 {
    loop {
        let (a, b, c) = (
            rng.gen_range(-bound..=bound),
            rng.gen_range(-bound..=bound),
            rng.gen_range(-bound..=bound),
        );
        if a != 0 && (1 + b * c) % a == 0 {
            let d = (1 + b * c) / a;
            if d.abs() <= bound {
                return Mat2::new(a, b, c, d);
            }
        } else if a == 0 && b * c == -1 {
            let d = rng.gen_range(-bound..=bound);
            return Mat2::new(0, b, c, d);
        }
    }
}

fn cocycle_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let tau = |a: &Mat2, b: &Mat2| meyer_cocycle(a, b).expect("SL(2,Z) input");
    for _ in 0..1000 {
        let (a, b, c) = (
            random_sl2z(&mut rng, 10),
            random_sl2z(&mut rng, 10),
            random_sl2z(&mut rng, 10),
        );
        let lhs = tau(&a, &b) + tau(&a.compose(&b), &c);
        let rhs = tau(&a, &b.compose(&c)) + tau(&b, &c);
        check(lhs == rhs, || {
            format!("cocycle identity fails at {a}, {b}, {c}")
        })?;
        let psi_ab = psi(&a.compose(&b)).unwrap();
        let expected = psi(&a).unwrap() + psi(&b).unwrap() - int(3 * tau(&a, &b));
        check(psi_ab == expected, || {
            format!("Ψ coboundary fails at {a}, {b}")
        })?;
    }
    Ok("cocycle identity and Ψ(AB) = Ψ(A)+Ψ(B)−3τ(A,B) on 1000 random triples".into())
}

type M = [i64; 4];

fn mul(x: &M, y: &M) -> M {
    [
        x[0] * y[0] + x[1] * y[2],
        x[0] * y[1] + x[1] * y[3],
        x[2] * y[0] + x[3] * y[2],
        x[2] * y[1] + x[3] * y[3],
    ]
}

fn inv(x: &M) -> M {
    [x[3], -x[1], -x[2], x[0]]
}

fn conjugacy_oracle() -> Outcome {
    let start = Instant::now();
    let gens: [M; 3] = [[1, 1, 0, 1], [1, 0, 1, 1], [0, -1, 1, 0]];
    let mut words: HashSet<M> = HashSet::from([[1, 0, 0, 1]]);
    let mut frontier = vec![[1, 0, 0, 1]];
    for _ in 0..12 {
        let mut next = Vec::new();
        for p in &frontier {
            for g in &gens {
                let q = mul(p, g);
                if words.insert(q) {
                    next.push(q);
                }
            }
        }
        frontier = next;
    }
    let range = -3i64..=3;
    let mut boxed: Vec<M> = Vec::new();
    for a in range.clone() {
        for b in range.clone() {
            for c in range.clone() {
                for d in range.clone() {
                    if a * d - b * c == 1 {
                        boxed.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    let index: HashMap<M, usize> = boxed.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let n = boxed.len();
    let mut brute = vec![vec![false; n]; n];
    for (i, m) in boxed.iter().enumerate() {
        for p in &words {
            let c = mul(&mul(p, m), &inv(p));
            if let Some(&j) = index.get(&c) {
                brute[i][j] = true;
                brute[j][i] = true;
            }
        }
    }
    let to_mat = |m: &M| Mat2::new(m[0], m[1], m[2], m[3]);
    let mut conjugate_pairs = 0;
    for i in 0..n {
        let m1 = to_mat(&boxed[i]);
        for j in 0..n {
            let m2 = to_mat(&boxed[j]);
            let answer = conjugate_in(&m1, &m2, Ambient::Sl2z).map_err(|e| e.to_string())?;
            if let Some(c) = &answer {
                check(c.det() == BigInt::from(1), || {
                    format!("conjugator {c} not in SL(2,Z)")
                })?;
                check(c.compose(&m1) == m2.compose(c), || {
                    format!("conjugator {c} does not carry {m1} to {m2}")
                })?;
                conjugate_pairs += 1;
            }
            check(answer.is_some() == brute[i][j], || {
                format!(
                    "{m1} vs {m2}: conjugate_in says {}, brute force says {}",
                    answer.is_some(),
                    brute[i][j]
                )
            })?;
        }
    }
    Ok(format!(
        "{n} matrices, {} conjugate ordered pairs, {} words, {:.1}s",
        conjugate_pairs,
        words.len(),
        start.elapsed().as_secs_f64()
    ))
}

fn fibration_uniqueness() -> Outcome {
    let mut count = 0;
    for a in -5i64..=5 {
        for b in -5i64..=5 {
            for c in -5i64..=5 {
                for d in -5i64..=5 {
                    let det = a * d - b * c;
                    if det.abs() != 1 {
                        continue;
                    }
                    count += 1;
                    let phi = Mat2::new(a, b, c, d);
                    let degenerate = (a - 1) * (d - 1) - b * c == 0;
                    let unique = fibration_unique(&TorusBundleOverCircle::new(phi.clone()));
                    check(unique != degenerate, || {
                        format!("{phi}: fibration_unique = {unique}, det(φ−I) = 0 is {degenerate}")
                    })?;
                }
            }
        }
    }
    Ok(format!(
        "exhaustive over {count} unimodular matrices with entries in [-5,5]"
    ))
}

fn parabolicity() -> Outcome {
    let mut edges = 0;
    let reduced = reduced_corpus();
    for (name, gs) in &reduced {
        for e in &gs.edges {
            for phi in [&e.iso.source.phi, &e.iso.target.phi] {
                let class = gm4::gl2z::classify(phi).map_err(|e| e.to_string())?;
                check(matches!(class, ConjClass::Parabolic { .. }), || {
                    format!("{name}: decomposing class {class}")
                })?;
            }
            edges += 1;
        }
        let findings = invariant_report(gs).findings;
        check(findings.is_empty(), || format!("{name}: {findings:?}"))?;
    }
    Ok(format!(
        "{edges} decomposing manifolds in {} reduced structures",
        reduced.len()
    ))
}

fn group_axioms() -> Outcome {
    let ambients = [
        Mat2::identity(),
        -Mat2::identity(),
        Mat2::unipotent(1),
        Mat2::unipotent(-3),
        Mat2::s(),
        Mat2::s().compose(&Mat2::r()),
        Mat2::new(2, 1, 1, 1),
        Mat2::reflection(),
        Mat2::swap(),
        Mat2::new(5, 2, 2, 1).compose(&Mat2::reflection()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let element = |rng: &mut ChaCha8Rng| {
        Pi1Element::new(
            rng.gen_range(-50i64..=50),
            rng.gen_range(-50i64..=50),
            rng.gen_range(-6i64..=6),
        )
    };
    for phi in &ambients {
        let g = TorusBundleOverCircle::new(phi.clone());
        for _ in 0..1000 {
            let (a, b, c) = (element(&mut rng), element(&mut rng), element(&mut rng));
            check(
                g.mul(&g.mul(&a, &b), &c) == g.mul(&a, &g.mul(&b, &c)),
                || format!("associativity fails for φ = {phi} at {a}, {b}, {c}"),
            )?;
            let e = Pi1Element::identity();
            check(g.mul(&a, &e) == a && g.mul(&e, &a) == a, || {
                format!("identity fails at {a}")
            })?;
            check(
                g.mul(&a, &g.inverse(&a)) == e && g.mul(&g.inverse(&a), &a) == e,
                || format!("inverse fails for φ = {phi} at {a}"),
            )?;
        }
    }
    Ok(format!(
        "1000 triples for each of {} monodromies",
        ambients.len()
    ))
}

fn reduction() -> Outcome {
    let mut merged = 0;
    let mut closed = 0;
    for (name, gs) in corpus() {
        match reduce(&gs) {
            Ok(r) => {
                check(is_reduced(&r).0, || format!("{name}: output not reduced"))?;
                check(reduce(&r).as_ref() == Ok(&r), || {
                    format!("{name}: not idempotent")
                })?;
                check(
                    manifold_signature(&r).ok() == manifold_signature(&gs).ok(),
                    || format!("{name}: σ changed"),
                )?;
                check(
                    euler_characteristic(&r) == euler_characteristic(&gs),
                    || format!("{name}: χ changed"),
                )?;
                check(first_homology(&r) == first_homology(&gs), || {
                    format!("{name}: H₁ changed")
                })?;
                if r != gs {
                    merged += 1;
                }
            }
            Err(ReduceError::ClosedBase) => closed += 1,
            Err(e) => return Err(format!("{name}: {e}")),
        }
    }
    let (_, gs) = corpus()
        .into_iter()
        .find(|(n, _)| n == "two_pants_one_identity")
        .ok_or("two_pants_one_identity missing")?;
    let r = reduce(&gs).map_err(|e| e.to_string())?;
    check(r.blocks.len() == 1, || {
        format!("{} blocks after merging", r.blocks.len())
    })?;
    let surface = r.blocks[0].surface();
    check(*surface == SurfaceWithBoundary::orientable(0, 4), || {
        format!("merged base {surface}")
    })?;
    let chi = surface.euler_characteristic();
    check(chi == -2, || format!("merged base χ = {chi}"))?;
    Ok(format!(
        "{merged} structures merged, {closed} closed-base diagnostics; two pants → four-holed sphere, χ = {chi}"
    ))
}

fn comparison() -> Outcome {
    let reduced = reduced_corpus();
    let bounds = [0u32, 1, 2, 4];
    let mut yes = 0;
    let mut no = 0;
    for (name, gs) in &reduced {
        let copy = relabel(gs);
        for &b in &bounds[1..] {
            let answer = isomorphic_reduced(gs, &copy, b).map_err(|e| e.to_string())?;
            check(matches!(answer, Comparison::Yes(_)), || {
                format!("{name} vs relabeled copy at bound {b}: {answer:?}")
            })?;
        }
        yes += 1;
    }
    for (n1, g1) in &reduced {
        for (n2, g2) in &reduced {
            let separated = invariant_report(g1)
                .first_difference(&invariant_report(g2))
                .is_some();
            let answers: Vec<Comparison> = bounds
                .iter()
                .map(|&b| isomorphic_reduced(g1, g2, b).map_err(|e| e.to_string()))
                .collect::<Result<_, _>>()?;
            if separated {
                check(
                    answers.iter().all(|a| matches!(a, Comparison::No(_))),
                    || format!("{n1} vs {n2} separated by invariants but answered {answers:?}"),
                )?;
                no += 1;
            }
            let final_at = answers
                .iter()
                .position(|a| !matches!(a, Comparison::Inconclusive));
            if let Some(k) = final_at {
                let kind = std::mem::discriminant(&answers[k]);
                check(
                    answers[k..]
                        .iter()
                        .all(|a| std::mem::discriminant(a) == kind),
                    || format!("{n1} vs {n2}: answers change with the bound: {answers:?}"),
                )?;
            }
        }
    }
    Ok(format!(
        "{yes} relabeled copies matched, {no} separated ordered pairs answered No"
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("Ψ calibration", psi_calibration),
        ("signature vanishing", signature_vanishing),
        ("Euler characteristic", euler_vanishing),
        ("cocycle and quasimorphism suite", cocycle_suite),
        ("conjugacy oracle equivalence", conjugacy_oracle),
        ("fibration uniqueness", fibration_uniqueness),
        ("reduced-structure parabolicity", parabolicity),
        ("π₁ normal-form group axioms", group_axioms),
        ("reduction", reduction),
        ("comparison soundness", comparison),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", i + 1),
            Err(reason) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({reason})", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
