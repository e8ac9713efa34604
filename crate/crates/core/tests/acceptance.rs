//! One PASS/FAIL line per acceptance criterion; exits nonzero on any FAIL.

mod common;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use skewval::pp::{
    atomic_holds, decide_equiv_ake, decide_equiv_divisible, pp_satisfies, quotient_invariant,
    single_variable, theory_of_bigmodel, theory_of_truncated,
};
use skewval::scenarios::run_counterexample;
use skewval::series::{Axiom, Exp, FiniteTauChain};
use skewval::text::{format_descriptor, parse_chain, parse_descriptor};
use skewval::{
    Eta, MatrixOverR, PPFormula, SeriesModel, SkewPoly, SkewRing, Solver, TheoryDescriptor, Tower,
    Value, Verdict,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0000 + tag)
}

fn ring_laws() -> Outcome {
    let tw = Tower::new(2, 1, 24).map_err(e2s)?;
    let ring = SkewRing::new(&tw);
    let mut rng = rng(1);
    let mut n = 0;
    for m in [1, 2, 3] {
        for _ in 0..3400 {
            let a = random_poly(&ring, m, 8, &mut rng);
            let b = random_poly(&ring, m, 8, &mut rng);
            let c = random_poly(&ring, m, 8, &mut rng);
            let ab = ring.mul(&a, &b);
            ensure(ring.mul(&ab, &c) == ring.mul(&a, &ring.mul(&b, &c)), || {
                format!("associativity fails for {a:?}, {b:?}, {c:?}")
            })?;
            ensure(
                ring.mul(&a, &ring.add(&b, &c)) == ring.add(&ab, &ring.mul(&a, &c))
                    && ring.mul(&ring.add(&a, &b), &c) == ring.add(&ring.mul(&a, &c), &ring.mul(&b, &c)),
                || format!("distributivity fails for {a:?}, {b:?}, {c:?}"),
            )?;
            if !a.is_zero() && !b.is_zero() {
                ensure(ab.degree() == Some(a.degree().unwrap() + b.degree().unwrap()), || {
                    format!("degree of a product: {a:?} {b:?}")
                })?;
            }
            if !b.is_zero() {
                let (quot, rem) = ring.right_divmod(&a, &b).map_err(e2s)?;
                ensure(
                    ring.add(&ring.mul(&b, &quot), &rem) == a
                        && (rem.is_zero() || rem.degree() < b.degree()),
                    || format!("division round trip fails for {a:?} by {b:?}"),
                )?;
            }
            n += 1;
        }
    }
    Ok(format!("{n} triples over F_2, F_4, F_8"))
}

fn euclidean_structure() -> Outcome {
    let tw = Tower::new(2, 1, 24).map_err(e2s)?;
    let ring = SkewRing::new(&tw);
    let all: Vec<SkewPoly> = std::iter::once(ring.zero(1)).chain(monics_up_to(&ring, 1, 4)).collect();
    let nonzero: Vec<&SkewPoly> = all.iter().filter(|a| !a.is_zero()).collect();
    // left multiples a.x with deg x <= 4
    let mults: HashMap<&SkewPoly, HashSet<SkewPoly>> = nonzero
        .iter()
        .map(|&a| (a, all.iter().map(|x| ring.mul(a, x)).collect()))
        .collect();
    let divides = |d: &SkewPoly, a: &SkewPoly| mults[d].contains(a);
    let mut pairs = 0;
    for a in &all {
        for b in &all {
            if a.is_zero() && b.is_zero() {
                continue;
            }
            let common: Vec<&SkewPoly> = nonzero
                .iter()
                .copied()
                .filter(|d| divides(d, a) && divides(d, b))
                .collect();
            let top = common.iter().map(|d| d.degree().unwrap()).max().unwrap();
            let greatest: Vec<&&SkewPoly> = common.iter().filter(|d| d.degree() == Some(top)).collect();
            ensure(greatest.len() == 1, || format!("several greatest divisors for {a:?}, {b:?}"))?;
            let g = ring.rgcd(a, b).map_err(e2s)?;
            ensure(g == **greatest[0], || format!("rgcd({a:?}, {b:?}) = {g:?}"))?;
            ensure(common.iter().all(|d| divides(d, &g)), || {
                format!("a common divisor of {a:?}, {b:?} misses the rgcd")
            })?;
            pairs += 1;
            if a.is_zero() || b.is_zero() {
                continue;
            }
            // least monic common left multiple a.x = b.y, deg x <= deg b
            let bx: HashSet<SkewPoly> = all.iter().map(|y| ring.mul(b, y)).collect();
            let least = all
                .iter()
                .filter(|x| !x.is_zero() && x.degree() <= b.degree())
                .map(|x| ring.mul(a, x))
                .filter(|c| bx.contains(c))
                .min_by_key(|c| c.degree())
                .ok_or_else(|| format!("no common multiple for {a:?}, {b:?}"))?;
            let l = ring.lclm(a, b).map_err(e2s)?;
            let least = ring.make_monic(&least).map_err(e2s)?.0;
            ensure(l == least, || format!("lclm({a:?}, {b:?}) = {l:?}, expected {least:?}"))?;
        }
    }
    Ok(format!("{pairs} pairs of degree <= 4 over F_2"))
}

fn annihilator_laws() -> Outcome {
    let tw = Tower::new(2, 1, 24).map_err(e2s)?;
    let ring = SkewRing::new(&tw);
    let sm = SeriesModel::new(&tw, 8, 64);
    let solver = Solver::new(sm);
    let mut n = 0;
    let mut enumerated = 0;
    for (m, d) in [(1, 6), (2, 4)] {
        let k0 = tw.fixed_subfield_size(m);
        for q in monics_up_to(&ring, m, d) {
            let count = additive_root_count(&tw, &q);
            let fac = ring.factorize(&q, d).map_err(e2s)?;
            let t = ring.t(m);
            let product: u128 = std::iter::repeat_n(&t, fac.t_power)
                .chain(fac.factors.iter())
                .map(|f| additive_root_count(&tw, f))
                .product();
            ensure(count == product, || format!("{q:?}: {count} roots, factors give {product}"))?;
            ensure(solver.eta(&q) == Eta::Finite(count), || {
                format!("{q:?}: eta {} against {count} roots", solver.eta(&q))
            })?;
            let mut c = count;
            while c % k0 == 0 {
                c /= k0;
            }
            ensure(c == 1, || format!("{q:?}: {count} is not a power of {k0}"))?;
            if m == 1 && q.degree() <= Some(3) {
                ensure(split_roots(&tw, &ring, &q, count, 12).is_some(), || {
                    format!("{q:?}: enumeration never reaches {count} roots")
                })?;
                enumerated += 1;
            }
            n += 1;
        }
    }
    Ok(format!("{n} polynomials, {enumerated} also counted by enumeration"))
}

fn quotient_invariant_law() -> Outcome {
    let tw = Tower::new(2, 1, 24).map_err(e2s)?;
    let ring = SkewRing::new(&tw);
    let theory = theory_of_bigmodel(&ring, 1, 4).map_err(e2s)?;
    let polys = monics_up_to(&ring, 1, 4);
    let mut roots: BTreeMap<SkewPoly, Vec<skewval::FieldElem>> = BTreeMap::new();
    let mut roots_of = |q: &SkewPoly| -> Result<Vec<skewval::FieldElem>, String> {
        if let Some(r) = roots.get(q) {
            return Ok(r.clone());
        }
        let expected = additive_root_count(&tw, q);
        // t^4 + t + 1 and t^4 + t^3 + 1 split only over F_{2^15}
        let (_, r) = split_roots(&tw, &ring, q, expected, 15)
            .ok_or_else(|| format!("{q:?}: {expected} roots not reached by F_2^15"))?;
        roots.insert(q.clone(), r.clone());
        Ok(r)
    };
    let mut valid = 0;
    let mut pairs = 0;
    for q in &polys {
        let rq = roots_of(q)?;
        for s in &polys {
            pairs += 1;
            let rs = roots_of(s)?;
            let contained = rs.iter().all(|x| {
                ring.act_field(x, q).is_ok_and(|y| y.is_zero())
            });
            let entailed = theory.entails(&ring, s, q).map_err(e2s)?;
            ensure(contained == entailed, || {
                format!("containment of roots of {s:?} in {q:?}: enumeration {contained}, descriptor {entailed}")
            })?;
            if !contained {
                continue;
            }
            valid += 1;
            let r1 = quotient_invariant(&ring, q, s, &theory).map_err(e2s)?;
            let r1 = ring.make_monic(&r1).map_err(e2s)?.0;
            let rr = roots_of(&r1)?;
            ensure(rq.len() == rs.len() * rr.len(), || {
                format!("{q:?} / {s:?}: {} != {} * {} for r' = {r1:?}", rq.len(), rs.len(), rr.len())
            })?;
        }
    }
    Ok(format!("{valid} valid of {pairs} pairs, roots enumerated up to F_2^15"))
}

fn random_formula(ring: &SkewRing, rng: &mut ChaCha8Rng) -> PPFormula {
    let m = if rng.gen_bool(0.5) { 1 } else { 2 };
    let k = rng.gen_range(1..=3);
    let e = rng.gen_range(1..=3);
    let entry = |rng: &mut ChaCha8Rng| {
        if rng.gen_bool(0.3) {
            ring.zero(m)
        } else {
            random_poly(ring, m, 3, rng)
        }
    };
    let a = (0..k * e).map(|_| entry(rng)).collect();
    let b = (0..e).map(|_| entry(rng)).collect();
    PPFormula::new(
        ring,
        MatrixOverR::new(ring, m, k, e, a).unwrap(),
        MatrixOverR::new(ring, m, 1, e, b).unwrap(),
    )
    .unwrap()
}

fn pp_reduction() -> Outcome {
    let tw = Tower::new(2, 1, 24).map_err(e2s)?;
    let ring = SkewRing::new(&tw);
    let sm = SeriesModel::new(&tw, 8, 64);
    let solver = Solver::new(sm);
    let mut rng = rng(5);
    let mut points = 0;
    let mut satisfied = 0;
    let mut witnesses = 0;
    for f in 0..200 {
        let phi = random_formula(&ring, &mut rng);
        let r = single_variable(&ring, &phi).map_err(e2s)?;
        let m = phi.k_degree();
        let roots = if r.is_zero() {
            None
        } else {
            solver.ann_roots(&r).ok()
        };
        for _ in 0..50 {
            let x = match rng.gen_range(0..10) {
                0..=3 if roots.is_some() => {
                    let rs = &roots.as_ref().unwrap().roots;
                    sm.constant(rs[rng.gen_range(0..rs.len())].clone())
                }
                0..=4 => sm.constant(tw.random(m, &mut rng)),
                5..=7 => random_positive_series(&sm, m, &mut rng),
                _ => random_series(&sm, m, &mut rng),
            };
            let xs = [x];
            let expected = r.is_zero() || atomic_holds(&solver, &[r.clone()], &xs).map_err(e2s)?;
            let sat = pp_satisfies(&solver, &ring, &phi, &xs)
                .map_err(|e| format!("formula {f}: {e} at {}", xs[0]))?;
            ensure(sat.holds == expected, || {
                format!("formula {f} at {}: original {}, atomic {expected}", xs[0], sat.holds)
            })?;
            if let Some(y) = &sat.witness {
                for j in 0..phi.equations() {
                    let mut acc = sm.act(&xs[0], phi.b.get(0, j)).map_err(e2s)?;
                    for (i, yi) in y.iter().enumerate() {
                        acc = sm.sub(&acc, &sm.act(yi, phi.a.get(i, j)).map_err(e2s)?).map_err(e2s)?;
                    }
                    ensure(acc.is_zero_known(), || format!("formula {f}: witness fails equation {j}"))?;
                }
                witnesses += 1;
            }
            satisfied += sat.holds as usize;
            points += 1;
        }
    }
    ensure(satisfied > points / 10 && satisfied < points, || {
        format!("degenerate sample: {satisfied} of {points} satisfied")
    })?;
    Ok(format!("{points} points agree, {satisfied} satisfied, {witnesses} witnesses checked"))
}

fn henselianity() -> Outcome {
    let tw = Tower::new(2, 1, 24).map_err(e2s)?;
    let ring = SkewRing::new(&tw);
    let sm = SeriesModel::new(&tw, 8, 64);
    let solver = Solver::new(sm);
    let mut rng = rng(6);
    let n64 = Value::int(64);
    let mut done = 0;
    while done < 200 {
        let m = rng.gen_range(1..=2);
        let r = random_nonzero_poly(&ring, m, 4, &mut rng);
        if !r.is_separable() {
            continue;
        }
        let y = random_positive_series(&sm, m, &mut rng);
        let x = solver.hensel_lift(&r, &y).map_err(e2s)?;
        let residual = sm.sub(&sm.act(&x, &r).map_err(e2s)?, &y).map_err(e2s)?;
        ensure(residual.valuation_bound() >= n64, || {
            format!("residual {} for r = {r:?}, y = {y}", residual.valuation_bound())
        })?;
        ensure(x.valuation().map_err(e2s)? == y.valuation().map_err(e2s)?, || {
            format!("v(x) != v(y) for r = {r:?}, y = {y}")
        })?;
        done += 1;
    }
    let r = ring.add(&ring.t(1), &ring.one(1));
    let x = solver.hensel_lift(&r, &sm.u()).map_err(e2s)?;
    let expected: Vec<(Exp, skewval::FieldElem)> =
        (0..6).map(|k| (Exp::from_integer(1 << k), tw.one(1))).collect();
    ensure(x.terms() == expected.as_slice() && x.precision() == n64, || {
        format!("closed form: got {x}")
    })?;
    Ok(format!("{done} lifts; u + u^2 + ... + u^32 + O(u^64) reproduced"))
}

fn valuation_laws() -> Outcome {
    let tw = Tower::new(2, 1, 24).map_err(e2s)?;
    let ring = SkewRing::new(&tw);
    let sm = SeriesModel::new(&tw, 8, 64);
    let q = sm.q();
    let mut rng = rng(7);
    let mut strict = 0;
    let mut cases = [0; 3];
    for _ in 0..1000 {
        let m = rng.gen_range(1..=2);
        let mut x = random_series(&sm, m, &mut rng);
        if rng.gen_bool(0.25) {
            x = sm.add(&x, &sm.constant(tw.random_nonzero(m, &mut rng))).map_err(e2s)?;
        }
        let r = random_nonzero_poly(&ring, m, 4, &mut rng);
        let v = x.valuation().map_err(e2s)?;
        let Value::Finite(g) = v else { continue };
        let xr = sm.act(&x, &r).map_err(e2s)?;
        let lows: Vec<Value> = r
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(i, _)| v.tau_pow(q, i as u32))
            .collect();
        let low = *lows.iter().min().unwrap();
        let got = xr.valuation_bound();
        if g > Exp::from_integer(0) {
            cases[0] += 1;
            let want = v.tau_pow(q, r.t_adic_order().unwrap() as u32);
            ensure(got == want && want == low, || format!("v({x} . {r:?}) = {got}, expected {want}"))?;
        } else if g < Exp::from_integer(0) {
            cases[1] += 1;
            let want = v.tau_pow(q, r.degree().unwrap() as u32);
            ensure(got == want && want == low, || format!("v({x} . {r:?}) = {got}, expected {want}"))?;
        } else {
            cases[2] += 1;
            ensure(got >= low, || format!("v({x} . {r:?}) = {got} below {low}"))?;
            strict += (got > low) as usize;
        }
    }
    ensure(strict > 0, || "no strict case at valuation 0".into())?;
    for _ in 0..1000 {
        let m = rng.gen_range(1..=2);
        let mut x = random_series(&sm, m, &mut rng);
        if rng.gen_bool(0.5) {
            x = sm.add(&x, &sm.constant(tw.random(m, &mut rng))).map_err(e2s)?;
        }
        let d = sm.decompose(&x);
        let parts = [&d.torsion, &d.theta, &d.positive, &d.negative];
        let mut sum = sm.zero();
        for p in parts {
            sum = sm.add(&sum, p).map_err(e2s)?;
        }
        ensure(sum == x, || format!("components of {x} do not sum back"))?;
        let min = parts
            .iter()
            .map(|p| p.valuation().map_err(e2s))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .min()
            .unwrap();
        ensure(x.valuation().map_err(e2s)? == min, || format!("v({x}) is not the least component valuation"))?;
    }
    Ok(format!(
        "{} positive, {} negative, {} at 0 ({strict} strict); 1000 decompositions",
        cases[0], cases[1], cases[2]
    ))
}

fn certificate() -> Outcome {
    let mut lines = Vec::new();
    for p in [2, 3] {
        let tw = Tower::new(p, 1, 24).map_err(e2s)?;
        let solver = Solver::new(SeriesModel::new(&tw, 8, 64));
        let cert = run_counterexample(&solver).map_err(e2s)?;
        ensure(cert.checks.len() == 6, || format!("p = {p}: {} checks", cert.checks.len()))?;
        for line in cert.lines() {
            ensure(!line.contains(": FAIL:"), || format!("p = {p}: {line}"))?;
        }
        lines.push(format!("p = {p}: 6/6"));
    }
    Ok(lines.join(", "))
}

fn chain_axioms() -> Outcome {
    let mut vals: Vec<Value> = (-6..=6).map(Value::int).collect();
    vals.extend([Value::Finite(Exp::new(1, 2)), Value::Finite(Exp::new(-3, 4)), Value::Infinity]);
    for n in 2..=4 {
        let c = FiniteTauChain::window(&vals, n);
        let v = c.check();
        ensure(v.is_empty(), || format!("window with tau = {n}x: {}", v[0]))?;
    }
    let cases = [
        ("0>0 inf>inf 5", Axiom::Order),
        ("1>3 2>2 3 inf>inf", Axiom::Monotone),
        ("0>0 1 inf>1", Axiom::Monotone),
        ("-1>-1 0>0 1>2 2 inf>inf", Axiom::Contracting),
        ("0>0 1>1 inf>inf", Axiom::Dual),
    ];
    for (src, axiom) in cases {
        let c = parse_chain(src).map_err(e2s)?;
        let found: BTreeSet<Axiom> = c.check().iter().map(|v| v.axiom).collect();
        ensure(found.contains(&axiom), || format!("'{src}' not flagged with {axiom}: {found:?}"))?;
    }
    let window = FiniteTauChain::window(&vals, 1);
    ensure(!window.check().is_empty(), || "identity window passes".into())?;
    Ok(format!("windows tau = 2x, 3x, 4x pass; {} violating chains flagged", cases.len()))
}

fn deciders() -> Outcome {
    let tw = Tower::new(2, 1, 24).map_err(e2s)?;
    let ring = SkewRing::new(&tw);
    let solver = Solver::new(SeriesModel::new(&tw, 8, 64));
    let big = theory_of_bigmodel(&ring, 1, 3).map_err(e2s)?;
    let mut family: Vec<TheoryDescriptor> = vec![big.clone()];
    family.push(parse_descriptor(&tw, &format_descriptor(&big)).map_err(e2s)?);
    for b in 1..=4 {
        family.push(theory_of_truncated(&solver, &ring, 1, 3, b).map_err(e2s)?);
    }
    let mut untagged = big.clone();
    untagged.valueset_tag = Some("Q:tau=x2".into());
    family.push(untagged);
    let mut unrealized = big.clone();
    unrealized.theta_realized = Some(false);
    family.push(unrealized);
    let key = big.table.keys().nth(2).unwrap().clone();
    let mut planted = big.clone();
    planted.table.insert(key.clone(), Eta::Finite(1));
    family.push(planted.clone());

    type Decider = fn(&TheoryDescriptor, &TheoryDescriptor) -> skewval::Result<Verdict>;
    let deciders: [(&str, Decider); 2] = [("divisible", decide_equiv_divisible), ("ake", decide_equiv_ake)];
    let mut summary = Vec::new();
    for (name, decide) in deciders {
        let n = family.len();
        let mut eq = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                eq[i][j] = decide(&family[i], &family[j]).map_err(e2s)?.is_equivalent();
            }
        }
        for i in 0..n {
            ensure(eq[i][i], || format!("{name}: member {i} not equivalent to itself"))?;
            for j in 0..n {
                ensure(eq[i][j] == eq[j][i], || format!("{name}: asymmetric on {i}, {j}"))?;
                for k in 0..n {
                    ensure(!(eq[i][j] && eq[j][k]) || eq[i][k], || {
                        format!("{name}: not transitive on {i}, {j}, {k}")
                    })?;
                }
            }
        }
        let v = decide(&big, &planted).map_err(e2s)?;
        let hit = matches!(&v, Verdict::TableDiffers { key: k, .. } if *k == key);
        ensure(hit, || format!("{name}: planted disagreement reported as {v}"))?;
        let classes = (0..n).filter(|&i| (0..i).all(|j| !eq[i][j])).count();
        summary.push(format!("{name} {classes} classes"));
    }
    Ok(format!("{} descriptors; {}; planted key found", family.len(), summary.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Option<u64>); 10] = [
        ("ring laws", ring_laws, Some(10)),
        ("euclidean structure", euclidean_structure, Some(30)),
        ("annihilator laws", annihilator_laws, None),
        ("quotient invariant", quotient_invariant_law, None),
        ("p.p. reduction", pp_reduction, Some(60)),
        ("henselianity", henselianity, Some(30)),
        ("valuation laws", valuation_laws, None),
        ("counterexample certificate", certificate, Some(5)),
        ("tau-chain axioms", chain_axioms, None),
        ("deciders", deciders, None),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(msg), Some(s)) if took > Duration::from_secs(*s) => {
                Err(format!("{msg}; over the {s} s limit"))
            }
            (o, _) => o,
        };
        let (status, detail) = match outcome {
            Ok(msg) => ("PASS", msg),
            Err(msg) => {
                failed += 1;
                ("FAIL", msg)
            }
        };
        println!("criterion {}: {status}: {name}: {detail} ({:.2?})", i + 1, took);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
