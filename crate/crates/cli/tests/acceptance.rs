//! Acceptance suite: one pass/fail line per criterion.
//!
//! Run with `cargo test -p treeshift-cli --test acceptance -- --nocapture`
//! to see the report.

use std::collections::BTreeMap;
use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use treeshift::certificate::label_param;
use treeshift::construct::{build_perturbed, build_square_trivial_rooted};
use treeshift::diagnose::{
    adjoint_mismatch_quantity, adjoint_witness_search, consistency_check, hyponormality_test,
    phi_unboundedness_witness, square_domain_test, tree_admissibility, Admissibility,
};
use treeshift::{
    Certificate, CertificateKind, ChildSchedule, ComplexQ, ConstructionSpec, CustomFamily, Exact,
    FiniteVector, ProbeWindow, VertexAddr, WeightFamily,
};

type Outcome = Result<String, String>;

const MILLION: i64 = 1_000_000;

fn q(s: &str) -> Exact {
    s.parse().unwrap()
}

fn br(x: &Exact) -> BigRational {
    x.to_big_rational()
}

fn family(spec: &str) -> Box<dyn WeightFamily> {
    spec.parse::<ConstructionSpec>().unwrap().build().unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn pow2(k: u64) -> BigRational {
    BigRational::from_integer(BigInt::one() << k)
}

/// `ζ_u² λ_u² = 1` with `ζ_u²` read back as explicit child weights plus the
/// certificate's tail, independently of the certificate's own arithmetic.
fn reciprocal_oracle(f: &dyn WeightFamily, u: &VertexAddr, cert: &Certificate) -> bool {
    let m = cert
        .transcript
        .iter()
        .find_map(|l| label_param(&l.label, "m").filter(|_| l.label.starts_with("tail")));
    let Some(m) = m else { return false };
    let tail = br(cert.line(&format!("tail m={m}")).unwrap().1);
    let head: BigRational = (1..=m).map(|j| br(&f.lambda_sq(&u.child(j)))).sum();
    (head + tail) * br(&f.lambda_sq(u)) == BigRational::one()
}

fn criterion_1(certs: &mut Vec<Certificate>) -> Outcome {
    let start = Instant::now();
    let window = ProbeWindow::new(6, 64);
    let mut checked = 0;
    for spec in [
        "mode=sqtrivial;rooted=1;theta=1/1",
        "mode=sqtrivial;rooted=1;theta=3/7",
        "mode=sqtrivial;rooted=0",
    ] {
        let f = family(spec);
        for u in window.vertices(f.tree()) {
            let c = consistency_check(f.as_ref(), &u, 8).map_err(|e| e.to_string())?;
            ensure(c.verdict && c.line("total").unwrap().1 == &Exact::one(), || {
                format!("{spec}: identity fails at {u}")
            })?;
            ensure(reciprocal_oracle(f.as_ref(), &u, &c), || {
                format!("{spec}: oracle disagrees at {u}")
            })?;
            certs.push(c);
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("{checked} vertices, {elapsed:.2?}"))
}

/// Every `e_u` with `u` of depth <= 4 diverges, and `e_root` reaches 10⁶.
/// With `excess = 0` the partial sums equal `m` exactly; otherwise the root
/// series is `m + excess`.
fn square_trivial_checks(
    f: &dyn WeightFamily,
    excess: i64,
    certs: &mut Vec<Certificate>,
) -> Result<(usize, Duration), String> {
    let mut n = 0;
    let base = ProbeWindow::new(4, 6).bases(f.tree())[0].clone();
    for u in ProbeWindow::new(4, 6).vertices(f.tree()) {
        if u.depth() > 4 {
            continue;
        }
        let c = square_domain_test(f, &FiniteVector::basis(u.clone()), &Exact::from_integer(300), 10_000);
        ensure(c.kind == CertificateKind::Divergence && c.verdict, || {
            format!("{}: e_{u} did not diverge", f.spec())
        })?;
        if excess == 0 {
            for l in c.transcript.iter().filter(|l| l.label.starts_with("partial")) {
                let m = label_param(&l.label, "m").unwrap();
                ensure(l.value == Exact::from_integer(m), || {
                    format!("e_{u}: {} = {}", l.label, l.value)
                })?;
            }
        }
        certs.push(c);
        n += 1;
    }
    let start = Instant::now();
    let c = square_domain_test(
        f,
        &FiniteVector::basis(base.clone()),
        &Exact::from_integer(MILLION),
        1 << 24,
    );
    let elapsed = start.elapsed();
    let last = c.transcript.last().unwrap();
    let m = label_param(&last.label, "m").ok_or("no partial line")?;
    ensure(c.verdict && last.value >= Exact::from_integer(MILLION), || {
        format!("e_{base}: final line {} = {}", last.label, last.value)
    })?;
    ensure(last.value == Exact::from_integer(m as i64 + excess), || {
        format!("e_{base}: {} = {}", last.label, last.value)
    })?;
    ensure(elapsed < Duration::from_secs(10), || format!("e_{base} took {elapsed:?}"))?;
    certs.push(c);
    Ok((n, elapsed))
}

fn criterion_2(certs: &mut Vec<Certificate>) -> Outcome {
    let mut notes = Vec::new();
    for spec in ["mode=sqtrivial;rooted=1;theta=1/1", "mode=sqtrivial;rooted=0"] {
        let f = family(spec);
        let (n, t) = square_trivial_checks(f.as_ref(), 0, certs)?;
        notes.push(format!("{n} basis vectors + 10^6 terms in {t:.2?}"));
    }
    Ok(notes.join("; "))
}

/// `Σ_j r_j²` for the schedule at `r`, as a long explicit sum plus the exact
/// geometric remainder.
fn quartic_oracle(r: &BigRational) -> BigRational {
    let mut n = 2u64;
    while r * r * BigRational::from_integer(n.into()) < BigRational::one() {
        n += 1;
    }
    let level = (r * BigRational::from_integer(n.into())).recip();
    let mut sum = BigRational::zero();
    let last_index = n + 60;
    for j in 1..=last_index {
        let rj = if j < n { level.clone() } else { &level / pow2(j - n + 1) };
        sum += &rj * &rj;
    }
    // remaining squares form a geometric series with ratio 1/4
    let last = &level / pow2(last_index - n + 1);
    sum + &last * &last / BigRational::from_integer(3.into())
}

fn criterion_3(certs: &mut Vec<Certificate>) -> Outcome {
    let window = ProbeWindow::new(6, 64);
    let (mut checked, mut oracled) = (0, 0);
    for spec in [
        "mode=hypo;rooted=1;theta=1/2",
        "mode=hypo;rooted=1;theta=1/3",
        "mode=hypo;rooted=0",
    ] {
        let f = family(spec);
        for u in window.vertices(f.tree()) {
            let c = hyponormality_test(f.as_ref(), &u, 8).map_err(|e| e.to_string())?;
            let total = c.line("total").unwrap().1.clone();
            ensure(c.verdict && total <= Exact::one(), || format!("{spec}: {u} has {total}"))?;
            let r = br(&f.lambda_sq(&u));
            // the oracle counts up to n = ceil(1/r²), so keep r away from 0
            if !u.is_spine() && &r * &r * BigRational::from_integer(400.into()) >= BigRational::one() {
                let oracle = quartic_oracle(&r);
                ensure(br(&total) == oracle, || format!("{spec}: {u} oracle {oracle} vs {total}"))?;
                oracled += 1;
            }
            if u.is_spine() && u.spine_offset() >= Some(1) {
                ensure(total == Exact::one(), || format!("{spec}: spine {u} has {total}"))?;
            }
            certs.push(c);
            checked += 1;
        }
    }
    let root = hyponormality_test(family("mode=hypo;rooted=1;theta=1/2").as_ref(), &VertexAddr::root(), 8)
        .map_err(|e| e.to_string())?;
    let value = root.line("total").unwrap().1.clone();
    ensure(value == q("5/6"), || format!("root value {value}"))?;
    ensure(br(&value) == quartic_oracle(&br(&q("1/2"))), || "root oracle".into())?;
    Ok(format!("{checked} vertices ({oracled} against oracle); root(1/2) = {value}; rootless spine = 1"))
}

fn criterion_4() -> Outcome {
    let window = ProbeWindow::new(6, 64);
    let mut checked = 0;
    for spec in [
        "mode=hypo;rooted=1;theta=1/2",
        "mode=hypo;rooted=1;theta=1/3",
        "mode=hypo;rooted=0",
    ] {
        let f = family(spec);
        for v in window.vertices(f.tree()) {
            let w = f.lambda_sq(&v);
            ensure(w.is_positive() && w < Exact::one(), || format!("{spec}: λ²({v}) = {w}"))?;
            for t in f.child_terms(&v, 1, 8) {
                ensure(t.lambda_sq.is_positive() && t.lambda_sq < Exact::one(), || {
                    format!("{spec}: λ²({}) = {}", t.addr, t.lambda_sq)
                })?;
                checked += 1;
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} weights in (0,1)"))
}

fn criterion_5(certs: &mut Vec<Certificate>) -> Outcome {
    let u0 = VertexAddr::root();
    let f = CustomFamily::new(ChildSchedule::Geometric(Exact::one()))
        .with_schedule(u0.clone(), ChildSchedule::Explicit(vec![Exact::one(), Exact::one()]));
    let Admissibility::Inadmissible { witness, degree, certificate } =
        tree_admissibility(&f, &ProbeWindow::new(3, 8), Some(&f))
    else {
        return Err("tree reported admissible".into());
    };
    ensure(witness == u0 && degree == 2, || format!("witness {witness} with degree {degree}"))?;
    let c = *certificate.ok_or("no membership certificate")?;
    ensure(c.kind == CertificateKind::FiniteMembership, || format!("{:?}", c.kind))?;
    let total = c.line("total").unwrap().1.clone();

    // brute force: 1 + ζ_{u0}² + Σ_{v ∈ {a,b}} ζ_v² λ_v², with ζ_v² summed
    // over 200 children and closed by the exact remainder 2^-200
    let mut zeta_u0 = BigRational::zero();
    let mut inner = BigRational::zero();
    for j in 1..=2u64 {
        let v = u0.child(j);
        let lam = br(&f.lambda_sq(&v));
        let mut zeta_v: BigRational = (1..=200u64).map(|k| br(&f.lambda_sq(&v.child(k)))).sum();
        zeta_v += pow2(200).recip();
        inner += zeta_v * &lam;
        zeta_u0 += lam;
    }
    let oracle = BigRational::one() + zeta_u0 + inner;
    ensure(br(&total) == oracle, || format!("certificate {total}, oracle {oracle}"))?;
    ensure(total == Exact::from_integer(5), || format!("total {total}"))?;
    certs.push(c);
    Ok(format!("witness {witness}, total {total}"))
}

fn criterion_6(certs: &mut Vec<Certificate>) -> Outcome {
    let f = family("mode=nonhypo;rooted=1;theta=1/1");
    let mut values = Vec::new();
    for j in 1..=12u64 {
        let v = VertexAddr::root().child(j);
        let w = v.child(1);
        let lam = br(&f.lambda_sq(&w));
        // single term λ⁴/(1+λ²) under ζ_w² = 1/λ_w²
        let oracle = &lam * &lam / (BigRational::one() + &lam);
        let value = adjoint_mismatch_quantity(f.as_ref(), &v, 1);
        ensure(br(&value) == oracle, || format!("j={j}: {value} vs oracle {oracle}"))?;
        values.push(value);
    }
    ensure(values.windows(2).all(|p| p[0] < p[1]), || "values not strictly increasing".into())?;
    let first_big = values.iter().position(|x| *x > Exact::from_integer(1000));
    let j = first_big.ok_or("no value above 10^3 within j <= 12")? + 1;
    let cands: Vec<_> = (1..=12).map(|j| VertexAddr::root().child(j)).collect();
    let c = adjoint_witness_search(f.as_ref(), &cands, 1, &Exact::from_integer(1000));
    ensure(c.verdict, || "witness search failed".into())?;
    certs.push(c);

    let window = ProbeWindow::new(6, 64);
    for spec in ["mode=nonhypo;rooted=1;theta=1/1", "mode=nonhypo;rooted=0"] {
        let g = family(spec);
        for u in window.vertices(g.tree()) {
            let c = consistency_check(g.as_ref(), &u, 8).map_err(|e| e.to_string())?;
            ensure(c.verdict && reciprocal_oracle(g.as_ref(), &u, &c), || {
                format!("{spec}: identity fails at {u}")
            })?;
            certs.push(c);
        }
    }
    let (n, t) = square_trivial_checks(f.as_ref(), 0, certs)?;
    Ok(format!(
        "first term > 10^3 at j={j} ({}); identity holds; {n} divergences + 10^6 in {t:.2?}",
        values[j - 1]
    ))
}

fn criterion_7(certs: &mut Vec<Certificate>) -> Outcome {
    let base = build_square_trivial_rooted(&Exact::one()).unwrap();
    let v0: VertexAddr = "1".parse().unwrap();
    let f = build_perturbed(Box::new(base), v0.clone()).map_err(|e| e.to_string())?;
    let c = hyponormality_test(&f, &VertexAddr::root(), 8).map_err(|e| e.to_string())?;
    let term = c.line("term j=1").ok_or("no v0 term")?.1.clone();
    ensure(term == q("3/2"), || format!("v0 term {term}"))?;
    // 3/2 from v0 plus Σ_{j>=2} 4^-j = 1/12
    let total = c.line("total").unwrap().1.clone();
    ensure(total == q("19/12") && !c.verdict, || format!("total {total}, verdict {}", c.verdict))?;
    certs.push(c);
    // the child v0 contributes ζ²·λ̃² = 2·3 instead of 1
    let (n, t) = square_trivial_checks(&f, 5, certs)?;
    Ok(format!("v0 term {term}, total {total} > 1; {n} divergences + 10^6 in {t:.2?}"))
}

fn criterion_8(certs: &mut Vec<Certificate>) -> Outcome {
    let f = family("mode=sqtrivial;rooted=1;theta=1/1");
    let c = phi_unboundedness_witness(f.as_ref(), &VertexAddr::root(), &Exact::from_integer(1000), 4096)
        .map_err(|e| e.to_string())?;
    let last = c.transcript.last().unwrap().clone();
    ensure(c.verdict && last.label == "witness j=10" && last.value == Exact::from_integer(1024), || {
        format!("{} = {}", last.label, last.value)
    })?;
    certs.push(c);
    Ok(format!("{} with zeta^2 = {}", last.label, last.value))
}

/// Random finite rooted tree as parent links with squared weights.
fn random_tree(rng: &mut ChaCha8Rng) -> (Vec<Option<usize>>, Vec<BigRational>, Vec<Vec<u64>>) {
    let n = rng.gen_range(1..=30);
    let mut parent = vec![None];
    let mut weight = vec![BigRational::one()];
    let mut paths = vec![Vec::new()];
    let mut kids = vec![0u64; n];
    for i in 1..n {
        let p = rng.gen_range(0..i);
        kids[p] += 1;
        let mut path: Vec<u64> = paths[p].clone();
        path.push(kids[p]);
        parent.push(Some(p));
        weight.push(BigRational::new(rng.gen_range(1..50).into(), rng.gen_range(1..50).into()));
        paths.push(path);
    }
    (parent, weight, paths)
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7ee5_41f7);
    let mut sizes = 0;
    for trial in 0..100 {
        let (parent, weight, paths) = random_tree(&mut rng);
        let addr = |i: usize| VertexAddr::rooted(paths[i].clone()).unwrap();
        let mut schedules: BTreeMap<usize, Vec<Exact>> = BTreeMap::new();
        for (i, p) in parent.iter().enumerate() {
            if let Some(p) = p {
                schedules.entry(*p).or_default().push(Exact::from_big_rational(&weight[i]));
            }
        }
        let mut fam = CustomFamily::new(ChildSchedule::leaf());
        for (p, ws) in schedules {
            fam.set_schedule(addr(p), ChildSchedule::Explicit(ws));
        }
        let mut f = FiniteVector::zero();
        let mut coeff = vec![BigRational::zero(); parent.len()];
        for _ in 0..rng.gen_range(0..=parent.len().min(8)) {
            let i = rng.gen_range(0..parent.len());
            let re = BigRational::new(rng.gen_range(-9..10).into(), rng.gen_range(1..10).into());
            let im = BigRational::new(rng.gen_range(-9..10).into(), rng.gen_range(1..10).into());
            coeff[i] = &re * &re + &im * &im;
            f.set(addr(i), ComplexQ::new(Exact::from_big_rational(&re), Exact::from_big_rational(&im)));
        }
        // ‖f‖² + ‖Sf‖² + ‖S²f‖², vertex by vertex
        let mut oracle = BigRational::zero();
        for i in 0..parent.len() {
            oracle += &coeff[i];
            if let Some(p) = parent[i] {
                oracle += &weight[i] * &coeff[p];
                if let Some(g) = parent[p] {
                    oracle += &weight[i] * &weight[p] * &coeff[g];
                }
            }
        }
        let c = square_domain_test(&fam, &f, &Exact::from_integer(MILLION), 1000);
        ensure(c.kind == CertificateKind::FiniteMembership, || format!("trial {trial}: {:?}", c.kind))?;
        c.check().map_err(|e| format!("trial {trial}: {e}"))?;
        let total = br(c.line("total").unwrap().1);
        ensure(total == oracle, || format!("trial {trial}: {total} vs {oracle}"))?;
        sizes += parent.len();
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!("100 trees ({sizes} vertices), {elapsed:.2?}"))
}

fn criterion_10(certs: &[Certificate]) -> Outcome {
    let bin = env!("CARGO_BIN_EXE_treeshift");
    for spec in [
        "mode=sqtrivial;rooted=1;theta=3/7",
        "mode=hypo;rooted=0",
        "mode=nonhypo;rooted=1;theta=1/1",
        "mode=perturb;rooted=1;theta=1/1;v0=1",
    ] {
        let run = || Command::new(bin).args(["construct", spec]).output().unwrap();
        let (a, b) = (run(), run());
        ensure(a.status.success() && !a.stdout.is_empty(), || format!("{spec}: construct failed"))?;
        ensure(a.stdout == b.stdout, || format!("{spec}: dumps differ"))?;
    }
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (i, chunk) in certs.chunks(2000).enumerate() {
        let p = dir.path().join(format!("certs-{i}.json"));
        fs::write(&p, serde_json::to_string(chunk).unwrap()).unwrap();
        files.push(p);
    }
    let out = Command::new(bin).arg("report").args(&files).output().unwrap();
    let stderr = String::from_utf8_lossy(&out.stderr);
    ensure(out.status.code() == Some(0), || format!("report failed: {stderr}"))?;
    let rows = String::from_utf8_lossy(&out.stdout).lines().count() - 1;
    ensure(rows == certs.len(), || format!("{rows} rows for {} certificates", certs.len()))?;
    Ok(format!("identical dumps; {rows} certificates replayed"))
}

fn report(name: &str, r: Outcome) -> bool {
    match r {
        Ok(detail) => {
            println!("criterion {name}: PASS ({detail})");
            true
        }
        Err(why) => {
            println!("criterion {name}: FAIL ({why})");
            false
        }
    }
}

#[test]
fn acceptance() {
    let mut certs = Vec::new();
    let results = [
        report("1 consistency identity (sqtrivial)", criterion_1(&mut certs)),
        report("2 square-trivial divergence", criterion_2(&mut certs)),
        report("3 hyponormality criterion", criterion_3(&mut certs)),
        report("4 hypo range constraint", criterion_4()),
        report("5 finite-degree converse", criterion_5(&mut certs)),
        report("6 non-hyponormal growth", criterion_6(&mut certs)),
        report("7 perturbation", criterion_7(&mut certs)),
        report("8 phi unboundedness", criterion_8(&mut certs)),
        report("9 finite-tree oracle equivalence", criterion_9()),
        report("10 determinism and replay", criterion_10(&certs)),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
