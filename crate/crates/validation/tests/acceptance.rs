//! Acceptance criteria 1–8. Each criterion prints one `ACCEPTANCE k ...: PASS|FAIL`
//! line followed by any failing claims; the process fails if any criterion does.

use std::collections::BTreeSet;
use std::process::ExitCode;

use num_bigint::BigInt;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use utstar::catalog::{
    brute_force_claims, central_claims, formula_claims, ident_claims, independence_claims, main_theorem_claims,
    membership_claims, run_claims, Claim,
};
use utstar::expr::{parse, parse_ast, Atom, Coeff, Factor, Poly, Sign, Term};
use utstar::freealg::{commutator, standard_s3};
use utstar::matrep::{apply_involution, evaluate, sym_skew_bases, InvolutionKind, UTMatrix};
use utstar::report::{ClaimReport, Status};
use utstar::spaces::{classify, CaseTag};
use utstar::tideal::{sorted_multidegrees, Engine, DEFAULT_CAP};
use utstar::{FieldSpec, FreePoly, FreeVar, Word};

const CHARS: [u64; 3] = [0, 3, 5];

fn field(c: u64) -> FieldSpec {
    FieldSpec::new(c).unwrap()
}

fn run(claims: Vec<Claim>, f: FieldSpec) -> Vec<ClaimReport> {
    run_claims(&claims, &Engine::new(f), 0, false)
}

fn verdict(k: u32, name: &str, reports: &[ClaimReport], extra_ok: bool, extra: &str) -> bool {
    let fails: Vec<&ClaimReport> = reports.iter().filter(|r| r.is_fail()).collect();
    let ok = fails.is_empty() && extra_ok;
    let passed = reports.iter().filter(|r| r.status == Status::Pass).count();
    println!(
        "ACCEPTANCE {k} {name}: {} ({passed}/{} claims pass{extra})",
        if ok { "PASS" } else { "FAIL" },
        reports.len()
    );
    for r in &fails {
        println!("  {}", r.to_text());
    }
    ok
}

fn criterion_1_generator_identities() -> bool {
    let mut all = Vec::new();
    for c in CHARS {
        all.extend(run(ident_claims(), field(c)).into_iter().map(|mut r| {
            r.claim_id = format!("{}-char{c}", r.claim_id);
            r
        }));
    }
    verdict(1, "generator identities", &all, true, "")
}

fn criterion_2_formula_replay() -> bool {
    let f = field(0);
    let reports = run(formula_claims(f), f);
    verdict(2, "formula replay", &reports, true, "")
}

fn criterion_3_membership() -> bool {
    let mut all = run(membership_claims(field(0)), field(0));
    let char3: Vec<Claim> = membership_claims(field(3));
    all.extend(run(char3, field(3)).into_iter().map(|mut r| {
        r.claim_id = format!("{}-char3", r.claim_id);
        r
    }));
    // the char-3 relation must actually have been checked
    let checked = all.iter().any(|r| r.claim_id == "E-IGUALDADEDOSGS-k3-char3" && r.status == Status::Pass);
    verdict(3, "membership in I", &all, checked, "")
}

fn criterion_4_main_theorem() -> bool {
    let mut all = Vec::new();
    let mut shapes = BTreeSet::new();
    for c in CHARS {
        let f = field(c);
        all.extend(run(main_theorem_claims(f, 5), f));
        for md in sorted_multidegrees(5) {
            let (m, n1) = (md.y_total(), md.zdegs.first().copied().unwrap_or(0));
            let shape = match classify(&md, f) {
                Some(CaseTag::M0) => "(M,0)".to_string(),
                Some(CaseTag::ZeroN) => "(0,N)".to_string(),
                Some(CaseTag::M1) => "(M,(1))".to_string(),
                Some(CaseTag::OneNGe3) => "((1),N) n_s>=3".to_string(),
                Some(CaseTag::OneN1) => "((1),N) n_s=1".to_string(),
                Some(CaseTag::MNGeneral) | Some(CaseTag::MNChar3) => {
                    format!("(M,N) m {} n_1 {}", if m % 2 == 0 { "even" } else { "odd" }, if n1 == 1 { "=1" } else { ">1" })
                }
                None => continue,
            };
            shapes.insert(shape);
        }
    }
    let covered = shapes.len() == 9;
    verdict(4, "I = Id per component, family counts", &all, covered, &format!(", {} case shapes", shapes.len()))
}

fn criterion_5_independence() -> bool {
    let mut all = Vec::new();
    for c in CHARS {
        all.extend(run(independence_claims(field(c), 5), field(c)));
    }
    verdict(5, "family independence", &all, !all.is_empty(), "")
}

fn criterion_6_central() -> bool {
    let mut all = Vec::new();
    for c in CHARS {
        let f = field(c);
        all.extend(run(central_claims(f, 3, DEFAULT_CAP), f).into_iter().map(|mut r| {
            r.claim_id = format!("{}-char{c}", r.claim_id);
            r
        }));
    }
    let bf = run(brute_force_claims(field(3)), field(3));
    let bf_ran = bf.iter().all(|r| r.status == Status::Pass);
    all.extend(bf);
    verdict(6, "central polynomials", &all, bf_ran, "")
}

// ---------------------------------------------------------------------------
// criterion 7

fn letters() -> [FreeVar; 4] {
    [FreeVar::y(1), FreeVar::y(2), FreeVar::z(1), FreeVar::z(2)]
}

fn poly_strategy() -> impl Strategy<Value = Vec<(Vec<usize>, i64)>> {
    prop::collection::vec((prop::collection::vec(0..4usize, 0..4), -4i64..5), 0..5)
}

fn build(f: FieldSpec, terms: &[(Vec<usize>, i64)]) -> FreePoly {
    let mut p = FreePoly::zero(f);
    for (w, c) in terms {
        p.add_term(Word::from_letters(w.iter().map(|&i| letters()[i])), f.from_i64(*c));
    }
    p
}

fn field_strategy() -> impl Strategy<Value = FieldSpec> {
    prop::sample::select(vec![0u64, 3, 5, 7]).prop_map(field)
}

/// Concrete symmetric / skew matrices with small integer coordinates.
fn random_assignment(
    f: FieldSpec,
    n: usize,
    kind: InvolutionKind,
    coords: &[i64],
) -> std::collections::BTreeMap<FreeVar, UTMatrix> {
    let (sym, skew) = sym_skew_bases(n, kind).unwrap();
    let mut k = 0;
    letters()
        .iter()
        .map(|&v| {
            let basis = if v.kind == utstar::VarKind::Y { &sym } else { &skew };
            let mut m = UTMatrix::zero(n, f);
            for b in basis {
                m = m.add(&b.to_matrix(f).scale(&f.from_i64(coords[k % coords.len()])));
                k += 1;
            }
            (v, m)
        })
        .collect()
}

fn law_config() -> ProptestConfig {
    ProptestConfig { cases: 1000, failure_persistence: None, ..ProptestConfig::default() }
}

/// Involution laws, evaluation homomorphism and equivariance, Jacobi, and
/// bracket switching, 1000 cases each.
fn criterion_7_algebra_laws() -> bool {
    let mut runner = proptest::test_runner::TestRunner::new(law_config());
    let mut failures = Vec::new();
    let inv = runner.run(&(field_strategy(), poly_strategy(), poly_strategy()), |(f, a, b)| {
        let (a, b) = (build(f, &a), build(f, &b));
        prop_assert_eq!(a.involution().involution(), a.clone());
        prop_assert_eq!((&a * &b).involution(), &b.involution() * &a.involution());
        prop_assert_eq!((&a + &b).involution(), &a.involution() + &b.involution());
        Ok(())
    });
    if let Err(e) = inv {
        failures.push(format!("involution: {e}"));
    }
    let hom = runner.run(
        &(field_strategy(), poly_strategy(), poly_strategy(), prop::collection::vec(-3i64..4, 8), any::<bool>()),
        |(f, a, b, coords, s_kind)| {
            let (n, kind) = if s_kind { (4, InvolutionKind::S) } else { (3, InvolutionKind::Star) };
            let assign = random_assignment(f, n, kind, &coords);
            let (a, b) = (build(f, &a), build(f, &b));
            let ev = |p: &FreePoly| evaluate(p, &assign, kind).unwrap();
            prop_assert_eq!(ev(&(&a + &b)), ev(&a).add(&ev(&b)));
            prop_assert_eq!(ev(&(&a * &b)), ev(&a).mul(&ev(&b)));
            prop_assert_eq!(ev(&a.involution()), apply_involution(&ev(&a), kind).unwrap());
            Ok(())
        },
    );
    if let Err(e) = hom {
        failures.push(format!("evaluation: {e}"));
    }
    let jac = runner.run(&(field_strategy(), poly_strategy(), poly_strategy(), poly_strategy()), |(f, a, b, c)| {
        let (a, b, c) = (build(f, &a), build(f, &b), build(f, &c));
        let j = &(&commutator(&commutator(&a, &b), &c) + &commutator(&commutator(&b, &c), &a))
            + &commutator(&commutator(&c, &a), &b);
        prop_assert!(j.is_zero());
        Ok(())
    });
    if let Err(e) = jac {
        failures.push(format!("jacobi: {e}"));
    }
    let switch = runner.run(&(field_strategy(), poly_strategy(), poly_strategy()), |(f, a, b)| {
        let (a, b) = (build(f, &a), build(f, &b));
        prop_assert_eq!(commutator(&a, &b), -commutator(&b, &a));
        prop_assert_eq!(commutator(&a, &b).involution(), commutator(&b.involution(), &a.involution()));
        Ok(())
    });
    if let Err(e) = switch {
        failures.push(format!("bracket switch: {e}"));
    }
    println!(
        "ACCEPTANCE 7 algebra laws: {} (4 suites x 1000 cases)",
        if failures.is_empty() { "PASS" } else { "FAIL" }
    );
    for x in &failures {
        println!("  {x}");
    }
    failures.is_empty()
}

// ---------------------------------------------------------------------------
// criterion 8

/// Polynomials displayed in the source text, written in the input syntax.
const LITERALS: &[&str] = &[
    "z1[z2,z3] - z2[z1,z3] + z3[z1,z2]",
    "[y1,y2][y3,y4] - [y3,y4][y1,y2]",
    "-[y1,z2][y3,y4] - [y3,y4][y1,z2]",
    "[y1,y2][y3,y4] - [y1,y3][y2,y4] + [y1,y4][y2,y3]",
    "z1[y3,y4]z2 + z2[y3,y4]z1",
    "z1[z3,z4]z2 + z2[z3,z4]z1",
    "z1[y3,z4]z2 - z2[y3,z4]z1",
    "[y1,y2]z5[y3,y4]",
    "z1[y4,y5]z2y3 - y3z1[y4,y5]z2",
    "z1[y4,y5]z2z3 + z3z1[y4,y5]z2",
    "[y1,y2][y3,y4][y5,y6]",
    "[y1,y2][y3,y4]y5 - y5[y1,y2][y3,y4]",
    "[z1,z2][z3,z4]z5 + z5[z1,z2][z3,z4]",
    "[y1,y2,y5][y3,y4] + [y1,y2][y3,y4,y5]",
    "[z1,z2,z5][z3,z4] - [z1,z2][z3,z4,z5]",
    "[z4,z3,y1][y2,y1] - [z4,y2,y1][z3,y1] - [z3,y2,y1][z4,y1]",
    "[z1,z2][y3,y4] - z1[y3,y4]z2",
    "[z1,z2][z3,y4] + z1[z2,y4]z3 - z2[z1,y4]z3",
    "z1[z3,z2,y4] - z2[z3,z1,y4] + z3[z2,z1,y4]",
    "z1z2[y1,y2] - z2[y2,z1,y1] + z2[y1,z1,y2]",
    "z1z2[y1,z3,y2] + z2[y1,z3,z1,y2]",
    "z1z2[z3,z4,y1,y2] + z2[z3,z4,z1,y1,y2]",
    "z1[y3,z2,y1,y2] - z1[y2,z2,y1,y3] + z2[y2,z1,y1,y3] - z2[y3,z1,y1,y2]",
    "[y1,y2,y3,y4]",
    "[y1,y2][y3,y4]",
    "[z1,z2,z3]",
    "z1[z2,z3,z4]",
    "[y1,z1,y2,y3]",
    "z1[y1,y2,y3]",
    "[y1,y2,y3][y4,z1]",
    "z2z3[y1,z1]",
    "[y1,z1]z2z3",
    "z1z2z2[y1,z2]z2",
    "z1[z3,z2][y1,z3]",
    "[y1,z1,y2,y3][y4,z2]",
    "[y1,z1]'",
    "2/3 y1y1",
];

fn literal_ok(src: &str) -> Option<bool> {
    let ast = parse_ast(src).ok()?;
    let printed = ast.to_string();
    let again = parse_ast(&printed).ok()?;
    let f = field(0);
    Some(again == ast && again.to_string() == printed && again.eval(f).ok()? == ast.eval(f).ok()?)
}

fn gen_var(rng: &mut ChaCha8Rng) -> FreeVar {
    let i = rng.gen_range(1..=12);
    if rng.gen_bool(0.5) {
        FreeVar::y(i)
    } else {
        FreeVar::z(i)
    }
}

fn gen_poly(rng: &mut ChaCha8Rng, depth: u32) -> Poly {
    let n = if depth >= 2 { rng.gen_range(1..=3) } else { rng.gen_range(1..=2) };
    Poly {
        terms: (0..n)
            .map(|_| {
                let sign = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
                (sign, gen_term(rng, depth))
            })
            .collect(),
    }
}

fn gen_term(rng: &mut ChaCha8Rng, depth: u32) -> Term {
    let coeff = rng.gen_bool(0.4).then(|| Coeff {
        num: BigInt::from(rng.gen_range(0..50)),
        den: rng.gen_bool(0.3).then(|| BigInt::from(rng.gen_range(1..20))),
    });
    let k = if coeff.is_some() { rng.gen_range(0..=2) } else { rng.gen_range(1..=3) };
    let factors = (0..k)
        .map(|_| {
            let atom = if depth == 0 || rng.gen_bool(0.6) {
                Atom::Var(gen_var(rng))
            } else if rng.gen_bool(0.6) {
                let m = rng.gen_range(2..=3);
                Atom::Bracket((0..m).map(|_| gen_poly(rng, depth - 1)).collect())
            } else {
                Atom::Paren(Box::new(gen_poly(rng, depth - 1)))
            };
            Factor { atom, star: rng.gen_bool(0.2) }
        })
        .collect();
    Term { coeff, factors }
}

/// Upper bound on the number of words after full expansion.
fn expansion_bound(p: &Poly) -> u128 {
    p.terms
        .iter()
        .map(|(_, t)| {
            t.factors.iter().fold(1u128, |acc, f| {
                let a = match &f.atom {
                    Atom::Var(_) => 1,
                    Atom::Paren(q) => expansion_bound(q),
                    Atom::Bracket(qs) => qs
                        .iter()
                        .fold(1u128 << (qs.len() - 1), |b, q| b.saturating_mul(expansion_bound(q))),
                };
                acc.saturating_mul(a)
            })
        })
        .fold(0u128, |a, b| a.saturating_add(b))
}

fn criterion_8_parser() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut failures = Vec::new();
    let mut evaluated = 0;
    for _ in 0..500 {
        let ast = gen_poly(&mut rng, 3);
        let printed = ast.to_string();
        match parse_ast(&printed) {
            Ok(back) if back == ast && back.to_string() == printed => {}
            other => failures.push(format!("{printed} -> {other:?}")),
        }
        // semantic round trip through the canonical printer
        if expansion_bound(&ast) > 4096 {
            continue;
        }
        evaluated += 1;
        for f in [field(0), field(5)] {
            if let Ok(p) = ast.eval(f) {
                if parse(&p.to_string(), f).ok().as_ref() != Some(&p) {
                    failures.push(format!("canonical form of {printed} over {f}"));
                }
            }
        }
    }
    let mut literals = 0;
    for src in LITERALS {
        match literal_ok(src) {
            Some(true) => literals += 1,
            Some(false) => failures.push(format!("literal {src}")),
            None => {}
        }
    }
    let s3 = parse(LITERALS[0], field(0)).unwrap();
    let z = |i| FreePoly::var(field(0), FreeVar::z(i));
    if s3 != standard_s3(&z(1), &z(2), &z(3)) {
        failures.push("s_3 literal".into());
    }
    println!(
        "ACCEPTANCE 8 parser round trip: {} (500 generated, {evaluated} expanded, {literals} literals)",
        if failures.is_empty() { "PASS" } else { "FAIL" }
    );
    for x in failures.iter().take(10) {
        println!("  {x}");
    }
    failures.is_empty()
}

type Criterion = (&'static str, fn() -> bool);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("criterion_1", criterion_1_generator_identities),
        ("criterion_2", criterion_2_formula_replay),
        ("criterion_3", criterion_3_membership),
        ("criterion_4", criterion_4_main_theorem),
        ("criterion_5", criterion_5_independence),
        ("criterion_6", criterion_6_central),
        ("criterion_7", criterion_7_algebra_laws),
        ("criterion_8", criterion_8_parser),
    ];
    // positional arguments select criteria by substring; flags are ignored
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = Vec::new();
    for (name, run) in criteria {
        if !filters.is_empty() && !filters.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let ok = std::panic::catch_unwind(run).unwrap_or_else(|_| {
            println!("ACCEPTANCE {}: FAIL (panicked)", &name[10..]);
            false
        });
        if !ok {
            failed.push(name);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all selected criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
