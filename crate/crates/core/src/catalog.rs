//! The claim catalog: formula replays on the specialized generic matrices,
//! membership of derived relations in `I`, the per-component comparison of
//! `I` with `Id(UT_3,*)`, and the central-polynomial checks.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use crate::commring::{CPoly, EntryVar};
use crate::freealg::{left_normed, FreePoly, FreeVar, MultiDegree, VarKind};
use crate::matrep::{evaluate, evaluate_generic, qgeneric_for, sgeneric_for, InvolutionKind, UTMatrix};
use crate::report::ClaimReport;
use crate::scalars::FieldSpec;
use crate::spaces::{component_words, ComponentBasis, SpacesError};
use crate::tideal::{
    brute_force_finite, central_slice, family_independence, sorted_multidegrees, verify_central_theorem, Engine,
    Membership, TIdealError, BRUTE_FORCE_CAP,
};

type Runner = Arc<dyn Fn(&Engine) -> ClaimReport + Send + Sync>;

/// One catalog entry, run lazily against a shared engine.
#[derive(Clone)]
pub struct Claim {
    pub id: String,
    run: Runner,
}

impl Claim {
    pub fn new(id: impl Into<String>, run: impl Fn(&Engine) -> ClaimReport + Send + Sync + 'static) -> Self {
        Claim { id: id.into(), run: Arc::new(run) }
    }

    pub fn run(&self, engine: &Engine) -> ClaimReport {
        (self.run)(engine)
    }
}

impl std::fmt::Debug for Claim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Claim").field("id", &self.id).finish()
    }
}

#[derive(Debug, Clone)]
pub struct ReplayOptions {
    pub field: FieldSpec,
    pub max_total_degree: u32,
    pub cap: usize,
    /// Worker threads; 0 uses the rayon default.
    pub jobs: usize,
    pub timings: bool,
}

/// Runs claims on a bounded pool. Output is sorted by `claim_id` and, unless
/// `timings` is set, independent of scheduling.
pub fn run_claims(claims: &[Claim], engine: &Engine, jobs: usize, timings: bool) -> Vec<ClaimReport> {
    let run_one = |c: &Claim| {
        let t = Instant::now();
        let mut r = c.run(engine);
        r.claim_id = c.id.clone();
        if timings {
            r.elapsed_ms = t.elapsed().as_millis() as u64;
        }
        r
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().expect("thread pool");
    let mut out: Vec<ClaimReport> = pool.install(|| claims.par_iter().map(run_one).collect());
    out.sort_by(|a, b| a.claim_id.cmp(&b.claim_id));
    out
}

/// The full catalog for one characteristic.
pub fn catalog(field: FieldSpec, max_total_degree: u32, cap: usize) -> Vec<Claim> {
    let mut claims = ident_claims();
    claims.extend(formula_claims(field));
    claims.extend(membership_claims(field));
    claims.extend(main_theorem_claims(field, max_total_degree));
    claims.extend(independence_claims(field, max_total_degree));
    claims.extend(central_claims(field, max_total_degree, cap));
    claims.extend(brute_force_claims(field));
    claims
}

pub fn replay(opts: &ReplayOptions) -> Vec<ClaimReport> {
    let engine = Engine::with_cap(opts.field, opts.cap);
    let claims = catalog(opts.field, opts.max_total_degree, opts.cap);
    run_claims(&claims, &engine, opts.jobs, opts.timings)
}

fn error_report(e: TIdealError) -> ClaimReport {
    match e {
        TIdealError::Spaces(SpacesError::ComponentTooLarge { .. }) | TIdealError::EnumerationTooLarge { .. } => {
            ClaimReport::skipped("", e.to_string())
        }
        e => ClaimReport::fail("", BTreeMap::new(), format!("error: {e}")),
    }
}

fn dims<const N: usize>(pairs: [(&str, usize); N]) -> BTreeMap<String, usize> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

// ---------------------------------------------------------------------------
// generators

/// Every expanded instance of each defining family vanishes on fully generic
/// `UT_3` matrices.
pub fn ident_claims() -> Vec<Claim> {
    ["i", "ii", "iii", "iv", "v", "vi"]
        .into_iter()
        .map(|fam| {
            Claim::new(format!("P-IDENT-{fam}"), move |e: &Engine| {
                let gens = e.generators().family(fam);
                for g in &gens {
                    match evaluate_generic(&g.poly, 3, InvolutionKind::Star) {
                        Ok(m) if m.is_zero() => {}
                        Ok(m) => {
                            let (i, j, c) = m.nonzero_entries().next().expect("nonzero");
                            return ClaimReport::fail("", dims([("instances", gens.len())]), format!("{}: ({i},{j}) = {c}", g.label));
                        }
                        Err(err) => return error_report(err.into()),
                    }
                }
                ClaimReport::pass("", dims([("instances", gens.len())]))
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// formula replays

fn yv(f: FieldSpec, i: u32) -> FreePoly {
    FreePoly::var(f, FreeVar::y(i))
}

fn zv(f: FieldSpec, i: u32) -> FreePoly {
    FreePoly::var(f, FreeVar::z(i))
}

fn br(args: &[FreePoly]) -> FreePoly {
    left_normed(args).expect("at least two arguments")
}

fn prod(f: FieldSpec, factors: impl IntoIterator<Item = FreePoly>) -> FreePoly {
    factors.into_iter().fold(FreePoly::one(f), |acc, x| &acc * &x)
}

/// Entry variables and scalars of the replayed formulas.
#[derive(Clone, Copy)]
struct Ent(FieldSpec);

impl Ent {
    fn y(self, r: u16, c: u16, t: u32) -> CPoly {
        CPoly::var(self.0, EntryVar::y(r, c, t))
    }

    fn z(self, r: u16, c: u16, t: u32) -> CPoly {
        CPoly::var(self.0, EntryVar::z(r, c, t))
    }

    fn k(self, v: i64) -> CPoly {
        CPoly::constant(self.0.from_i64(v))
    }

    fn sign(self, e: usize) -> CPoly {
        self.k(if e.is_multiple_of(2) { 1 } else { -1 })
    }

    /// `∏_{s=lo}^{hi} y11^s`.
    fn y11s(self, lo: u32, hi: u32) -> CPoly {
        (lo..=hi).fold(self.k(1), |acc, s| &acc * &self.y(1, 1, s))
    }

    fn z11s(self, idx: impl IntoIterator<Item = u32>) -> CPoly {
        idx.into_iter().fold(self.k(1), |acc, s| &acc * &self.z(1, 1, s))
    }

    /// `Σ c_ab e_ab` in `UT_3`, summing repeated positions.
    fn mat(self, entries: Vec<((usize, usize), CPoly)>) -> UTMatrix {
        let mut m = UTMatrix::zero(3, self.0);
        for ((i, j), c) in entries {
            let cur = m.entry(i, j);
            m.set(i, j, &cur + &c);
        }
        m
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mats {
    Q,
    S,
}

/// `None` when `actual` and `expected` agree outside `ignore`.
fn mismatch(actual: &UTMatrix, expected: &UTMatrix, ignore: &[(usize, usize)]) -> Option<String> {
    for i in 1..=3 {
        for j in i..=3 {
            if ignore.contains(&(i, j)) {
                continue;
            }
            let (a, b) = (actual.entry(i, j), expected.entry(i, j));
            if a != b {
                return Some(format!("({i},{j}): got {a}, displayed {b}"));
            }
        }
    }
    None
}

struct Instance {
    lhs: FreePoly,
    expected: UTMatrix,
    ignore: Vec<(usize, usize)>,
}

fn inst(lhs: FreePoly, expected: UTMatrix) -> Instance {
    Instance { lhs, expected, ignore: Vec::new() }
}

fn check_instances(mats: Mats, field: FieldSpec, insts: &[Instance]) -> ClaimReport {
    for x in insts {
        let assign: BTreeMap<FreeVar, UTMatrix> = x
            .lhs
            .variables()
            .into_iter()
            .map(|v| {
                let m = match mats {
                    Mats::Q => qgeneric_for(v, field),
                    Mats::S => sgeneric_for(v, field),
                };
                (v, m)
            })
            .collect();
        let actual = match evaluate(&x.lhs, &assign, InvolutionKind::Star) {
            Ok(m) => m,
            Err(e) => return error_report(e.into()),
        };
        if let Some(w) = mismatch(&actual, &x.expected, &x.ignore) {
            return ClaimReport::fail("", dims([("instances", insts.len())]), format!("{}: {w}", x.lhs));
        }
    }
    ClaimReport::pass("", dims([("instances", insts.len())]))
}

fn formula(id: String, mats: Mats, field: FieldSpec, build: impl Fn() -> Vec<Instance> + Send + Sync + 'static) -> Claim {
    Claim::new(id, move |_: &Engine| check_instances(mats, field, &build()))
}

fn ys(f: FieldSpec, idx: impl IntoIterator<Item = u32>) -> Vec<FreePoly> {
    idx.into_iter().map(|i| yv(f, i)).collect()
}

fn zs(f: FieldSpec, idx: impl IntoIterator<Item = u32>) -> Vec<FreePoly> {
    idx.into_iter().map(|i| zv(f, i)).collect()
}

fn cat(parts: &[Vec<FreePoly>]) -> Vec<FreePoly> {
    parts.concat()
}

/// Symmetric commutators of qgeneric matrices: the `(y,y)` leading factor.
fn qa(e: Ent) -> CPoly {
    &(&e.y(1, 1, 1) * &e.y(1, 2, 2)) - &(&e.y(1, 1, 2) * &e.y(1, 2, 1))
}

fn prop_main1(f: FieldSpec) -> Vec<Claim> {
    let e = Ent(f);
    let mut out = Vec::new();
    for l in [1u32, 2] {
        out.push(formula(format!("P-PROPOSITIONMAIN1-a-l{l}"), Mats::Q, f, move || {
            let lhs = br(&ys(f, 1..=2 * l));
            let c = &qa(e) * &e.y11s(3, 2 * l);
            vec![inst(lhs, e.mat(vec![((1, 2), c.clone()), ((2, 3), -&c)]))]
        }));
        out.push(formula(format!("P-PROPOSITIONMAIN1-b-l{l}"), Mats::Q, f, move || {
            let lhs = br(&ys(f, 1..=2 * l + 1));
            let c = -&(&qa(e) * &e.y11s(3, 2 * l));
            let t = 2 * l + 1;
            vec![inst(
                lhs,
                e.mat(vec![
                    ((1, 2), &c * &e.y(1, 1, t)),
                    ((2, 3), &c * &e.y(1, 1, t)),
                    ((1, 3), &(&c * &e.k(-2)) * &e.y(1, 2, t)),
                ]),
            )]
        }));
    }
    // a single-letter bracket is undefined, so (c) and (d) start at l = 2
    for l in [2u32, 3] {
        out.push(formula(format!("P-PROPOSITIONMAIN1-c-l{l}"), Mats::Q, f, move || {
            let lhs = &br(&ys(f, 1..=2 * l - 2)) * &br(&ys(f, [2 * l - 1, 2 * l]));
            let (p, q) = (2 * l - 1, 2 * l);
            let last = &(&e.y(1, 1, p) * &e.y(1, 2, q)) - &(&e.y(1, 1, q) * &e.y(1, 2, p));
            let c = &(&qa(e) * &e.y11s(3, 2 * l - 2)) * &last;
            vec![inst(lhs, e.mat(vec![((1, 3), c)]))]
        }));
        out.push(formula(format!("P-PROPOSITIONMAIN1-d-l{l}"), Mats::Q, f, move || {
            let lhs = &br(&ys(f, 1..=2 * l - 1)) * &br(&ys(f, [2 * l, 2 * l + 1]));
            let (p, q) = (2 * l, 2 * l + 1);
            let last = &(&e.y(1, 1, p) * &e.y(1, 2, q)) - &(&e.y(1, 1, q) * &e.y(1, 2, p));
            let c = -&(&(&qa(e) * &e.y11s(3, 2 * l - 1)) * &last);
            vec![inst(lhs, e.mat(vec![((1, 3), c)]))]
        }));
    }
    out
}

fn prop_main2(f: FieldSpec) -> Vec<Claim> {
    let e = Ent(f);
    let mut out = Vec::new();
    for n in [2u32, 3, 4] {
        out.push(formula(format!("P-PROPOSITIONMAIN2-a-n{n}"), Mats::Q, f, move || {
            let lhs = br(&zs(f, 1..=n));
            let lead = &(&e.z(1, 1, 1) * &e.z(1, 2, 2)) - &(&e.z(1, 2, 1) * &e.z(1, 1, 2));
            let c = &(&e.sign(n as usize) * &lead) * &e.z11s(3..=n);
            vec![inst(lhs, e.mat(vec![((1, 2), c.clone()), ((2, 3), -&c)]))]
        }));
    }
    // Z1[Z2,…,Zn] needs two letters in the bracket
    for n in [3u32, 4] {
        out.push(formula(format!("P-PROPOSITIONMAIN2-b-n{n}"), Mats::Q, f, move || {
            let lhs = &zv(f, 1) * &br(&zs(f, 2..=n));
            let lead = &(&e.z(1, 1, 2) * &e.z(1, 2, 3)) - &(&e.z(1, 2, 2) * &e.z(1, 1, 3));
            let c = &(&e.sign(n as usize - 1) * &lead) * &e.z11s(4..=n);
            vec![inst(lhs, e.mat(vec![((1, 2), &c * &e.z(1, 1, 1)), ((1, 3), -&(&c * &e.z(1, 2, 1)))]))]
        }));
    }
    out
}

fn prop_main3(f: FieldSpec) -> Vec<Claim> {
    let e = Ent(f);
    let yz = move || &(&e.y(1, 1, 1) * &e.z(1, 2, 1)) - &(&e.y(1, 2, 1) * &e.z(1, 1, 1));
    let mut out = Vec::new();
    for l in [1u32, 2] {
        out.push(formula(format!("P-PROPOSITIONMAIN3-1-l{l}"), Mats::Q, f, move || {
            let lhs = br(&cat(&[ys(f, [1]), zs(f, [1]), ys(f, 2..=2 * l)]));
            let c = -&(&yz() * &e.y11s(2, 2 * l));
            vec![inst(lhs, e.mat(vec![((1, 2), c.clone()), ((2, 3), -&c)]))]
        }));
        out.push(formula(format!("P-PROPOSITIONMAIN3-2-l{l}"), Mats::Q, f, move || {
            let lhs = br(&cat(&[ys(f, [1]), zs(f, [1]), ys(f, 2..=2 * l + 1)]));
            let c = &yz() * &e.y11s(2, 2 * l);
            let t = 2 * l + 1;
            vec![inst(
                lhs,
                e.mat(vec![
                    ((1, 2), &c * &e.y(1, 1, t)),
                    ((2, 3), &c * &e.y(1, 1, t)),
                    ((1, 3), &(&c * &e.k(-2)) * &e.y(1, 2, t)),
                ]),
            )]
        }));
        out.push(formula(format!("P-PROPOSITIONMAIN3-3-l{l}"), Mats::Q, f, move || {
            let lhs = &zv(f, 1) * &br(&ys(f, 1..=2 * l));
            let c = &qa(e) * &e.y11s(3, 2 * l);
            vec![inst(lhs, e.mat(vec![((1, 2), &c * &e.z(1, 1, 1)), ((1, 3), -&(&c * &e.z(1, 2, 1)))]))]
        }));
        out.push(formula(format!("P-PROPOSITIONMAIN3-4-l{l}"), Mats::Q, f, move || {
            let lhs = &zv(f, 1) * &br(&ys(f, 1..=2 * l + 1));
            let c = -&(&qa(e) * &e.y11s(3, 2 * l));
            let t = 2 * l + 1;
            let e13 = &(&(&e.k(-2) * &e.z(1, 1, 1)) * &e.y(1, 2, t)) + &(&e.z(1, 2, 1) * &e.y(1, 1, t));
            vec![inst(
                lhs,
                e.mat(vec![((1, 2), &(&c * &e.z(1, 1, 1)) * &e.y(1, 1, t)), ((1, 3), &c * &e13)]),
            )]
        }));
        out.push(formula(format!("P-PROPOSITIONMAIN3-6-l{l}"), Mats::Q, f, move || {
            let lhs = &br(&ys(f, 1..=2 * l)) * &br(&cat(&[ys(f, [2 * l + 1]), zs(f, [1])]));
            let t = 2 * l + 1;
            let last = &(&e.y(1, 1, t) * &e.z(1, 2, 1)) - &(&e.y(1, 2, t) * &e.z(1, 1, 1));
            let c = &(&qa(e) * &e.y11s(3, 2 * l)) * &last;
            vec![inst(lhs, e.mat(vec![((1, 3), c)]))]
        }));
    }
    // [Y1,…,Y_{2l−1}] needs two letters, so this display starts at l = 2
    for l in [2u32, 3] {
        out.push(formula(format!("P-PROPOSITIONMAIN3-5-l{l}"), Mats::Q, f, move || {
            let lhs = &br(&ys(f, 1..=2 * l - 1)) * &br(&cat(&[ys(f, [2 * l]), zs(f, [1])]));
            let t = 2 * l;
            let last = &(&e.y(1, 1, t) * &e.z(1, 2, 1)) - &(&e.y(1, 2, t) * &e.z(1, 1, 1));
            let c = -&(&(&qa(e) * &e.y11s(3, 2 * l - 1)) * &last);
            vec![inst(lhs, e.mat(vec![((1, 3), c)]))]
        }));
    }
    out
}

fn base_b1n(f: FieldSpec) -> Vec<Claim> {
    let e = Ent(f);
    let yz = move |j: u32| &(&e.y(1, 1, 1) * &e.z(1, 2, j)) - &(&e.y(1, 2, 1) * &e.z(1, 1, j));
    let mut out = Vec::new();
    for m in [2u32, 3] {
        let others = move |skip: &[u32]| -> Vec<u32> { (1..=m).filter(|l| !skip.contains(l)).collect() };
        out.push(formula(format!("P-BASEB1N-1-m{m}"), Mats::Q, f, move || {
            (1..=m)
                .map(|j| {
                    let rest = others(&[j]);
                    let lhs = &prod(f, zs(f, rest.clone())) * &br(&[yv(f, 1), zv(f, j)]);
                    let c = &e.z11s(rest) * &yz(j);
                    Instance { lhs, expected: e.mat(vec![((1, 2), c)]), ignore: vec![(1, 3)] }
                })
                .collect()
        }));
        out.push(formula(format!("P-BASEB1N-2-m{m}"), Mats::Q, f, move || {
            (1..=m)
                .map(|j| {
                    let rest = others(&[j]);
                    let lhs = &br(&[yv(f, 1), zv(f, j)]) * &prod(f, zs(f, rest.clone()));
                    let c = &(&e.sign(m as usize - 1) * &yz(j)) * &e.z11s(rest);
                    Instance { lhs, expected: e.mat(vec![((2, 3), c)]), ignore: vec![(1, 3)] }
                })
                .collect()
        }));
        let s = m;
        out.push(formula(format!("P-BASEB1N-3-s{s}"), Mats::Q, f, move || {
            let lhs = &(&prod(f, zs(f, 1..=s)) * &br(&[yv(f, 1), zv(f, s)])) * &zv(f, s);
            let all = e.z11s(1..=s);
            let first = -&(&(&all * &yz(s)) * &e.z(1, 2, s));
            let sym = &(&e.y(1, 2, 1) * &e.z(1, 2, s)) + &(&e.y(1, 3, 1) * &e.z(1, 1, s));
            let second = &(&(&e.k(2) * &all) * &sym) * &e.z(1, 1, s);
            let third = &(&(&e.z11s(1..s) * &e.z(1, 2, s)) * &yz(s)) * &e.z(1, 1, s);
            vec![inst(lhs, e.mat(vec![((1, 3), &(&first + &second) - &third)]))]
        }));
        out.push(formula(format!("P-BASEB1N-4-s{s}"), Mats::Q, f, move || {
            let mut v = Vec::new();
            for j in 1..=s {
                for i in 1..j {
                    let rest = others(&[i, j]);
                    let lhs = &(&prod(f, zs(f, rest.clone())) * &br(&[zv(f, s), zv(f, i)])) * &br(&[yv(f, 1), zv(f, j)]);
                    let zz = &(&e.z(1, 1, s) * &e.z(1, 2, i)) - &(&e.z(1, 2, s) * &e.z(1, 1, i));
                    let c = &(&e.z11s(rest) * &zz) * &yz(j);
                    v.push(inst(lhs, e.mat(vec![((1, 3), c)])));
                }
            }
            v
        }));
    }
    out
}

fn permutations(items: &[u32]) -> Vec<Vec<u32>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (k, &x) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(k);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// The displays on sgeneric matrices, where `z_1 ↦ e11 − e33` has no
/// off-diagonal entry.
fn igualdades(f: FieldSpec) -> Vec<Claim> {
    let e = Ent(f);
    let zz = move |i: u32| if i == 1 { e.k(0) } else { e.z(1, 2, i) };
    let yy = move |j: u32| e.y(1, 2, j);
    let mut out = Vec::new();
    for (part, m) in [('a', 2u32), ('b', 3u32)] {
        let odd = m % 2 == 1;
        // the shapes shared by displays 1/2 and 3/4
        let d12 = move |d: CPoly, n: u32, jm: u32| -> UTMatrix {
            if odd {
                let c = &e.sign(n as usize - 1) * &d;
                e.mat(vec![
                    ((1, 2), c.clone()),
                    ((2, 3), c),
                    ((1, 3), &(&(&e.k(2) * &e.sign(n as usize)) * &d) * &yy(jm)),
                ])
            } else {
                let c = &e.sign(n as usize) * &d;
                e.mat(vec![((1, 2), c.clone()), ((2, 3), -&c)])
            }
        };
        let d34 = move |d: CPoly, n: u32, i: u32, jm: u32| -> UTMatrix {
            if odd {
                let c = &e.sign(n as usize) * &d;
                let tail = &(&e.k(-2) * &yy(jm)) + &zz(i);
                e.mat(vec![((1, 2), c.clone()), ((1, 3), &c * &tail)])
            } else {
                e.mat(vec![
                    ((1, 2), &e.sign(n as usize - 1) * &d),
                    ((1, 3), &(&e.sign(n as usize) * &zz(i)) * &d),
                ])
            }
        };
        for n in [2u32, 3] {
            out.push(formula(format!("L-LEMADASIGUALDADES-{part}1-n{n}"), Mats::S, f, move || {
                let mut v = Vec::new();
                for zi in permutations(&(1..=n).collect::<Vec<_>>()) {
                    for yj in permutations(&(1..=m).collect::<Vec<_>>()) {
                        let lhs = br(&cat(&[zs(f, zi.clone()), ys(f, yj.clone())]));
                        let d = &zz(zi[1]) - &zz(zi[0]);
                        v.push(inst(lhs, d12(d, n, yj[m as usize - 1])));
                    }
                }
                v
            }));
            out.push(formula(format!("L-LEMADASIGUALDADES-{part}2-n{n}"), Mats::S, f, move || {
                let mut v = Vec::new();
                for zi in permutations(&(1..=n).collect::<Vec<_>>()) {
                    for yj in permutations(&(1..=m).collect::<Vec<_>>()) {
                        let lhs = br(&cat(&[ys(f, [yj[0]]), zs(f, zi.clone()), ys(f, yj[1..].to_vec())]));
                        let d = &zz(zi[0]) - &yy(yj[0]);
                        v.push(inst(lhs, d12(d, n, yj[m as usize - 1])));
                    }
                }
                v
            }));
            if n >= 3 {
                out.push(formula(format!("L-LEMADASIGUALDADES-{part}3-n{n}"), Mats::S, f, move || {
                    let mut v = Vec::new();
                    for zi in permutations(&(1..=n).collect::<Vec<_>>()) {
                        for yj in permutations(&(1..=m).collect::<Vec<_>>()) {
                            let (i, inner) = (zi[0], &zi[1..]);
                            let lhs = &zv(f, i) * &br(&cat(&[zs(f, inner.to_vec()), ys(f, yj.clone())]));
                            let d = &zz(inner[1]) - &zz(inner[0]);
                            v.push(inst(lhs, d34(d, n, i, yj[m as usize - 1])));
                        }
                    }
                    v
                }));
            }
            out.push(formula(format!("L-LEMADASIGUALDADES-{part}4-n{n}"), Mats::S, f, move || {
                let mut v = Vec::new();
                for zi in permutations(&(1..=n).collect::<Vec<_>>()) {
                    for yj in permutations(&(1..=m).collect::<Vec<_>>()) {
                        let (i, inner) = (zi[0], &zi[1..]);
                        let lhs = &zv(f, i)
                            * &br(&cat(&[ys(f, [yj[0]]), zs(f, inner.to_vec()), ys(f, yj[1..].to_vec())]));
                        let d = &zz(inner[0]) - &yy(yj[0]);
                        v.push(inst(lhs, d34(d, n, i, yj[m as usize - 1])));
                    }
                }
                v
            }));
            out.push(formula(format!("L-LEMADASIGUALDADES-{part}5-n{n}"), Mats::S, f, move || {
                let mut v = Vec::new();
                for zi in permutations(&(1..=n).collect::<Vec<_>>()) {
                    for yj in permutations(&(1..=m).collect::<Vec<_>>()) {
                        let (inner_z, p2) = (&zi[..n as usize - 1], zi[n as usize - 1]);
                        let (inner_y, p1) = (&yj[..m as usize - 1], yj[m as usize - 1]);
                        let first = br(&cat(&[ys(f, [inner_y[0]]), zs(f, inner_z.to_vec()), ys(f, inner_y[1..].to_vec())]));
                        let lhs = &first * &br(&[yv(f, p1), zv(f, p2)]);
                        let d = &zz(inner_z[0]) - &yy(inner_y[0]);
                        let d2 = &zz(p2) - &yy(p1);
                        let s = if odd { n as usize - 1 } else { n as usize };
                        v.push(inst(lhs, e.mat(vec![((1, 3), &(&e.sign(s) * &d) * &d2)])));
                    }
                }
                v
            }));
        }
    }
    out
}

/// Every displayed evaluation on qgeneric and sgeneric matrices.
pub fn formula_claims(field: FieldSpec) -> Vec<Claim> {
    let mut out = prop_main1(field);
    out.extend(prop_main2(field));
    out.extend(prop_main3(field));
    out.extend(base_b1n(field));
    out.extend(igualdades(field));
    out
}

// ---------------------------------------------------------------------------
// membership

/// Hands out fresh `y_i` / `z_i` in order of request.
#[derive(Default)]
struct Vars {
    y: u32,
    z: u32,
}

impl Vars {
    fn next(&mut self, sym: bool) -> FreeVar {
        if sym {
            self.y += 1;
            FreeVar::y(self.y)
        } else {
            self.z += 1;
            FreeVar::z(self.z)
        }
    }

    fn take(&mut self, parities: &[bool]) -> Vec<FreeVar> {
        parities.iter().map(|&s| self.next(s)).collect()
    }
}

fn parity_choices(k: usize) -> Vec<Vec<bool>> {
    (0..1u32 << k).map(|mask| (0..k).map(|i| mask >> (k - 1 - i) & 1 == 1).collect()).collect()
}

fn p(f: FieldSpec, vs: &[FreeVar]) -> Vec<FreePoly> {
    vs.iter().map(|&v| FreePoly::var(f, v)).collect()
}

/// `(-1)^{|x|}`: `-1` for symmetric letters.
fn letter_sign(v: FreeVar) -> i64 {
    if v.kind == VarKind::Y {
        -1
    } else {
        1
    }
}

/// `(-1)^{|x_i x_j|}`, matching the convention of the generators.
fn pair_sign(a: FreeVar, b: FreeVar) -> i64 {
    if a.kind != b.kind {
        -1
    } else {
        1
    }
}

/// Every target must be in `I` with a certificate that sums back to it.
pub fn check_membership(engine: &Engine, targets: &[FreePoly]) -> ClaimReport {
    // certificate sizes depend on what is cached, so only components are counted
    let mut components = 0;
    for t in targets {
        match engine.member_of_i(t) {
            Ok(Membership::Member(cert)) => {
                if cert.reconstruct(engine.field()) != *t {
                    return ClaimReport::fail(
                        "",
                        dims([("targets", targets.len())]),
                        format!("certificate does not reconstruct {t}"),
                    );
                }
                components += cert.parts.len();
            }
            Ok(Membership::NotMember { component, residue }) => {
                return ClaimReport::fail(
                    "",
                    dims([("targets", targets.len())]),
                    format!("{t} not in I; residue in {component}: {residue}"),
                );
            }
            Err(e) => return error_report(e),
        }
    }
    ClaimReport::pass("", dims([("targets", targets.len()), ("components", components)]))
}

fn member(id: String, build: impl Fn(FieldSpec) -> Vec<FreePoly> + Send + Sync + 'static) -> Claim {
    Claim::new(id, move |e: &Engine| check_membership(e, &build(e.field())))
}

fn relacoes1() -> Vec<Claim> {
    vec![
        member("L-RELACOES1-i".into(), |f| {
            parity_choices(6)
                .iter()
                .map(|ps| {
                    let x = p(f, &Vars::default().take(ps));
                    &(&br(&x[0..2]) * &br(&x[2..4])) * &br(&x[4..6])
                })
                .collect()
        }),
        member("L-RELACOES1-ii".into(), |f| {
            parity_choices(5)
                .iter()
                .map(|ps| {
                    let v = Vars::default().take(ps);
                    let x = p(f, &v);
                    let cc = &br(&x[0..2]) * &br(&x[2..4]);
                    &(&cc * &x[4]) + &(&x[4] * &cc).scale_i64(letter_sign(v[4]))
                })
                .collect()
        }),
        member("L-RELACOES1-iii".into(), |f| {
            parity_choices(5)
                .iter()
                .map(|ps| {
                    let v = Vars::default().take(ps);
                    let x = p(f, &v);
                    let a = &br(&[x[0].clone(), x[1].clone(), x[4].clone()]) * &br(&x[2..4]);
                    let b = &br(&x[0..2]) * &br(&[x[2].clone(), x[3].clone(), x[4].clone()]);
                    &a - &b.scale_i64(letter_sign(v[4]))
                })
                .collect()
        }),
    ]
}

/// Differences `w(σ) − w(id)` over every nontrivial permutation.
fn perm_differences(n: usize, build: impl Fn(&[usize]) -> FreePoly) -> Vec<FreePoly> {
    let id: Vec<usize> = (0..n).collect();
    let base = build(&id);
    permutations(&(0..n as u32).collect::<Vec<_>>())
        .into_iter()
        .map(|s| s.into_iter().map(|k| k as usize).collect::<Vec<_>>())
        .filter(|s| *s != id)
        .map(|s| &build(&s) - &base)
        .collect()
}

fn pick(x: &[FreePoly], sigma: &[usize]) -> Vec<FreePoly> {
    sigma.iter().map(|&k| x[k].clone()).collect()
}

fn relacoes2() -> Vec<Claim> {
    let mut out = Vec::new();
    for n in 1..=3usize {
        out.push(member(format!("L-RELACOES2-a-n{n}"), move |f| {
            let x = p(f, &Vars::default().take(&vec![false; n + 2]));
            let (a, b, rest) = (x[n].clone(), x[n + 1].clone(), x[..n].to_vec());
            perm_differences(n, |s| br(&cat(&[vec![a.clone(), b.clone()], pick(&rest, s)])))
        }));
        for (part, tail) in [('c', true), ('d', false), ('e', false)] {
            out.push(member(format!("L-RELACOES2-{part}-n{n}"), move |f| {
                let mut targets = Vec::new();
                for ps in parity_choices(n + 2) {
                    let mut vars = Vars::default();
                    let ab = p(f, &vars.take(&ps[..2]));
                    let xs = p(f, &vars.take(&ps[2..]));
                    let extra = FreePoly::var(f, vars.next(tail));
                    targets.extend(perm_differences(n, |s| match part {
                        'c' => br(&cat(&[ab.clone(), pick(&xs, s), vec![extra.clone()]])),
                        'd' => &(&prod(f, pick(&xs, s)) * &extra) * &br(&ab),
                        _ => &(&br(&ab) * &extra) * &prod(f, pick(&xs, s)),
                    }));
                }
                targets
            }));
        }
    }
    // total degree m + n + 4 stays within six letters
    for (m, n) in [(2usize, 0usize), (0, 2), (1, 1)] {
        out.push(member(format!("L-RELACOES2-b-m{m}-n{n}"), move |f| {
            let mut targets = Vec::new();
            for ps in parity_choices(n + 4) {
                let mut vars = Vars::default();
                let zpre = p(f, &vars.take(&vec![false; m]));
                let ab = p(f, &vars.take(&ps[..2]));
                let xs = p(f, &vars.take(&ps[2..2 + n]));
                let cd = br(&p(f, &vars.take(&ps[2 + n..])));
                let w = |rho: &[usize], sigma: &[usize]| {
                    &(&prod(f, pick(&zpre, rho)) * &br(&cat(&[ab.clone(), pick(&xs, sigma)]))) * &cd
                };
                let id_m: Vec<usize> = (0..m).collect();
                let id_n: Vec<usize> = (0..n).collect();
                let base = w(&id_m, &id_n);
                for rho in permutations(&(0..m as u32).collect::<Vec<_>>()) {
                    for sigma in permutations(&(0..n as u32).collect::<Vec<_>>()) {
                        let rho: Vec<usize> = rho.iter().map(|&k| k as usize).collect();
                        let sigma: Vec<usize> = sigma.iter().map(|&k| k as usize).collect();
                        if rho != id_m || sigma != id_n {
                            targets.push(&w(&rho, &sigma) - &base);
                        }
                    }
                }
            }
            targets
        }));
    }
    out
}

fn produtos2comut() -> Vec<Claim> {
    (0..=1usize)
        .map(|n| {
            member(format!("L-PRODUTOS2COMUT-n{n}"), move |f| {
                parity_choices(4 + n)
                    .iter()
                    .map(|ps| {
                        let v = Vars::default().take(ps);
                        let x = p(f, &v);
                        let tail = x[4..].to_vec();
                        let term = |a: usize, b: usize, c: usize, d: usize| {
                            let left = br(&cat(&[vec![x[a].clone(), x[b].clone()], tail.clone()]));
                            (&left * &br(&[x[c].clone(), x[d].clone()])).scale_i64(pair_sign(v[a], v[b]))
                        };
                        &(&term(3, 2, 1, 0) - &term(3, 1, 2, 0)) + &term(2, 1, 3, 0)
                    })
                    .collect()
            })
        })
        .collect()
}

fn relacoes3() -> Vec<Claim> {
    vec![
        member("L-RELACOES3-i".into(), |f| {
            [true, false]
                .into_iter()
                .map(|sym| {
                    let mut vars = Vars::default();
                    let z = p(f, &vars.take(&[false, false]));
                    let x = p(f, &vars.take(&[sym, sym]));
                    &(&br(&z) * &br(&x)) - &(&(&z[0] * &br(&x)) * &z[1])
                })
                .collect()
        }),
        member("L-RELACOES3-ii".into(), |f| {
            let (z1, z2, z3, y4) = (zv(f, 1), zv(f, 2), zv(f, 3), yv(f, 4));
            vec![
                &(&(&br(&[z1.clone(), z2.clone()]) * &br(&[z3.clone(), y4.clone()]))
                    + &(&(&z1 * &br(&[z2.clone(), y4.clone()])) * &z3))
                    - &(&(&z2 * &br(&[z1.clone(), y4.clone()])) * &z3),
            ]
        }),
    ]
}

fn relacoes4() -> Vec<Claim> {
    [3usize, 4]
        .into_iter()
        .map(|n| {
            member(format!("L-RELACOES4-n{n}"), move |f| {
                parity_choices(n - 3)
                    .iter()
                    .map(|ps| {
                        let mut vars = Vars::default();
                        let z = p(f, &vars.take(&[false, false, false]));
                        let tail = p(f, &vars.take(ps));
                        let t = |lead: usize, a: usize, b: usize| {
                            &z[lead] * &br(&cat(&[vec![z[a].clone(), z[b].clone()], tail.clone()]))
                        };
                        &(&t(0, 2, 1) - &t(1, 2, 0)) + &t(2, 1, 0)
                    })
                    .collect()
            })
        })
        .collect()
}

fn relacoes5() -> Vec<Claim> {
    vec![
        member("L-RELACOES5-a-m2".into(), |f| {
            let (z1, z2, y1, y2) = (zv(f, 1), zv(f, 2), yv(f, 1), yv(f, 2));
            vec![
                &(&(&(&z1 * &z2) * &br(&[y1.clone(), y2.clone()]))
                    - &(&z2 * &br(&[y2.clone(), z1.clone(), y1.clone()])))
                    + &(&z2 * &br(&[y1, z1, y2])),
            ]
        }),
        member("L-RELACOES5-b-m2".into(), |f| {
            let (z1, z2, z3, y1, y2) = (zv(f, 1), zv(f, 2), zv(f, 3), yv(f, 1), yv(f, 2));
            vec![
                &(&(&z1 * &z2) * &br(&[y1.clone(), z3.clone(), y2.clone()]))
                    + &(&z2 * &br(&[y1, z3, z1, y2])),
            ]
        }),
        member("L-RELACOES5-c-m2".into(), |f| {
            let (z1, z2, z3, z4, y1, y2) = (zv(f, 1), zv(f, 2), zv(f, 3), zv(f, 4), yv(f, 1), yv(f, 2));
            vec![
                &(&(&z1 * &z2) * &br(&[z3.clone(), z4.clone(), y1.clone(), y2.clone()]))
                    + &(&z2 * &br(&[z3, z4, z1, y1, y2])),
            ]
        }),
    ]
}

/// `g^{(1,3)} − g^{(1,2)} + g^{(2,2)} − g^{(2,3)}` with
/// `g^{(i,j)} = z_i[y_j, z_{3−i}, y_1, …]`; in `I` only in characteristic 3.
fn igualdadedosgs() -> Claim {
    Claim::new("E-IGUALDADEDOSGS-k3", |e: &Engine| {
        let f = e.field();
        if f.characteristic() != 3 {
            return ClaimReport::skipped("", "characteristic 3 only");
        }
        let g = |i: u32, j: u32| {
            let other = 3 - i;
            let rest: Vec<u32> = (1..=3).filter(|&k| k != j).collect();
            &zv(f, i) * &br(&cat(&[ys(f, [j]), zs(f, [other]), ys(f, rest)]))
        };
        let t = &(&(&g(1, 3) - &g(1, 2)) + &g(2, 2)) - &g(2, 3);
        check_membership(e, &[t])
    })
}

/// Derived relations that must lie in `I`.
pub fn membership_claims(_field: FieldSpec) -> Vec<Claim> {
    let mut out = relacoes1();
    out.extend(relacoes2());
    out.extend(produtos2comut());
    out.extend(relacoes3());
    out.extend(relacoes4());
    out.extend(relacoes5());
    out.push(igualdadedosgs());
    out
}

// ---------------------------------------------------------------------------
// main theorem, independence, central polynomials

/// `I ∩ component = Id ∩ component`, and the standard family completes
/// `I ∩ B` to `B`, for every sorted multidegree up to `max_total`.
pub fn main_theorem_claims(field: FieldSpec, max_total: u32) -> Vec<Claim> {
    let c = field.characteristic();
    sorted_multidegrees(max_total)
        .into_iter()
        .map(|md| {
            Claim::new(format!("THM1-{}-char{c}", md.label()), move |e: &Engine| {
                let r = match e.verify_main_theorem(&md) {
                    Ok(r) => r,
                    Err(err) => return error_report(err),
                };
                ClaimReport::check("", r.passed(), r.dims(), || {
                    if let Some(w) = &r.witness {
                        format!("in one slice only: {w}")
                    } else {
                        let size = r.family.as_ref().map_or(0, |f| f.size);
                        format!("dim(I∩B) + |family| = {} + {size} != dim B = {}", r.dim_i_b, r.dim_b)
                    }
                })
            })
        })
        .collect()
}

/// Standard families have full rank on their specialized matrices.
pub fn independence_claims(field: FieldSpec, max_total: u32) -> Vec<Claim> {
    let c = field.characteristic();
    sorted_multidegrees(max_total)
        .into_iter()
        .filter_map(|md| {
            let case = crate::spaces::classify(&md, field)?;
            Some(Claim::new(format!("IND-{}-char{c}", md.label()), move |_: &Engine| {
                let fam = match crate::spaces::standard_generators(case, &md, field) {
                    Ok(fam) => fam,
                    Err(err) => return error_report(err.into()),
                };
                let ind = match family_independence(&fam) {
                    Ok(i) => i,
                    Err(err) => return error_report(err),
                };
                let ok = ind.is_independent() && ind.matrices != "generic";
                ClaimReport::check("", ok, dims([("family", ind.size), ("rank", ind.rank)]), || {
                    format!("{} family has rank {} of {} on {} matrices", case.name(), ind.rank, ind.size, ind.matrices)
                })
            }))
        })
        .collect()
}

/// Central polynomials without constant term are identities, per degree.
pub fn central_claims(field: FieldSpec, max_total: u32, cap: usize) -> Vec<Claim> {
    let mut out = Vec::new();
    for (n, kind) in [(3usize, InvolutionKind::Star), (4, InvolutionKind::Star), (4, InvolutionKind::S)] {
        for d in 1..=max_total {
            let id = format!("THM2-n{n}-{}-deg{d}", kind.name().to_uppercase());
            out.push(Claim::new(id, move |_: &Engine| {
                let comps = match verify_central_theorem(n, kind, field, d, cap) {
                    Ok(c) => c,
                    Err(err) => return error_report(err),
                };
                let comps: Vec<_> = comps.into_iter().filter(|c| c.multidegree.total() == d).collect();
                let identities = comps.iter().map(|c| c.identities).sum();
                let central = comps.iter().map(|c| c.central).sum();
                let bad = comps.iter().find(|c| !c.passed());
                let d = dims([("components", comps.len()), ("identities", identities), ("central", central)]);
                ClaimReport::check("", bad.is_none(), d, || {
                    let c = bad.expect("failing component");
                    format!("{}: central {} > identities {}", c.multidegree, c.central, c.identities)
                })
            }));
        }
    }
    out
}

/// Over `UT_3(F_3)`, every polynomial of degree at most 2 that is central on
/// all tuples is an identity up to its constant term, and the generic
/// central slice agrees with exhaustive evaluation.
pub fn brute_force_claims(field: FieldSpec) -> Vec<Claim> {
    (1..=2u32)
        .map(|d| {
            Claim::new(format!("BF-UT3-F3-deg{d}"), move |_: &Engine| {
                if field.characteristic() != 3 {
                    return ClaimReport::skipped("", "characteristic 3 only");
                }
                match brute_force_degree(field, d) {
                    Ok(r) => r,
                    Err(err) => error_report(err),
                }
            })
        })
        .collect()
}

fn brute_force_degree(field: FieldSpec, d: u32) -> Result<ClaimReport, TIdealError> {
    let mut polys = 0;
    let mut central_found = 0;
    for md in sorted_multidegrees(d).into_iter().filter(|m| m.total() == d) {
        let words = component_words(&md);
        let basis = ComponentBasis::new(&md, field, usize::MAX)?;
        // every F_3 combination of the words
        let count = 3usize.pow(words.len() as u32);
        for code in 1..count {
            let mut f = FreePoly::zero(field);
            let mut c = code;
            for w in &words {
                let coeff = (c % 3) as i64;
                c /= 3;
                if coeff != 0 {
                    f.add_term(w.clone(), field.from_i64(coeff));
                }
            }
            polys += 1;
            let bf = brute_force_finite(&f, 3, InvolutionKind::Star, BRUTE_FORCE_CAP)?;
            if bf.central {
                central_found += 1;
                if !bf.identity {
                    return Ok(ClaimReport::fail(
                        "",
                        dims([("polynomials", polys)]),
                        format!("{f} is central but not an identity over F_3"),
                    ));
                }
            }
        }
        for g in central_slice(&basis, 3, InvolutionKind::Star)? {
            let bf = brute_force_finite(&g, 3, InvolutionKind::Star, BRUTE_FORCE_CAP)?;
            if !bf.identity {
                return Ok(ClaimReport::fail(
                    "",
                    dims([("polynomials", polys)]),
                    format!("generic central slice element {g} is not an identity over F_3"),
                ));
            }
        }
    }
    Ok(ClaimReport::pass("", dims([("polynomials", polys), ("central", central_found)])))
}

/// Multidegrees named on the command line as `"m1,m2;n1,n2"`.
pub fn parse_multidegree(s: &str) -> Option<MultiDegree> {
    let (ys, zs) = s.split_once(';').unwrap_or((s, ""));
    let side = |t: &str| -> Option<Vec<u32>> {
        t.split(',').map(str::trim).filter(|x| !x.is_empty()).map(|x| x.parse().ok()).collect()
    };
    let md = MultiDegree::new(side(ys)?, side(zs)?);
    (!md.is_zero()).then_some(md)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::new(0).unwrap()
    }

    fn run(claims: Vec<Claim>, f: FieldSpec) -> Vec<ClaimReport> {
        run_claims(&claims, &Engine::new(f), 2, false)
    }

    #[test]
    fn ident_claims_pass() {
        for r in run(ident_claims(), q()) {
            assert_eq!(r.status, crate::report::Status::Pass, "{}", r.to_text());
        }
    }

    #[test]
    fn small_formulas_pass() {
        let claims: Vec<Claim> =
            formula_claims(q()).into_iter().filter(|c| c.id.starts_with("P-PROPOSITIONMAIN2")).collect();
        for r in run(claims, q()) {
            assert!(!r.is_fail(), "{}", r.to_text());
        }
    }

    #[test]
    fn sorted_and_deterministic() {
        let f = FieldSpec::new(5).unwrap();
        let claims = main_theorem_claims(f, 3);
        let a = run(claims.clone(), f);
        let b = run_claims(&claims, &Engine::new(f), 1, false);
        assert_eq!(a, b);
        assert!(a.windows(2).all(|w| w[0].claim_id < w[1].claim_id));
    }

    #[test]
    fn multidegree_syntax() {
        assert_eq!(parse_multidegree("1,1;1,1"), Some(MultiDegree::new(vec![1, 1], vec![1, 1])));
        assert_eq!(parse_multidegree(";2"), Some(MultiDegree::new(vec![], vec![2])));
        assert_eq!(parse_multidegree("2"), Some(MultiDegree::new(vec![2], vec![])));
        assert_eq!(parse_multidegree("a;1"), None);
        assert_eq!(parse_multidegree(";"), None);
    }

    #[test]
    fn non_member_fails_with_witness() {
        let f = q();
        let r = check_membership(&Engine::new(f), &[br(&[yv(f, 1), zv(f, 1)])]);
        assert!(r.is_fail() && r.witness.is_some());
    }
}
