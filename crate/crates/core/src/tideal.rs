//! The T(*)-ideal `I` generated by the six families of identities of `UT_3`,
//! slice-by-slice membership, the identity ideal via generic matrices, and
//! the central-polynomial checks.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::commring::CMonomial;
use crate::freealg::{left_normed, FreePoly, FreeVar, MultiDegree, VarKind};
use crate::linalg::{left_kernel, sparse_from_pairs, Echelon, SparseVec};
use crate::matrep::{
    evaluate, evaluate_words, generic_assignment, qgeneric_for, sgeneric_for, sym_skew_bases, InvolutionKind,
    MatRepError, UTMatrix,
};
use crate::scalars::{FieldSpec, Scalar};
use crate::spaces::{
    classify, component_words, proper_subspace, standard_generators, CaseTag, ComponentBasis, SpacesError,
    StandardFamily,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TIdealError {
    #[error(transparent)]
    Spaces(#[from] SpacesError),
    #[error(transparent)]
    MatRep(#[from] MatRepError),
    #[error("{tuples} tuples exceed the enumeration cap of {cap}")]
    EnumerationTooLarge { tuples: u128, cap: u128 },
    #[error("polynomial is over {found}, expected {expected}")]
    FieldMismatch { expected: FieldSpec, found: FieldSpec },
}

pub type Result<T> = std::result::Result<T, TIdealError>;

/// One concrete instance of a defining identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub label: String,
    pub poly: FreePoly,
}

/// The defining identities with every placeholder `x_i` expanded to `y_i` or
/// `z_i`, closed under the involution and deduplicated up to scalars.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    field: FieldSpec,
    gens: Vec<Generator>,
}

fn x(i: u32, sym: bool) -> FreeVar {
    if sym {
        FreeVar::y(i)
    } else {
        FreeVar::z(i)
    }
}

/// `(-1)^{|x_i x_j|}`: the commutator of a symmetric and a skew element is
/// symmetric, any other commutator of two letters is skew.
fn pair_sign(a: FreeVar, b: FreeVar) -> i64 {
    if a.kind != b.kind {
        -1
    } else {
        1
    }
}

fn parity_label(vs: &[FreeVar]) -> String {
    vs.iter().map(|v| v.kind.letter()).collect()
}

fn all_parities(k: usize) -> Vec<Vec<bool>> {
    (0..1u32 << k)
        .map(|mask| (0..k).map(|i| mask & (1 << (k - 1 - i)) == 0).collect())
        .collect()
}

impl GeneratorSet {
    pub fn new(field: FieldSpec) -> Self {
        let v = |u: FreeVar| FreePoly::var(field, u);
        let br = |a: FreeVar, b: FreeVar| left_normed(&[v(a), v(b)]).expect("two arguments");
        let (z1, z2, z3, z5) = (FreeVar::z(1), FreeVar::z(2), FreeVar::z(3), FreeVar::z(5));
        let mut raw: Vec<Generator> = Vec::new();
        let s3 = &(&(&v(z1) * &br(z2, z3)) - &(&v(z2) * &br(z1, z3))) + &(&v(z3) * &br(z1, z2));
        raw.push(Generator { label: "i".into(), poly: s3 });
        for p in all_parities(4) {
            let xs: Vec<FreeVar> = (0..4).map(|i| x(i as u32 + 1, p[i])).collect();
            let (x1, x2, x3, x4) = (xs[0], xs[1], xs[2], xs[3]);
            let tag = parity_label(&xs);
            let ii = &(&br(x1, x2) * &br(x3, x4)).scale_i64(pair_sign(x1, x2))
                - &(&br(x3, x4) * &br(x1, x2)).scale_i64(pair_sign(x3, x4));
            raw.push(Generator { label: format!("ii[{tag}]"), poly: ii });
            let iii = &(&(&br(x1, x2) * &br(x3, x4)).scale_i64(pair_sign(x1, x2))
                - &(&br(x1, x3) * &br(x2, x4)).scale_i64(pair_sign(x1, x3)))
                + &(&br(x1, x4) * &br(x2, x3)).scale_i64(pair_sign(x1, x4));
            raw.push(Generator { label: format!("iii[{tag}]"), poly: iii });
            let vv = &(&br(x1, x2) * &v(z5)) * &br(x3, x4);
            raw.push(Generator { label: format!("v[{tag}]"), poly: vv });
        }
        for p in all_parities(2) {
            let (x3, x4) = (x(3, p[0]), x(4, p[1]));
            let tag = parity_label(&[x3, x4]);
            let c = br(x3, x4);
            let iv = &(&(&v(z1) * &c) * &v(z2)) + &(&(&v(z2) * &c) * &v(z1)).scale_i64(pair_sign(x3, x4));
            raw.push(Generator { label: format!("iv[{tag}]"), poly: iv });
        }
        for p in all_parities(3) {
            let (x3, x4, x5) = (x(3, p[0]), x(4, p[1]), x(5, p[2]));
            let tag = parity_label(&[x3, x4, x5]);
            let mid = &(&v(z1) * &br(x4, x5)) * &v(z2);
            let sign = if x3.kind == VarKind::Y { -1 } else { 1 };
            let vi = &(&mid * &v(x3)) + &(&v(x3) * &mid).scale_i64(sign);
            raw.push(Generator { label: format!("vi[{tag}]"), poly: vi });
        }
        let mut gens: Vec<Generator> = Vec::new();
        let mut seen: Vec<FreePoly> = Vec::new();
        for g in raw {
            let star = Generator {
                label: format!("{}*", g.label),
                poly: g.poly.involution(),
            };
            for h in [g, star] {
                assert!(
                    h.poly.terms().all(|(w, _)| w.multidegree().is_multilinear()),
                    "generator {} is not multilinear",
                    h.label
                );
                let key = h.poly.monic();
                if !h.poly.is_zero() && !seen.contains(&key) {
                    seen.push(key);
                    gens.push(h);
                }
            }
        }
        GeneratorSet { field, gens }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn iter(&self) -> impl Iterator<Item = &Generator> {
        self.gens.iter()
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// The instances whose label starts with `family` followed by `[` or the end.
    pub fn family(&self, family: &str) -> Vec<&Generator> {
        self.gens
            .iter()
            .filter(|g| {
                let rest = g.label.strip_prefix(family);
                matches!(rest.and_then(|r| r.chars().next()), None | Some('[') | Some('*'))
                    && rest.is_some()
            })
            .collect()
    }
}

/// Count vectors `e ≤ d` over a fixed variable list.
fn sub_counts(d: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::with_capacity(d.len())];
    for &k in d {
        out = out
            .into_iter()
            .flat_map(|pre| {
                (0..=k).map(move |c| {
                    let mut v = pre.clone();
                    v.push(c);
                    v
                })
            })
            .collect();
    }
    out
}

fn counts_to_md(vars: &[FreeVar], c: &[u32]) -> MultiDegree {
    MultiDegree::from_letters(vars.iter().zip(c).flat_map(|(&v, &k)| std::iter::repeat_n(v, k as usize)))
}

/// Substitutes polynomials for the (distinct) variables of a multilinear `g`.
fn substitute_linear(g: &FreePoly, images: &BTreeMap<FreeVar, FreePoly>) -> FreePoly {
    let field = g.field();
    let mut out = FreePoly::zero(field);
    for (w, c) in g.terms() {
        let mut term = FreePoly::constant(c.clone());
        for v in w.letters() {
            term = &term * &images[v];
        }
        out = &out + &term;
    }
    out
}

/// The component's variables and the slots of one generator.
struct CoreSearch<'a> {
    vars: &'a [FreeVar],
    slots: Vec<FreeVar>,
}

type TildeCache = Mutex<HashMap<(MultiDegree, bool), Arc<Vec<FreePoly>>>>;

/// Memoized slices of `I` and of the identity ideal for one field.
pub struct Engine {
    field: FieldSpec,
    gens: GeneratorSet,
    cap: usize,
    ceiling: bool,
    islices: Mutex<HashMap<MultiDegree, Arc<Echelon>>>,
    idslices: Mutex<HashMap<(MultiDegree, usize, InvolutionKind), Arc<Echelon>>>,
    bases: Mutex<HashMap<MultiDegree, Arc<ComponentBasis>>>,
    tildes: TildeCache,
    searched: Mutex<HashSet<MultiDegree>>,
}

/// Default word-count cap per component.
pub const DEFAULT_CAP: usize = 5040;

impl Engine {
    pub fn new(field: FieldSpec) -> Self {
        Self::with_cap(field, DEFAULT_CAP)
    }

    pub fn with_cap(field: FieldSpec, cap: usize) -> Self {
        Engine {
            field,
            gens: GeneratorSet::new(field),
            cap,
            ceiling: true,
            islices: Mutex::default(),
            idslices: Mutex::default(),
            bases: Mutex::default(),
            tildes: Mutex::default(),
            searched: Mutex::default(),
        }
    }

    /// Turns off the shortcut that stops enumerating consequences once their
    /// span reaches the dimension of the identity slice.
    pub fn without_ceiling(mut self) -> Self {
        self.ceiling = false;
        self
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn generators(&self) -> &GeneratorSet {
        &self.gens
    }

    pub fn basis(&self, md: &MultiDegree) -> Result<Arc<ComponentBasis>> {
        if let Some(b) = self.bases.lock().expect("lock").get(md) {
            return Ok(b.clone());
        }
        let b = Arc::new(proper_subspace(md, self.field, self.cap)?);
        self.bases.lock().expect("lock").insert(md.clone(), b.clone());
        Ok(b)
    }

    /// `w + w*` (symmetric) or `w − w*` (skew) over the words of `md`, one per
    /// pair `{w, rev w}`, zeros dropped.
    fn tildes(&self, md: &MultiDegree, sym: bool) -> Arc<Vec<FreePoly>> {
        let key = (md.clone(), sym);
        if let Some(t) = self.tildes.lock().expect("lock").get(&key) {
            return t.clone();
        }
        let field = self.field;
        let mut out = Vec::new();
        if md.is_zero() {
            if sym {
                out.push(FreePoly::one(field));
            }
        } else {
            for w in component_words(md) {
                let r = w.reversed();
                if r.letters() < w.letters() {
                    continue;
                }
                let mut p = FreePoly::word(field, w.clone());
                let sign = w.involution_sign() * if sym { 1 } else { -1 };
                p.add_term(r, field.from_i64(sign));
                if !p.is_zero() {
                    out.push(p);
                }
            }
        }
        let out = Arc::new(out);
        self.tildes.lock().expect("lock").insert(key, out.clone());
        out
    }

    /// `Id ∩ component` for `UT_n` with the given involution: the kernel of
    /// evaluation on fully generic matrices.
    pub fn id_slice(&self, md: &MultiDegree, n: usize, kind: InvolutionKind) -> Result<Arc<Echelon>> {
        let key = (md.clone(), n, kind);
        if let Some(e) = self.idslices.lock().expect("lock").get(&key) {
            return Ok(e.clone());
        }
        let basis = self.basis(md)?;
        let rows = evaluation_rows(&basis, n, kind, EvalMap::Full)?;
        let e = Arc::new(left_kernel(self.field, &rows));
        self.idslices.lock().expect("lock").insert(key, e.clone());
        Ok(e)
    }

    /// `I ∩ component`.
    pub fn consequence_slice(&self, md: &MultiDegree) -> Result<Arc<Echelon>> {
        if md.is_zero() || md.is_normalized() {
            return Ok(self.build_slice(md, None)?.0);
        }
        if let Some(e) = self.islices.lock().expect("lock").get(md) {
            return Ok(e.clone());
        }
        // I is closed under renaming variables of the same kind
        let (norm, renaming) = md.normalized();
        let back: BTreeMap<FreeVar, FreeVar> = renaming.iter().map(|(a, b)| (*b, *a)).collect();
        let src = self.consequence_slice(&norm)?;
        let src_basis = self.basis(&norm)?;
        let basis = self.basis(md)?;
        let mut span = Echelon::new(self.field, basis.dim());
        for row in src.rows() {
            span.insert(basis.to_vec(&src_basis.to_poly(row).rename(&back))?);
        }
        let span = Arc::new(span);
        self.islices.lock().expect("lock").insert(md.clone(), span.clone());
        Ok(span)
    }

    /// Enumerates consequences; with a target, stops as soon as it lies in the
    /// span and reports whether the returned span is all of `I ∩ component`.
    fn build_slice(&self, md: &MultiDegree, target: Option<&SparseVec>) -> Result<(Arc<Echelon>, bool)> {
        if let Some(e) = self.islices.lock().expect("lock").get(md) {
            return Ok((e.clone(), true));
        }
        let basis = self.basis(md)?;
        let field = self.field;
        let ceiling = if self.ceiling && md.total() >= 3 {
            Some(self.id_slice(md, 3, InvolutionKind::Star)?)
        } else {
            None
        };
        let mut span = Echelon::new(field, basis.dim());
        let stop = |span: &Echelon| -> Option<bool> {
            if span.is_full() {
                return Some(true);
            }
            if let Some(id) = &ceiling {
                if span.rank() == id.rank() && id.contains_subspace(span) {
                    return Some(true);
                }
            }
            match target {
                Some(t) if span.contains(t) => Some(false),
                _ => None,
            }
        };
        let mut finished = None;
        if md.total() >= 3 {
            // u·g·v with u or v nonempty: peel one outer letter
            'outer: for v in md.variables() {
                let sub = md.with(v, -1);
                if sub.total() < 3 {
                    continue;
                }
                let sub_slice = self.consequence_slice(&sub)?;
                let sub_basis = self.basis(&sub)?;
                let lv = FreePoly::var(field, v);
                for row in sub_slice.rows() {
                    let p = sub_basis.to_poly(row);
                    span.insert(basis.to_vec(&(&lv * &p))?);
                    span.insert(basis.to_vec(&(&p * &lv))?);
                    if let Some(s) = stop(&span) {
                        finished = Some(s);
                        break 'outer;
                    }
                }
            }
            if finished.is_none() {
                finished = self.core(md, &basis, &mut span, &stop)?;
            }
        }
        let complete = finished.unwrap_or(true);
        let span = Arc::new(span);
        if complete {
            self.islices.lock().expect("lock").insert(md.clone(), span.clone());
        }
        Ok((span, complete))
    }

    /// Inserts every `g(w̃_1,…,w̃_t)` of multidegree `md`.
    fn core(
        &self,
        md: &MultiDegree,
        basis: &ComponentBasis,
        span: &mut Echelon,
        stop: &dyn Fn(&Echelon) -> Option<bool>,
    ) -> Result<Option<bool>> {
        let vars = md.variables();
        let total: Vec<u32> = vars.iter().map(|&v| md.degree_of(v)).collect();
        for g in self.gens.iter() {
            let slots: Vec<FreeVar> = g.poly.variables().into_iter().collect();
            let z_slots = slots.iter().filter(|v| v.kind == VarKind::Z).count();
            if z_slots > md.total() as usize {
                continue;
            }
            let search = CoreSearch { vars: &vars, slots };
            let mut images = BTreeMap::new();
            if let Some(s) = self.assign(&search, 0, &total, &mut images, &g.poly, basis, span, stop)? {
                return Ok(Some(s));
            }
        }
        Ok(None)
    }

    #[allow(clippy::too_many_arguments)]
    fn assign(
        &self,
        search: &CoreSearch<'_>,
        k: usize,
        remaining: &[u32],
        images: &mut BTreeMap<FreeVar, FreePoly>,
        g: &FreePoly,
        basis: &ComponentBasis,
        span: &mut Echelon,
        stop: &dyn Fn(&Echelon) -> Option<bool>,
    ) -> Result<Option<bool>> {
        let slot = search.slots[k];
        let sym = slot.kind == VarKind::Y;
        let last = k + 1 == search.slots.len();
        let choices = if last { vec![remaining.to_vec()] } else { sub_counts(remaining) };
        for e in choices {
            let zero = e.iter().all(|&c| c == 0);
            if zero && !sym {
                continue;
            }
            let rest: Vec<u32> = remaining.iter().zip(&e).map(|(a, b)| a - b).collect();
            // every later skew slot needs at least one letter
            let later_skew = search.slots[k + 1..].iter().filter(|v| v.kind == VarKind::Z).count() as u32;
            if rest.iter().sum::<u32>() < later_skew {
                continue;
            }
            let ws = self.tildes(&counts_to_md(search.vars, &e), sym);
            for w in ws.iter() {
                images.insert(slot, w.clone());
                if last {
                    let c = substitute_linear(g, images);
                    if !c.is_zero() {
                        span.insert(basis.to_vec(&c)?);
                        if let Some(s) = stop(span) {
                            return Ok(Some(s));
                        }
                    }
                } else if let Some(s) = self.assign(search, k + 1, &rest, images, g, basis, span, stop)? {
                    return Ok(Some(s));
                }
            }
        }
        Ok(None)
    }

    /// Whether `f` lies in `I`, with a certificate when it does.
    pub fn member_of_i(&self, f: &FreePoly) -> Result<Membership> {
        let mut parts = Vec::new();
        for (md, comp) in f.multidegree_components() {
            if comp.is_zero() {
                continue;
            }
            // work on the normalized component so slices are shared
            let (norm, renaming) = md.normalized();
            let back: BTreeMap<FreeVar, FreeVar> = renaming.iter().map(|(a, b)| (*b, *a)).collect();
            let basis = self.basis(&norm)?;
            let v = basis.to_vec(&comp.rename(&renaming))?;
            // a repeat visit pays for the whole slice once instead of searching again
            let repeat = {
                let mut seen = self.searched.lock().expect("lock");
                !seen.insert(norm.clone())
            };
            let span = if repeat {
                self.consequence_slice(&norm)?
            } else {
                self.build_slice(&norm, Some(&v))?.0
            };
            match span.coordinates(&v) {
                Some(coords) => {
                    let rows = span
                        .rows()
                        .into_iter()
                        .zip(coords)
                        .filter(|(_, c)| !c.is_zero())
                        .map(|(r, c)| (c, basis.to_poly(r).rename(&back)))
                        .collect();
                    parts.push(CertificatePart { multidegree: md, rows });
                }
                None => {
                    let residue = basis.to_poly(&span.reduce(&v)).rename(&back);
                    return Ok(Membership::NotMember { component: md, residue });
                }
            }
        }
        Ok(Membership::Member(Certificate { parts }))
    }

    /// Compares `I` and `Id(UT_3,*)` on one component and, when a standard
    /// family applies, checks that it completes `I ∩ B` to `B`.
    pub fn verify_main_theorem(&self, md: &MultiDegree) -> Result<MainTheoremReport> {
        let (norm, _) = md.normalized();
        let basis = self.basis(&norm)?;
        let id = self.id_slice(&norm, 3, InvolutionKind::Star)?;
        let i = self.consequence_slice(&norm)?;
        let b = basis.subspace("B").expect("B is computed with the basis");
        let i_b = i.intersection(b);
        let id_b = id.intersection(b);
        let slices_equal = *i == *id;
        let contained = id.contains_subspace(&i);
        let witness = if slices_equal {
            None
        } else {
            id.rows()
                .into_iter()
                .find(|r| !i.contains(r))
                .map(|r| basis.to_poly(r))
                .or_else(|| i.rows().into_iter().find(|r| !id.contains(r)).map(|r| basis.to_poly(r)))
        };
        let case = classify(&norm, self.field);
        let mut family = None;
        if let Some(c) = case {
            let fam = standard_generators(c, &norm, self.field)?;
            let mut together = i_b.clone();
            for p in fam.polys() {
                together.insert(basis.to_vec(p)?);
            }
            let independence = family_independence(&fam)?;
            family = Some(FamilyCheck {
                size: fam.len(),
                spans_with_i: together.rank() == b.rank(),
                independence,
            });
        }
        Ok(MainTheoremReport {
            multidegree: norm,
            field: self.field,
            case,
            words: basis.dim(),
            dim_b: b.rank(),
            dim_i: i.rank(),
            dim_id: id.rank(),
            dim_i_b: i_b.rank(),
            dim_id_b: id_b.rank(),
            slices_equal: slices_equal && contained,
            family,
            witness,
        })
    }
}

/// Which linear functionals of an evaluated matrix to record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMap {
    /// Every entry.
    Full,
    /// Off-diagonal entries and `d_ii − d_11`: zero exactly on scalar matrices.
    Central,
}

fn matrix_functionals(
    m: &UTMatrix,
    map: EvalMap,
    columns: &mut HashMap<(usize, usize, CMonomial), usize>,
) -> SparseVec {
    let mut pairs = Vec::new();
    let mut col = |key: (usize, usize, CMonomial), c: Scalar, pairs: &mut Vec<(usize, Scalar)>| {
        let next = columns.len();
        let idx = *columns.entry(key).or_insert(next);
        pairs.push((idx, c));
    };
    for (i, j, p) in m.nonzero_entries() {
        if map == EvalMap::Central && i == j {
            continue;
        }
        for (mono, c) in p.terms() {
            col((i, j, mono.clone()), c.clone(), &mut pairs);
        }
    }
    if map == EvalMap::Central {
        let d11 = m.entry(1, 1);
        for i in 2..=m.size() {
            let diff = &m.entry(i, i) - &d11;
            for (mono, c) in diff.terms() {
                col((i, i, mono.clone()), c.clone(), &mut pairs);
            }
        }
    }
    sparse_from_pairs(pairs)
}

/// One row per word of the component: the chosen functionals of its value on
/// fully generic matrices.
pub fn evaluation_rows(
    basis: &ComponentBasis,
    n: usize,
    kind: InvolutionKind,
    map: EvalMap,
) -> Result<Vec<SparseVec>> {
    let vars = basis.multidegree.variables();
    let assign = generic_assignment(&vars, n, kind, basis.field())?;
    let values = evaluate_words(basis.words(), &assign, n, basis.field())?;
    let mut columns = HashMap::new();
    Ok(values.iter().map(|m| matrix_functionals(m, map, &mut columns)).collect())
}

/// The polynomials `c_i · row_i` of one component, summing to that component.
#[derive(Debug, Clone)]
pub struct CertificatePart {
    pub multidegree: MultiDegree,
    pub rows: Vec<(Scalar, FreePoly)>,
}

#[derive(Debug, Clone)]
pub struct Certificate {
    pub parts: Vec<CertificatePart>,
}

impl Certificate {
    pub fn reconstruct(&self, field: FieldSpec) -> FreePoly {
        let mut out = FreePoly::zero(field);
        for part in &self.parts {
            for (c, p) in &part.rows {
                out = &out + &p.scale(c);
            }
        }
        out
    }

    pub fn row_count(&self) -> usize {
        self.parts.iter().map(|p| p.rows.len()).sum()
    }
}

#[derive(Debug, Clone)]
pub enum Membership {
    Member(Certificate),
    /// The first failing component and the part of it outside `I`.
    NotMember { component: MultiDegree, residue: FreePoly },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member(_))
    }
}

/// Rank of the evaluation images of a standard family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Independence {
    pub size: usize,
    pub rank: usize,
    /// `"qgeneric"`, `"sgeneric"`, or `"generic"` when the specialized
    /// matrices were not enough and fully generic ones were used.
    pub matrices: &'static str,
}

impl Independence {
    pub fn is_independent(&self) -> bool {
        self.rank == self.size
    }
}

fn image_rank(fam: &StandardFamily, field: FieldSpec, assign: &BTreeMap<FreeVar, UTMatrix>) -> Result<usize> {
    let mut columns = HashMap::new();
    let mut rows = Vec::new();
    for p in fam.polys() {
        let m = evaluate(p, assign, InvolutionKind::Star)?;
        rows.push(matrix_functionals(&m, EvalMap::Full, &mut columns));
    }
    Ok(crate::linalg::rank(field, columns.len(), rows))
}

/// Evaluates the family on the specialized matrices of its case; falls back
/// to fully generic matrices if that rank is short.
pub fn family_independence(fam: &StandardFamily) -> Result<Independence> {
    let size = fam.len();
    let name = if fam.case.uses_qgeneric() { "qgeneric" } else { "sgeneric" };
    let Some(field) = fam.members.first().map(|m| m.poly.field()) else {
        return Ok(Independence { size, rank: 0, matrices: name });
    };
    let vars = fam.multidegree.variables();
    let assign: BTreeMap<FreeVar, UTMatrix> = if fam.case.uses_qgeneric() {
        vars.iter().map(|&v| (v, qgeneric_for(v, field))).collect()
    } else {
        vars.iter().map(|&v| (v, sgeneric_for(v, field))).collect()
    };
    let rank = image_rank(fam, field, &assign)?;
    if rank == size {
        return Ok(Independence { size, rank, matrices: name });
    }
    let generic = generic_assignment(&vars, 3, InvolutionKind::Star, field)?;
    let rank = image_rank(fam, field, &generic)?;
    Ok(Independence { size, rank, matrices: "generic" })
}

#[derive(Debug, Clone)]
pub struct FamilyCheck {
    pub size: usize,
    /// `I ∩ B` plus the family spans `B`.
    pub spans_with_i: bool,
    pub independence: Independence,
}

#[derive(Debug, Clone)]
pub struct MainTheoremReport {
    pub multidegree: MultiDegree,
    pub field: FieldSpec,
    pub case: Option<CaseTag>,
    pub words: usize,
    pub dim_b: usize,
    pub dim_i: usize,
    pub dim_id: usize,
    pub dim_i_b: usize,
    pub dim_id_b: usize,
    pub slices_equal: bool,
    pub family: Option<FamilyCheck>,
    /// A polynomial in one slice but not the other.
    pub witness: Option<FreePoly>,
}

impl MainTheoremReport {
    pub fn family_count_ok(&self) -> bool {
        self.family.as_ref().is_none_or(|f| self.dim_i_b + f.size == self.dim_b)
    }

    pub fn passed(&self) -> bool {
        self.slices_equal && self.family_count_ok()
    }

    pub fn dims(&self) -> BTreeMap<String, usize> {
        let mut d = BTreeMap::new();
        d.insert("words".into(), self.words);
        d.insert("B".into(), self.dim_b);
        d.insert("I".into(), self.dim_i);
        d.insert("Id".into(), self.dim_id);
        d.insert("I_B".into(), self.dim_i_b);
        d.insert("Id_B".into(), self.dim_id_b);
        if let Some(f) = &self.family {
            d.insert("family".into(), f.size);
            d.insert("family_rank".into(), f.independence.rank);
        }
        d
    }
}

/// Result of [`central_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Centrality {
    Identity,
    CentralNontrivial(Scalar),
    NotCentral,
}

/// Splits `f = f_0 + λ` and classifies by the generic value of `f_0`.
pub fn central_check(f: &FreePoly, n: usize, kind: InvolutionKind) -> Result<Centrality> {
    kind.check_size(n)?;
    let lambda = f.constant_term();
    let f0 = f.without_constant();
    let vars: Vec<FreeVar> = f0.variables().into_iter().collect();
    let assign = generic_assignment(&vars, n, kind, f.field())?;
    let value = if vars.is_empty() {
        UTMatrix::zero(n, f.field())
    } else {
        evaluate(&f0, &assign, kind)?
    };
    if value.is_zero() {
        if lambda.is_zero() {
            Ok(Centrality::Identity)
        } else {
            Ok(Centrality::CentralNontrivial(lambda))
        }
    } else if value.is_scalar_matrix() {
        Ok(Centrality::CentralNontrivial(lambda))
    } else {
        Ok(Centrality::NotCentral)
    }
}

/// Nondecreasing sequences of positive integers summing to `total`.
fn partitions(total: u32, min: u32) -> Vec<Vec<u32>> {
    if total == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in min.max(1)..=total {
        for mut rest in partitions(total - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Every sorted nonzero multidegree of total degree at most `max_total`.
pub fn sorted_multidegrees(max_total: u32) -> Vec<MultiDegree> {
    let mut out = Vec::new();
    for total in 1..=max_total {
        for m in 0..=total {
            for ys in partitions(m, 1) {
                for zs in partitions(total - m, 1) {
                    out.push(MultiDegree::new(ys.clone(), zs));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CentralComponent {
    pub multidegree: MultiDegree,
    pub identities: usize,
    pub central: usize,
}

impl CentralComponent {
    pub fn passed(&self) -> bool {
        self.identities == self.central
    }
}

/// Per component: the kernel of the central functionals against the kernel
/// of full evaluation. Equality everywhere means every central polynomial
/// without constant term is an identity.
pub fn verify_central_theorem(
    n: usize,
    kind: InvolutionKind,
    field: FieldSpec,
    max_total: u32,
    cap: usize,
) -> Result<Vec<CentralComponent>> {
    kind.check_size(n)?;
    let mut out = Vec::new();
    for md in sorted_multidegrees(max_total) {
        let basis = ComponentBasis::new(&md, field, cap)?;
        let full = left_kernel(field, &evaluation_rows(&basis, n, kind, EvalMap::Full)?);
        let central = left_kernel(field, &evaluation_rows(&basis, n, kind, EvalMap::Central)?);
        assert!(central.contains_subspace(&full));
        out.push(CentralComponent {
            multidegree: md,
            identities: full.rank(),
            central: central.rank(),
        });
    }
    Ok(out)
}

/// Basis of the central polynomials without constant term in one component.
pub fn central_slice(basis: &ComponentBasis, n: usize, kind: InvolutionKind) -> Result<Vec<FreePoly>> {
    let central = left_kernel(basis.field(), &evaluation_rows(basis, n, kind, EvalMap::Central)?);
    Ok(central.rows().into_iter().map(|r| basis.to_poly(r)).collect())
}

/// Outcome of exhaustive evaluation over `UT_n(F_p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteForce {
    pub identity: bool,
    pub central: bool,
    pub tuples: u128,
    /// A tuple (one dense matrix per variable) where the value is not scalar,
    /// or else one where it is nonzero.
    pub witness: Option<Vec<(FreeVar, Vec<u64>)>>,
}

/// Default cap on the number of enumerated tuples.
pub const BRUTE_FORCE_CAP: u128 = 100_000_000;

type Dense = Vec<u64>;

fn dense_mul(a: &Dense, b: &Dense, n: usize, p: u64) -> Dense {
    let mut c = vec![0u64; n * n];
    for i in 0..n {
        for k in i..n {
            let x = a[i * n + k];
            if x == 0 {
                continue;
            }
            for j in k..n {
                c[i * n + j] = (c[i * n + j] + x * b[k * n + j]) % p;
            }
        }
    }
    c
}

/// All elements of the span of `basis` over `F_p`, as dense matrices.
fn span_elements(basis: &[crate::matrep::IntMatrix], n: usize, p: u64) -> Vec<Dense> {
    let mut out = vec![vec![0u64; n * n]];
    for b in basis {
        let mut next = Vec::with_capacity(out.len() * p as usize);
        for m in &out {
            for c in 0..p {
                let mut x = m.clone();
                for &((i, j), v) in &b.entries {
                    let v = v.rem_euclid(p as i64) as u64;
                    let k = (i - 1) * n + (j - 1);
                    x[k] = (x[k] + c * v) % p;
                }
                next.push(x);
            }
        }
        out = next;
    }
    out
}

/// Evaluates `f` on every tuple of symmetric/skew elements of `UT_n(F_p)`.
pub fn brute_force_finite(f: &FreePoly, n: usize, kind: InvolutionKind, cap: u128) -> Result<BruteForce> {
    let field = f.field();
    let p = field.characteristic();
    if p == 0 {
        return Err(TIdealError::FieldMismatch {
            expected: FieldSpec::new(3).expect("prime"),
            found: field,
        });
    }
    let (sym, skew) = sym_skew_bases(n, kind)?;
    let vars: Vec<FreeVar> = f.variables().into_iter().collect();
    let mut tuples: u128 = 1;
    for v in &vars {
        let d = if v.kind == VarKind::Y { sym.len() } else { skew.len() };
        tuples = tuples.saturating_mul((p as u128).saturating_pow(d as u32));
    }
    if tuples > cap {
        return Err(TIdealError::EnumerationTooLarge { tuples, cap });
    }
    let sym_el = span_elements(&sym, n, p);
    let skew_el = span_elements(&skew, n, p);
    let pools: Vec<&Vec<Dense>> = vars
        .iter()
        .map(|v| if v.kind == VarKind::Y { &sym_el } else { &skew_el })
        .collect();
    let pos: HashMap<FreeVar, usize> = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let terms: Vec<(Vec<usize>, u64)> = f
        .terms()
        .map(|(w, c)| {
            let idx = w.letters().iter().map(|v| pos[v]).collect();
            (idx, c.to_i64().expect("residue") as u64)
        })
        .collect();
    let mut identity = true;
    let mut central = true;
    let mut witness = None;
    let mut counter = vec![0usize; vars.len()];
    let mut identity_mat = vec![0u64; n * n];
    for i in 0..n {
        identity_mat[i * n + i] = 1;
    }
    loop {
        let mut value = vec![0u64; n * n];
        for (idx, c) in &terms {
            let mut m = identity_mat.clone();
            for &k in idx {
                m = dense_mul(&m, &pools[k][counter[k]], n, p);
            }
            for (a, b) in value.iter_mut().zip(&m) {
                *a = (*a + c * b) % p;
            }
        }
        let nonzero = value.iter().any(|&x| x != 0);
        let scalar = (0..n).all(|i| (0..n).all(|j| if i == j { value[i * n + i] == value[0] } else { value[i * n + j] == 0 }));
        let snapshot = || vars.iter().zip(&counter).map(|(v, &k)| (*v, pools[pos[v]][k].clone())).collect();
        if !scalar && central {
            central = false;
            witness = Some(snapshot());
        }
        if nonzero && identity {
            identity = false;
            if witness.is_none() {
                witness = Some(snapshot());
            }
        }
        if !identity && !central {
            break;
        }
        // odometer
        let mut k = 0;
        loop {
            if k == counter.len() {
                return Ok(BruteForce { identity, central, tuples, witness });
            }
            counter[k] += 1;
            if counter[k] < pools[k].len() {
                break;
            }
            counter[k] = 0;
            k += 1;
        }
    }
    Ok(BruteForce { identity, central, tuples, witness })
}
