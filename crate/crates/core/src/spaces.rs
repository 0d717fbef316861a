//! Multihomogeneous components, the Y-proper subspace, the block-collapse map,
//! and the standard families spanning each quotient.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::freealg::{left_normed, FreePoly, FreeVar, MultiDegree, VarKind, Word};
use crate::linalg::{left_kernel, sparse_from_pairs, Echelon, SparseVec};
use crate::scalars::{FieldSpec, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpacesError {
    #[error("component {md} has {words} words, above the cap of {cap}")]
    ComponentTooLarge { md: Box<MultiDegree>, words: u128, cap: usize },
    #[error("word {word} is not in component {md}")]
    WrongComponent { word: Box<Word>, md: Box<MultiDegree> },
    #[error("polynomial is not multilinear in the expected variables for {0}")]
    DegreeMismatch(String),
    #[error("case {case} does not apply to multidegree {md}")]
    CaseShapeMismatch { case: CaseTag, md: Box<MultiDegree> },
}

/// All distinct words with the given multidegree, in word order.
pub fn component_words(md: &MultiDegree) -> Vec<Word> {
    let mut letters = md.letters();
    let mut out = vec![Word::from_letters(letters.iter().copied())];
    // next lexicographic permutation of a multiset
    loop {
        let n = letters.len();
        if n < 2 {
            break;
        }
        let Some(i) = (0..n - 1).rev().find(|&i| letters[i] < letters[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| letters[j] > letters[i]).expect("successor");
        letters.swap(i, j);
        letters[i + 1..].reverse();
        out.push(Word::from_letters(letters.iter().copied()));
    }
    out
}

/// The words of one multihomogeneous component, used as coordinates, plus
/// named subspaces in reduced row echelon form.
#[derive(Debug, Clone)]
pub struct ComponentBasis {
    pub multidegree: MultiDegree,
    field: FieldSpec,
    words: Vec<Word>,
    index: HashMap<Word, usize>,
    pub subspaces: BTreeMap<String, Echelon>,
}

impl ComponentBasis {
    pub fn new(md: &MultiDegree, field: FieldSpec, cap: usize) -> Result<Self, SpacesError> {
        let count = md.word_count();
        if count > cap as u128 {
            return Err(SpacesError::ComponentTooLarge {
                md: Box::new(md.clone()),
                words: count,
                cap,
            });
        }
        let words = component_words(md);
        let index = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let mut subspaces = BTreeMap::new();
        subspaces.insert("FULL".to_string(), Echelon::full(field, words.len()));
        Ok(ComponentBasis {
            multidegree: md.clone(),
            field,
            words,
            index,
            subspaces,
        })
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.words.len()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn index_of(&self, w: &Word) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn to_vec(&self, f: &FreePoly) -> Result<SparseVec, SpacesError> {
        let mut pairs = Vec::with_capacity(f.term_count());
        for (w, c) in f.terms() {
            let i = self.index_of(w).ok_or_else(|| SpacesError::WrongComponent {
                word: Box::new(w.clone()),
                md: Box::new(self.multidegree.clone()),
            })?;
            pairs.push((i, c.clone()));
        }
        pairs.sort_by_key(|(i, _)| *i);
        Ok(pairs)
    }

    pub fn to_poly(&self, v: &[(usize, Scalar)]) -> FreePoly {
        FreePoly::from_terms(self.field, v.iter().map(|(i, c)| (self.words[*i].clone(), c.clone())))
    }

    pub fn subspace(&self, name: &str) -> Option<&Echelon> {
        self.subspaces.get(name)
    }
}

/// Linear functionals cutting out the Y-proper polynomials: `y_i ↦ y_i + 1`
/// must change nothing, for every `y_i`.
pub fn y_proper_space(basis: &ComponentBasis) -> Echelon {
    let md = &basis.multidegree;
    let ys: Vec<FreeVar> = md.variables().into_iter().filter(|v| v.kind == VarKind::Y).collect();
    if ys.is_empty() {
        return Echelon::full(basis.field(), basis.dim());
    }
    let mut columns: HashMap<(u32, Word), usize> = HashMap::new();
    let rows: Vec<SparseVec> = basis
        .words()
        .iter()
        .map(|w| {
            let single = FreePoly::word(basis.field(), w.clone());
            let mut pairs = Vec::new();
            for v in &ys {
                for (w2, c) in single.y_proper_shift(v.index).terms() {
                    let next = columns.len();
                    let col = *columns.entry((v.index, w2.clone())).or_insert(next);
                    pairs.push((col, c.clone()));
                }
            }
            sparse_from_pairs(pairs)
        })
        .collect();
    left_kernel(basis.field(), &rows)
}

/// The component together with its Y-proper subspace, stored as `"B"`.
pub fn proper_subspace(md: &MultiDegree, field: FieldSpec, cap: usize) -> Result<ComponentBasis, SpacesError> {
    let mut basis = ComponentBasis::new(md, field, cap)?;
    let b = y_proper_space(&basis);
    basis.subspaces.insert("B".to_string(), b);
    Ok(basis)
}

pub fn is_y_proper(f: &FreePoly) -> bool {
    let ys: BTreeSet<u32> = f
        .variables()
        .into_iter()
        .filter(|v| v.kind == VarKind::Y)
        .map(|v| v.index)
        .collect();
    ys.into_iter().all(|i| f.y_proper_shift(i).is_zero())
}

fn compositions(total: usize, min_part: usize) -> Vec<Vec<usize>> {
    if total == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in min_part..=total {
        for mut rest in compositions(total - first, min_part) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Span of every `z`-word times a product of left-normed commutators, over
/// all letter orders: the other description of the Y-proper subspace.
pub fn commutator_span(basis: &ComponentBasis) -> Echelon {
    let field = basis.field();
    let mut span = Echelon::new(field, basis.dim());
    for w in basis.words() {
        let letters = w.letters();
        let prefix_max = letters.iter().take_while(|v| v.kind == VarKind::Z).count();
        for t in 0..=prefix_max {
            for parts in compositions(letters.len() - t, 2) {
                let mut poly = FreePoly::word(field, Word::from_letters(letters[..t].iter().copied()));
                let mut at = t;
                for len in parts {
                    let args: Vec<FreePoly> =
                        letters[at..at + len].iter().map(|&v| FreePoly::var(field, v)).collect();
                    poly = &poly * &left_normed(&args).expect("length at least two");
                    at += len;
                }
                if !poly.is_zero() {
                    span.insert(basis.to_vec(&poly).expect("same component"));
                }
            }
        }
    }
    span
}

/// Collapses the multilinear `f(y_1..y_m, z_1..z_n)` block by block: the first
/// `m_1` of the `y`s become `y_1`, the next `m_2` become `y_2`, and so on.
pub fn phi_map(f: &FreePoly, md: &MultiDegree) -> Result<FreePoly, SpacesError> {
    let (m, n) = (md.y_total(), md.z_total());
    let expected = MultiDegree::new(vec![1; m as usize], vec![1; n as usize]);
    for (w, _) in f.terms() {
        if w.multidegree() != expected {
            return Err(SpacesError::DegreeMismatch(md.to_string()));
        }
    }
    let mut map = BTreeMap::new();
    let mut blocks = |degs: &[u32], make: fn(u32) -> FreeVar| {
        let mut next = 1;
        for (b, &d) in degs.iter().enumerate() {
            for _ in 0..d {
                map.insert(make(next), make(b as u32 + 1));
                next += 1;
            }
        }
    };
    blocks(&md.ydegs, FreeVar::y);
    blocks(&md.zdegs, FreeVar::z);
    Ok(f.rename(&map))
}

/// Which family describes a component, after sorting its degrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseTag {
    M0,
    ZeroN,
    M1,
    OneNGe3,
    OneN1,
    MNGeneral,
    MNChar3,
}

impl CaseTag {
    pub fn name(self) -> &'static str {
        match self {
            CaseTag::M0 => "M0",
            CaseTag::ZeroN => "ZeroN",
            CaseTag::M1 => "M1",
            CaseTag::OneNGe3 => "OneN-ns-ge-3",
            CaseTag::OneN1 => "OneN-ns-1",
            CaseTag::MNGeneral => "MN-general",
            CaseTag::MNChar3 => "MN-char3",
        }
    }

    pub fn from_name(s: &str) -> Option<CaseTag> {
        [
            CaseTag::M0,
            CaseTag::ZeroN,
            CaseTag::M1,
            CaseTag::OneNGe3,
            CaseTag::OneN1,
            CaseTag::MNGeneral,
            CaseTag::MNChar3,
        ]
        .into_iter()
        .find(|c| c.name().eq_ignore_ascii_case(s))
    }

    /// Name of the monomial order used with this case.
    pub fn order_preset(self, md: &MultiDegree) -> &'static str {
        let m = md.y_total();
        let n1 = md.zdegs.first().copied().unwrap_or(0);
        let mk = md.ydegs.last().copied().unwrap_or(0);
        match self {
            CaseTag::M0 => "M0",
            CaseTag::ZeroN => "0N",
            CaseTag::M1 => "M1",
            CaseTag::OneNGe3 | CaseTag::OneN1 => "B1N-ns-ge-3",
            CaseTag::MNChar3 => "MN-char3",
            CaseTag::MNGeneral => match (m.is_multiple_of(2), n1 > 1) {
                (true, true) => "MN-even-n1-gt-1",
                (true, false) => "MN-even-n1-eq-1",
                (false, true) => "MN-odd-n1-gt-1",
                (false, false) if mk > 1 => "MN-odd-n1-eq-1-mk-gt-1",
                (false, false) => "MN-odd-n1-gt-1",
            },
        }
    }

    /// Whether the case's basis argument runs on the `(2,2)`-free matrices
    /// (otherwise on the ones with unit corners).
    pub fn uses_qgeneric(self) -> bool {
        matches!(self, CaseTag::M0 | CaseTag::ZeroN | CaseTag::M1 | CaseTag::OneNGe3 | CaseTag::OneN1)
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn shape_matches(case: CaseTag, md: &MultiDegree) -> bool {
    let (m, n) = (md.y_total(), md.z_total());
    let single_y = md.ydegs == [1];
    let ns = md.zdegs.last().copied().unwrap_or(0);
    match case {
        CaseTag::M0 => m > 0 && n == 0,
        CaseTag::ZeroN => m == 0 && n > 0,
        CaseTag::M1 => m > 1 && md.zdegs == [1],
        CaseTag::OneNGe3 => single_y && ns >= 3,
        CaseTag::OneN1 => single_y && n > 0 && ns == 1,
        CaseTag::MNGeneral => m >= 2 && n >= 2,
        CaseTag::MNChar3 => {
            m >= 2 && n >= 2 && m % 2 == 1 && md.zdegs[0] == 1 && md.ydegs.last() == Some(&1)
        }
    }
}

/// The case for a sorted multidegree, or `None` when no family is defined
/// (the zero multidegree, and one `y` with `n_s = 2`).
pub fn classify(md: &MultiDegree, field: FieldSpec) -> Option<CaseTag> {
    if !md.is_normalized() || md.is_zero() {
        return None;
    }
    let order = [
        CaseTag::M0,
        CaseTag::ZeroN,
        CaseTag::OneNGe3,
        CaseTag::OneN1,
        CaseTag::M1,
    ];
    if let Some(c) = order.into_iter().find(|c| shape_matches(*c, md)) {
        return Some(c);
    }
    if field.characteristic() == 3 && shape_matches(CaseTag::MNChar3, md) {
        return Some(CaseTag::MNChar3);
    }
    if shape_matches(CaseTag::MNGeneral, md) {
        return Some(CaseTag::MNGeneral);
    }
    None
}

/// `z_{i_1}…z_{i_t}[c_1][c_2]` with empty brackets omitted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct StdShape {
    pub prefix: Vec<FreeVar>,
    pub c1: Vec<FreeVar>,
    pub c2: Vec<FreeVar>,
}

impl StdShape {
    pub fn to_poly(&self, field: FieldSpec) -> FreePoly {
        let mut p = FreePoly::word(field, Word::from_letters(self.prefix.iter().copied()));
        for c in [&self.c1, &self.c2] {
            if !c.is_empty() {
                let args: Vec<FreePoly> = c.iter().map(|&v| FreePoly::var(field, v)).collect();
                p = &p * &left_normed(&args).expect("length at least two");
            }
        }
        p
    }
}

impl fmt::Display for StdShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.prefix {
            write!(f, "{v}")?;
        }
        for c in [&self.c1, &self.c2] {
            if !c.is_empty() {
                let parts: Vec<String> = c.iter().map(|v| v.to_string()).collect();
                write!(f, "[{}]", parts.join(","))?;
            }
        }
        if self.prefix.is_empty() && self.c1.is_empty() {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// Sub-multisets of `letters` (sorted) of size `k`.
fn sub_multisets(letters: &[FreeVar], k: usize) -> Vec<Vec<FreeVar>> {
    let mut counts: Vec<(FreeVar, usize)> = Vec::new();
    for &v in letters {
        match counts.last_mut() {
            Some((w, c)) if *w == v => *c += 1,
            _ => counts.push((v, 1)),
        }
    }
    fn go(counts: &[(FreeVar, usize)], k: usize, acc: &mut Vec<FreeVar>, out: &mut Vec<Vec<FreeVar>>) {
        if k == 0 {
            out.push(acc.clone());
            return;
        }
        let Some(((v, c), rest)) = counts.split_first() else {
            return;
        };
        for take in (0..=(*c).min(k)).rev() {
            for _ in 0..take {
                acc.push(*v);
            }
            go(rest, k - take, acc, out);
            for _ in 0..take {
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(&counts, k, &mut Vec::new(), &mut out);
    out
}

fn minus(letters: &[FreeVar], remove: &[FreeVar]) -> Vec<FreeVar> {
    let mut out = letters.to_vec();
    for r in remove {
        let i = out.iter().position(|v| v == r).expect("sub-multiset");
        out.remove(i);
    }
    out
}

/// Commutators `[a, b, c, …]` over a multiset with `a > b ≤ c ≤ …`.
fn standard_commutators(letters: &[FreeVar]) -> Vec<Vec<FreeVar>> {
    let mut out = Vec::new();
    if letters.len() < 2 {
        return out;
    }
    let distinct: BTreeSet<FreeVar> = letters.iter().copied().collect();
    for a in distinct {
        let mut rest = minus(letters, &[a]);
        rest.sort();
        if a > rest[0] {
            let mut c = vec![a];
            c.extend(rest);
            out.push(c);
        }
    }
    out
}

/// Every polynomial `z_{i_1}…z_{i_t}[x_{j_1},…,x_{j_l}][x_{k_1},…,x_{k_q}]` of the
/// component with nondecreasing `z` prefix, `x_{j_1} > x_{j_2} ≤ x_{j_3} ≤ …`
/// (likewise for `k`), and, when both brackets appear, `q = 2`,
/// `x_{j_1} ≥ x_{k_1}`, `x_{j_2} ≥ x_{k_2}`.
pub fn s2_shapes(md: &MultiDegree) -> Vec<StdShape> {
    let letters = md.letters();
    let zs: Vec<FreeVar> = letters.iter().copied().filter(|v| v.kind == VarKind::Z).collect();
    let mut out = Vec::new();
    for t in 0..=zs.len() {
        for prefix in sub_multisets(&zs, t) {
            let rest = minus(&letters, &prefix);
            if rest.is_empty() {
                out.push(StdShape { prefix: prefix.clone(), c1: vec![], c2: vec![] });
                continue;
            }
            for c1 in standard_commutators(&rest) {
                out.push(StdShape { prefix: prefix.clone(), c1, c2: vec![] });
            }
            if rest.len() >= 4 {
                let mut sorted = rest.clone();
                sorted.sort();
                for pair in sub_multisets(&sorted, 2) {
                    if pair[0] == pair[1] {
                        continue;
                    }
                    let c2 = vec![pair[1], pair[0]];
                    for c1 in standard_commutators(&minus(&rest, &pair)) {
                        if c1[0] >= c2[0] && c1[1] >= c2[1] {
                            out.push(StdShape { prefix: prefix.clone(), c1, c2: c2.clone() });
                        }
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// One member of a standard family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StdMember {
    pub label: String,
    pub poly: FreePoly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandardFamily {
    pub case: CaseTag,
    pub multidegree: MultiDegree,
    pub members: Vec<StdMember>,
}

impl StandardFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn polys(&self) -> impl Iterator<Item = &FreePoly> {
        self.members.iter().map(|m| &m.poly)
    }
}

fn from_shapes<I: IntoIterator<Item = StdShape>>(shapes: I, field: FieldSpec) -> Vec<StdMember> {
    shapes
        .into_iter()
        .map(|s| StdMember {
            label: s.to_string(),
            poly: s.to_poly(field),
        })
        .collect()
}

fn is_z(v: FreeVar) -> bool {
    v.kind == VarKind::Z
}

/// The shapes kept in the mixed case: `[z,z_1,…]`, `[y,z_1,…]`, `z_i[z,…]`
/// with `z_i` at most the bracket head, `z_i[y,…]`, and `[y,…][y,z_1]`.
fn mn_family_shapes(md: &MultiDegree) -> Vec<StdShape> {
    let z1 = FreeVar::z(1);
    s2_shapes(md)
        .into_iter()
        .filter(|s| match (s.prefix.len(), s.c1.is_empty(), s.c2.len()) {
            (0, false, 0) => s.c1[1] == z1,
            (1, false, 0) => !is_z(s.c1[0]) || s.prefix[0] <= s.c1[0],
            (0, false, 2) => !is_z(s.c1[0]) && !is_z(s.c2[0]) && s.c2[1] == z1,
            _ => false,
        })
        .collect()
}

fn z_power_word(exps: &[i64]) -> Option<Vec<FreeVar>> {
    let mut out = Vec::new();
    for (i, &e) in exps.iter().enumerate() {
        if e < 0 {
            return None;
        }
        for _ in 0..e {
            out.push(FreeVar::z(i as u32 + 1));
        }
    }
    Some(out)
}

fn one_n_family(md: &MultiDegree, field: FieldSpec, ge3: bool) -> Vec<StdMember> {
    let ns: Vec<i64> = md.zdegs.iter().map(|&d| d as i64).collect();
    let s = ns.len();
    let y1 = FreePoly::var(field, FreeVar::y(1));
    let z = |i: usize| FreePoly::var(field, FreeVar::z(i as u32));
    let word = |ex: &[i64]| z_power_word(ex).map(|w| FreePoly::word(field, Word::from_letters(w)));
    let lowered = |drops: &[usize]| {
        let mut ex = ns.clone();
        for &d in drops {
            ex[d - 1] -= 1;
        }
        ex
    };
    let yz = |j: usize| &(&y1 * &z(j)) - &(&z(j) * &y1);
    let mut members: Vec<StdMember> = Vec::new();
    let mut push = |label: String, poly: Option<FreePoly>| {
        if let Some(p) = poly {
            if !members.iter().any(|m| m.poly == p) {
                members.push(StdMember { label, poly: p });
            }
        }
    };
    for j in 1..=s {
        push(format!("f({j})"), word(&lowered(&[j])).map(|w| &w * &yz(j)));
    }
    for j in 1..=s {
        push(format!("g({j})"), word(&lowered(&[j])).map(|w| &yz(j) * &w));
    }
    let h = |j: usize| word(&lowered(&[j, s])).map(|w| &(&w * &yz(j)) * &z(s));
    if ge3 {
        push(format!("h({s})"), h(s));
        for j in 1..=s {
            for i in 1..=j.min(s - 1) {
                let p = word(&lowered(&[i, j, s]))
                    .map(|w| &(&w * &(&(&z(s) * &z(i)) - &(&z(i) * &z(s)))) * &yz(j));
                push(format!("p({i},{j})"), p);
            }
        }
    } else {
        for j in 1..=s {
            push(format!("h({j})"), h(j));
        }
        for j in 1..s {
            for i in 1..=j {
                let f = word(&lowered(&[i, j])).map(|w| &(&w * &z(i)) * &yz(j));
                push(format!("f({i},{j})"), f);
            }
        }
    }
    members
}

/// The standard family of `case` on a sorted multidegree.
pub fn standard_generators(case: CaseTag, md: &MultiDegree, field: FieldSpec) -> Result<StandardFamily, SpacesError> {
    if !md.is_normalized() || !shape_matches(case, md) {
        return Err(SpacesError::CaseShapeMismatch { case, md: Box::new(md.clone()) });
    }
    let members = match case {
        CaseTag::M0 => from_shapes(s2_shapes(md), field),
        // [y,z_1,…], z_1[y,…], [y,…][y,z_1]
        CaseTag::M1 => from_shapes(
            s2_shapes(md).into_iter().filter(|s| s.prefix.is_empty() || s.c2.is_empty()),
            field,
        ),
        CaseTag::ZeroN => from_shapes(
            s2_shapes(md).into_iter().filter(|s| match (s.prefix.len(), s.c1.len()) {
                (_, 0) => true,
                (0, _) => s.c2.is_empty(),
                (1, _) => s.c2.is_empty() && s.prefix[0] <= s.c1[0],
                _ => false,
            }),
            field,
        ),
        CaseTag::OneNGe3 => one_n_family(md, field, true),
        CaseTag::OneN1 => one_n_family(md, field, false),
        CaseTag::MNGeneral => {
            let odd_corner = md.y_total() % 2 == 1 && md.zdegs[0] == 1 && md.ydegs.last() == Some(&1);
            let s = md.zdegs.len() as u32;
            if odd_corner && s > 1 && md.zdegs[s as usize - 1] > 1 {
                // build on z_1 ↔ z_s, then swap back
                let mut swapped = md.zdegs.clone();
                swapped.swap(0, s as usize - 1);
                let smd = MultiDegree::new(md.ydegs.clone(), swapped);
                let swap: BTreeMap<FreeVar, FreeVar> =
                    [(FreeVar::z(1), FreeVar::z(s)), (FreeVar::z(s), FreeVar::z(1))].into();
                mn_family_shapes(&smd)
                    .into_iter()
                    .map(|sh| StdMember {
                        label: format!("{sh} (z1<->z{s})"),
                        poly: sh.to_poly(field).rename(&swap),
                    })
                    .collect()
            } else {
                from_shapes(mn_family_shapes(md), field)
            }
        }
        CaseTag::MNChar3 => {
            let k = md.ydegs.len() as u32;
            from_shapes(
                mn_family_shapes(md)
                    .into_iter()
                    .filter(|s| !(s.prefix == [FreeVar::z(1)] && s.c1[0] == FreeVar::y(k))),
                field,
            )
        }
    };
    Ok(StandardFamily {
        case,
        multidegree: md.clone(),
        members,
    })
}
