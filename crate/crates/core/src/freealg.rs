//! The free unitary associative algebra `F<Y ∪ Z>` with the involution fixing
//! every `y_i` and negating every `z_i`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use smallvec::SmallVec;
use thiserror::Error;

use crate::scalars::{FieldSpec, Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FreeAlgError {
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("variable {0} has no assigned value")]
    UnassignedVariable(FreeVar),
    #[error("{var} must map to a {expected} polynomial")]
    ParityViolation { var: FreeVar, expected: &'static str },
    #[error("a commutator needs at least two arguments, got {0}")]
    TooFewArguments(usize),
    #[error("invalid multidegree `{0}`")]
    BadMultiDegree(String),
}

/// Which of the two generating sets a variable belongs to. `Z` sorts first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    Z,
    Y,
}

impl VarKind {
    pub fn letter(self) -> char {
        match self {
            VarKind::Y => 'y',
            VarKind::Z => 'z',
        }
    }
}

/// A free generator `y_i` or `z_i` (`i ≥ 1`).
///
/// The derived order is `z_1 < z_2 < … < y_1 < y_2 < …`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FreeVar {
    pub kind: VarKind,
    pub index: u32,
}

impl FreeVar {
    pub fn y(index: u32) -> Self {
        assert!(index >= 1, "variable indices start at 1");
        FreeVar { kind: VarKind::Y, index }
    }

    pub fn z(index: u32) -> Self {
        assert!(index >= 1, "variable indices start at 1");
        FreeVar { kind: VarKind::Z, index }
    }

    pub fn is_symmetric(self) -> bool {
        self.kind == VarKind::Y
    }
}

impl fmt::Display for FreeVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.letter(), self.index)
    }
}

/// A monomial of the free algebra. The empty word is the unit.
///
/// Words compare by length first, then lexicographically in the variable order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(SmallVec<[FreeVar; 8]>);

impl Word {
    pub fn unit() -> Self {
        Word(SmallVec::new())
    }

    pub fn letter(v: FreeVar) -> Self {
        let mut w = SmallVec::new();
        w.push(v);
        Word(w)
    }

    pub fn from_letters<I: IntoIterator<Item = FreeVar>>(letters: I) -> Self {
        Word(letters.into_iter().collect())
    }

    pub fn letters(&self) -> &[FreeVar] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.0.clone();
        w.extend_from_slice(&other.0);
        Word(w)
    }

    pub fn push(&mut self, v: FreeVar) {
        self.0.push(v);
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn z_count(&self) -> usize {
        self.0.iter().filter(|v| v.kind == VarKind::Z).count()
    }

    /// `w*` is `±` the reversed word; this is the sign.
    pub fn involution_sign(&self) -> i64 {
        if self.z_count().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    pub fn multidegree(&self) -> MultiDegree {
        MultiDegree::from_letters(self.0.iter().copied())
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for v in &self.0 {
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Per-variable degrees `(m_1,…,m_k; n_1,…,n_s)`; trailing zeros are trimmed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MultiDegree {
    pub ydegs: Vec<u32>,
    pub zdegs: Vec<u32>,
}

impl MultiDegree {
    pub fn new(ydegs: Vec<u32>, zdegs: Vec<u32>) -> Self {
        let mut md = MultiDegree { ydegs, zdegs };
        md.trim();
        md
    }

    fn trim(&mut self) {
        while self.ydegs.last() == Some(&0) {
            self.ydegs.pop();
        }
        while self.zdegs.last() == Some(&0) {
            self.zdegs.pop();
        }
    }

    pub fn from_letters<I: IntoIterator<Item = FreeVar>>(letters: I) -> Self {
        let mut md = MultiDegree::default();
        for v in letters {
            md.bump(v, 1);
        }
        md
    }

    fn bump(&mut self, v: FreeVar, by: i64) {
        let degs = match v.kind {
            VarKind::Y => &mut self.ydegs,
            VarKind::Z => &mut self.zdegs,
        };
        let i = (v.index - 1) as usize;
        if degs.len() <= i {
            degs.resize(i + 1, 0);
        }
        degs[i] = (degs[i] as i64 + by) as u32;
        self.trim();
    }

    pub fn degree_of(&self, v: FreeVar) -> u32 {
        let degs = match v.kind {
            VarKind::Y => &self.ydegs,
            VarKind::Z => &self.zdegs,
        };
        degs.get((v.index - 1) as usize).copied().unwrap_or(0)
    }

    pub fn y_total(&self) -> u32 {
        self.ydegs.iter().sum()
    }

    pub fn z_total(&self) -> u32 {
        self.zdegs.iter().sum()
    }

    pub fn total(&self) -> u32 {
        self.y_total() + self.z_total()
    }

    pub fn is_zero(&self) -> bool {
        self.ydegs.is_empty() && self.zdegs.is_empty()
    }

    /// Variables with positive degree, in the variable order.
    pub fn variables(&self) -> Vec<FreeVar> {
        let mut out = Vec::new();
        for (i, &d) in self.zdegs.iter().enumerate() {
            if d > 0 {
                out.push(FreeVar::z(i as u32 + 1));
            }
        }
        for (i, &d) in self.ydegs.iter().enumerate() {
            if d > 0 {
                out.push(FreeVar::y(i as u32 + 1));
            }
        }
        out
    }

    /// The letter multiset, sorted in the variable order.
    pub fn letters(&self) -> Vec<FreeVar> {
        let mut out = Vec::new();
        for v in self.variables() {
            for _ in 0..self.degree_of(v) {
                out.push(v);
            }
        }
        out
    }

    pub fn with(&self, v: FreeVar, delta: i64) -> MultiDegree {
        let mut md = self.clone();
        md.bump(v, delta);
        md
    }

    pub fn contains(&self, other: &MultiDegree) -> bool {
        other
            .variables()
            .into_iter()
            .all(|v| other.degree_of(v) <= self.degree_of(v))
    }

    pub fn minus(&self, other: &MultiDegree) -> MultiDegree {
        let mut md = self.clone();
        for v in other.variables() {
            md.bump(v, -(other.degree_of(v) as i64));
        }
        md
    }

    /// Number of words with this multidegree (a multinomial coefficient).
    pub fn word_count(&self) -> u128 {
        let mut total: u128 = 1;
        let mut n: u128 = 0;
        for d in self.ydegs.iter().chain(self.zdegs.iter()) {
            for k in 1..=*d as u128 {
                n += 1;
                total = total * n / k;
            }
        }
        total
    }

    pub fn is_multilinear(&self) -> bool {
        self.ydegs.iter().chain(self.zdegs.iter()).all(|&d| d <= 1)
    }

    /// Every variable index from 1 up to the block length has positive degree.
    pub fn is_dense(&self) -> bool {
        self.ydegs.iter().chain(self.zdegs.iter()).all(|&d| d > 0)
    }

    /// Weakly increasing, gap-free form of this multidegree, and the renaming
    /// (original variable → normalized variable) that realizes it.
    pub fn normalized(&self) -> (MultiDegree, BTreeMap<FreeVar, FreeVar>) {
        let mut renaming = BTreeMap::new();
        let mut sort_block = |degs: &[u32], kind: VarKind| -> Vec<u32> {
            let mut idx: Vec<usize> = (0..degs.len()).filter(|&i| degs[i] > 0).collect();
            idx.sort_by_key(|&i| (degs[i], i));
            let mut out = Vec::with_capacity(idx.len());
            for (new, &old) in idx.iter().enumerate() {
                renaming.insert(
                    FreeVar { kind, index: old as u32 + 1 },
                    FreeVar { kind, index: new as u32 + 1 },
                );
                out.push(degs[old]);
            }
            out
        };
        let y = sort_block(&self.ydegs, VarKind::Y);
        let z = sort_block(&self.zdegs, VarKind::Z);
        (MultiDegree::new(y, z), renaming)
    }

    pub fn is_normalized(&self) -> bool {
        self.is_dense()
            && self.ydegs.windows(2).all(|w| w[0] <= w[1])
            && self.zdegs.windows(2).all(|w| w[0] <= w[1])
    }

    /// Compact label such as `M111-N11` (an empty side is written `0`).
    pub fn label(&self) -> String {
        let side = |d: &[u32]| -> String {
            if d.is_empty() {
                "0".to_string()
            } else if d.iter().all(|&x| x < 10) {
                d.iter().map(|x| x.to_string()).collect()
            } else {
                d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(".")
            }
        };
        format!("M{}-N{}", side(&self.ydegs), side(&self.zdegs))
    }
}

impl fmt::Display for MultiDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |d: &[u32]| -> String {
            if d.is_empty() {
                "0".to_string()
            } else {
                d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
            }
        };
        write!(f, "({};{})", side(&self.ydegs), side(&self.zdegs))
    }
}

impl FromStr for MultiDegree {
    type Err = FreeAlgError;

    /// Parses `m_1,…,m_k;n_1,…,n_s`, optionally parenthesized; `0` or an empty
    /// side means no variables of that kind.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FreeAlgError::BadMultiDegree(s.to_string());
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (ys, zs) = t.split_once(';').ok_or_else(bad)?;
        let side = |part: &str| -> Result<Vec<u32>, FreeAlgError> {
            let part = part.trim();
            if part.is_empty() {
                return Ok(Vec::new());
            }
            part.split(',')
                .map(|x| x.trim().parse::<u32>().map_err(|_| bad()))
                .collect()
        };
        Ok(MultiDegree::new(side(ys)?, side(zs)?))
    }
}

/// A polynomial of `F<Y ∪ Z>`: a finite map from words to nonzero scalars.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreePoly {
    field: FieldSpec,
    terms: BTreeMap<Word, Scalar>,
}

impl FreePoly {
    pub fn zero(field: FieldSpec) -> Self {
        FreePoly {
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(field: FieldSpec) -> Self {
        Self::constant(field.one())
    }

    pub fn constant(c: Scalar) -> Self {
        Self::monomial(c, Word::unit())
    }

    pub fn var(field: FieldSpec, v: FreeVar) -> Self {
        Self::monomial(field.one(), Word::letter(v))
    }

    pub fn word(field: FieldSpec, w: Word) -> Self {
        Self::monomial(field.one(), w)
    }

    pub fn monomial(c: Scalar, w: Word) -> Self {
        let mut p = FreePoly::zero(c.field());
        if !c.is_zero() {
            p.terms.insert(w, c);
        }
        p
    }

    /// Sums repeated words; panics if a coefficient belongs to another field.
    pub fn from_terms<I: IntoIterator<Item = (Word, Scalar)>>(field: FieldSpec, terms: I) -> Self {
        let mut p = FreePoly::zero(field);
        for (w, c) in terms {
            p.add_term(w, c);
        }
        p
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, w: &Word) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_else(|| self.field.zero())
    }

    /// Adds `c·w` in place.
    pub fn add_term(&mut self, w: Word, c: Scalar) {
        assert_eq!(c.field(), self.field, "coefficient from another field");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    fn check_field(&self, other: &FreePoly) -> Result<(), FreeAlgError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(ScalarError::MixedField(self.field, other.field).into())
        }
    }

    pub fn try_add(&self, other: &FreePoly) -> Result<FreePoly, FreeAlgError> {
        self.check_field(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &FreePoly) -> Result<FreePoly, FreeAlgError> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &FreePoly) -> Result<FreePoly, FreeAlgError> {
        self.check_field(other)?;
        let mut out = FreePoly::zero(self.field);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a.concat(b), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> FreePoly {
        assert_eq!(c.field(), self.field, "scalar from another field");
        if c.is_zero() {
            return FreePoly::zero(self.field);
        }
        FreePoly {
            field: self.field,
            terms: self.terms.iter().map(|(w, a)| (w.clone(), a * c)).collect(),
        }
    }

    pub fn scale_i64(&self, c: i64) -> FreePoly {
        self.scale(&self.field.from_i64(c))
    }

    /// The involution: reverses every word and multiplies it by `(-1)^{#z}`.
    pub fn involution(&self) -> FreePoly {
        let mut out = FreePoly::zero(self.field);
        for (w, c) in &self.terms {
            let c = if w.involution_sign() < 0 { -c } else { c.clone() };
            out.add_term(w.reversed(), c);
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        self.involution() == *self
    }

    pub fn is_skew(&self) -> bool {
        self.involution() == -self
    }

    pub fn variables(&self) -> BTreeSet<FreeVar> {
        self.terms
            .keys()
            .flat_map(|w| w.letters().iter().copied())
            .collect()
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeff(&Word::unit())
    }

    pub fn without_constant(&self) -> FreePoly {
        let mut p = self.clone();
        p.terms.remove(&Word::unit());
        p
    }

    /// Splits `self` by exact per-variable degree.
    pub fn multidegree_components(&self) -> BTreeMap<MultiDegree, FreePoly> {
        let mut out: BTreeMap<MultiDegree, FreePoly> = BTreeMap::new();
        for (w, c) in &self.terms {
            out.entry(w.multidegree())
                .or_insert_with(|| FreePoly::zero(self.field))
                .add_term(w.clone(), c.clone());
        }
        out
    }

    /// Multidegree when `self` is multihomogeneous and nonzero.
    pub fn multidegree(&self) -> Option<MultiDegree> {
        let comps = self.multidegree_components();
        if comps.len() == 1 {
            comps.into_keys().next()
        } else {
            None
        }
    }

    /// Renames variables letter by letter; unmapped variables are kept.
    pub fn rename(&self, map: &BTreeMap<FreeVar, FreeVar>) -> FreePoly {
        let mut out = FreePoly::zero(self.field);
        for (w, c) in &self.terms {
            let w2 = Word::from_letters(w.letters().iter().map(|v| *map.get(v).unwrap_or(v)));
            out.add_term(w2, c.clone());
        }
        out
    }

    /// Algebra endomorphism extending `assignment`.
    pub fn substitute(&self, assignment: &ParityAssignment) -> Result<FreePoly, FreeAlgError> {
        if let Some(v) = self.variables().into_iter().find(|v| !assignment.map.contains_key(v)) {
            return Err(FreeAlgError::UnassignedVariable(v));
        }
        let mut out = FreePoly::zero(self.field);
        for (w, c) in &self.terms {
            let mut acc = FreePoly::constant(c.clone());
            for v in w.letters() {
                acc = acc.try_mul(&assignment.map[v])?;
            }
            out = out.try_add(&acc)?;
        }
        Ok(out)
    }

    /// `f(y_i + 1) − f(y_i)`, all other variables fixed.
    pub fn y_proper_shift(&self, index: u32) -> FreePoly {
        let target = FreeVar::y(index);
        let mut out = FreePoly::zero(self.field);
        for (w, c) in &self.terms {
            let positions: Vec<usize> = w
                .letters()
                .iter()
                .enumerate()
                .filter(|(_, v)| **v == target)
                .map(|(i, _)| i)
                .collect();
            let k = positions.len();
            // every nonempty subset of occurrences is replaced by 1
            for mask in 1u64..(1u64 << k) {
                let drop: Vec<usize> = (0..k)
                    .filter(|b| mask >> b & 1 == 1)
                    .map(|b| positions[b])
                    .collect();
                let w2 = Word::from_letters(
                    w.letters()
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| !drop.contains(i))
                        .map(|(_, v)| *v),
                );
                out.add_term(w2, c.clone());
            }
        }
        out
    }

    /// Leading coefficient in word order (the coefficient of the largest word).
    pub fn leading(&self) -> Option<(&Word, &Scalar)> {
        self.terms.iter().next_back()
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> FreePoly {
        match self.leading() {
            Some((_, c)) => {
                let inv = c.inv().expect("nonzero leading coefficient");
                self.scale(&inv)
            }
            None => self.clone(),
        }
    }
}

/// Terms in word order, e.g. `y1z1 - 1/2 z2y1 + 3`; the zero polynomial prints
/// as `0`. The output reparses to the same polynomial.
impl fmt::Display for FreePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let a = c.abs();
            if w.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{w}")?;
            } else {
                write!(f, "{a} {w}")?;
            }
        }
        Ok(())
    }
}

impl Add for &FreePoly {
    type Output = FreePoly;
    fn add(self, rhs: &FreePoly) -> FreePoly {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Sub for &FreePoly {
    type Output = FreePoly;
    fn sub(self, rhs: &FreePoly) -> FreePoly {
        self.try_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Mul for &FreePoly {
    type Output = FreePoly;
    fn mul(self, rhs: &FreePoly) -> FreePoly {
        self.try_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Neg for &FreePoly {
    type Output = FreePoly;
    fn neg(self) -> FreePoly {
        FreePoly {
            field: self.field,
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect(),
        }
    }
}

impl Add for FreePoly {
    type Output = FreePoly;
    fn add(self, rhs: FreePoly) -> FreePoly {
        &self + &rhs
    }
}

impl Sub for FreePoly {
    type Output = FreePoly;
    fn sub(self, rhs: FreePoly) -> FreePoly {
        &self - &rhs
    }
}

impl Mul for FreePoly {
    type Output = FreePoly;
    fn mul(self, rhs: FreePoly) -> FreePoly {
        &self * &rhs
    }
}

impl Neg for FreePoly {
    type Output = FreePoly;
    fn neg(self) -> FreePoly {
        -&self
    }
}

/// `[a, b] = ab − ba`.
pub fn commutator(a: &FreePoly, b: &FreePoly) -> FreePoly {
    &(a * b) - &(b * a)
}

/// Left-normed commutator `[x_1, …, x_n] = [[x_1, …, x_{n−1}], x_n]`.
pub fn left_normed(args: &[FreePoly]) -> Result<FreePoly, FreeAlgError> {
    if args.len() < 2 {
        return Err(FreeAlgError::TooFewArguments(args.len()));
    }
    let mut acc = args[0].clone();
    for x in &args[1..] {
        acc.check_field(x)?;
        acc = commutator(&acc, x);
    }
    Ok(acc)
}

/// Left-normed commutator of single variables.
pub fn bracket(field: FieldSpec, vars: &[FreeVar]) -> FreePoly {
    let args: Vec<FreePoly> = vars.iter().map(|&v| FreePoly::var(field, v)).collect();
    left_normed(&args).expect("at least two variables")
}

/// Product of single variables.
pub fn word_poly(field: FieldSpec, vars: &[FreeVar]) -> FreePoly {
    FreePoly::word(field, Word::from_letters(vars.iter().copied()))
}

/// `s_3(a, b, c) = a[b, c] − b[a, c] + c[a, b]`.
pub fn standard_s3(a: &FreePoly, b: &FreePoly, c: &FreePoly) -> FreePoly {
    let t1 = a * &commutator(b, c);
    let t2 = b * &commutator(a, c);
    let t3 = c * &commutator(a, b);
    &(&t1 - &t2) + &t3
}

/// Images of variables under a parity-respecting substitution: every `y_i`
/// goes to a symmetric polynomial and every `z_i` to a skew one.
#[derive(Debug, Clone, Default)]
pub struct ParityAssignment {
    map: BTreeMap<FreeVar, FreePoly>,
}

impl ParityAssignment {
    pub fn new<I: IntoIterator<Item = (FreeVar, FreePoly)>>(pairs: I) -> Result<Self, FreeAlgError> {
        let mut map = BTreeMap::new();
        for (v, p) in pairs {
            match v.kind {
                VarKind::Y if !p.is_symmetric() => {
                    return Err(FreeAlgError::ParityViolation {
                        var: v,
                        expected: "symmetric",
                    })
                }
                VarKind::Z if !p.is_skew() => {
                    return Err(FreeAlgError::ParityViolation {
                        var: v,
                        expected: "skew",
                    })
                }
                _ => {}
            }
            map.insert(v, p);
        }
        Ok(ParityAssignment { map })
    }

    pub fn get(&self, v: FreeVar) -> Option<&FreePoly> {
        self.map.get(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FreeVar, &FreePoly)> {
        self.map.iter()
    }

    /// `self` followed by `then`: each image is substituted through `then`.
    pub fn compose(&self, then: &ParityAssignment) -> Result<ParityAssignment, FreeAlgError> {
        let pairs = self
            .map
            .iter()
            .map(|(v, p)| Ok((*v, p.substitute(then)?)))
            .collect::<Result<Vec<_>, FreeAlgError>>()?;
        ParityAssignment::new(pairs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::RATIONALS
    }
    fn y(i: u32) -> FreePoly {
        FreePoly::var(q(), FreeVar::y(i))
    }
    fn z(i: u32) -> FreePoly {
        FreePoly::var(q(), FreeVar::z(i))
    }

    #[test]
    fn variable_order() {
        assert!(FreeVar::z(1) < FreeVar::z(2));
        assert!(FreeVar::z(7) < FreeVar::y(1));
        assert!(FreeVar::y(1) < FreeVar::y(2));
    }

    #[test]
    fn involution_examples() {
        assert_eq!(y(1).involution(), y(1));
        assert_eq!((&z(1) * &z(2)).involution(), &z(2) * &z(1));
        let c = commutator(&z(1), &z(2));
        assert_eq!(c.involution(), -&c);
    }

    #[test]
    fn ring_examples() {
        let f = &y(1) + &z(1);
        assert_eq!(&f * &FreePoly::one(q()), f);
        let zz = &z(1) * &z(1);
        assert_eq!(zz.term_count(), 1);
        assert_eq!(zz.terms().next().unwrap().0.len(), 2);
        assert!((&(&y(1) - &y(1)) * &z(1)).is_zero());
    }

    #[test]
    fn commutator_examples() {
        assert!(commutator(&y(1), &y(1)).is_zero());
        assert_eq!(commutator(&z(1), &z(2)), &(&z(1) * &z(2)) - &(&z(2) * &z(1)));
        let (a, b, c) = (y(1), y(2), y(3));
        let expected = &(&(&(&(&a * &b) * &c) - &(&(&b * &a) * &c)) - &(&(&c * &a) * &b)) + &(&(&c * &b) * &a);
        assert_eq!(left_normed(&[a, b, c]).unwrap(), expected);
        assert!(matches!(left_normed(&[y(1)]), Err(FreeAlgError::TooFewArguments(1))));
    }

    #[test]
    fn s3_examples() {
        let s = standard_s3(&z(1), &z(2), &z(3));
        assert_eq!(s.term_count(), 6);
        assert!(standard_s3(&z(1), &z(1), &z(3)).is_zero());
        assert_eq!(standard_s3(&FreePoly::one(q()), &y(2), &z(3)), commutator(&y(2), &z(3)));
    }

    #[test]
    fn components() {
        let f = &y(1) + &(&y(1) * &z(1));
        let comps = f.multidegree_components();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[&MultiDegree::new(vec![1], vec![])], y(1));
        assert_eq!(comps[&MultiDegree::new(vec![1], vec![1])], &y(1) * &z(1));
        assert!(FreePoly::zero(q()).multidegree_components().is_empty());
        let s = standard_s3(&z(1), &z(2), &z(3));
        let comps = s.multidegree_components();
        assert_eq!(comps.keys().cloned().collect::<Vec<_>>(), vec![MultiDegree::new(vec![], vec![1, 1, 1])]);
    }

    #[test]
    fn substitution_examples() {
        let f = commutator(&y(1), &z(1));
        let a = ParityAssignment::new([(FreeVar::y(1), &y(2) + &y(2)), (FreeVar::z(1), z(3))]).unwrap();
        assert_eq!(f.substitute(&a).unwrap(), commutator(&y(2), &z(3)).scale_i64(2));

        let w = &y(1) * &z(1);
        let a = ParityAssignment::new([(FreeVar::z(1), &w - &w.involution())]).unwrap();
        assert_eq!(z(1).substitute(&a).unwrap(), &(&y(1) * &z(1)) + &(&z(1) * &y(1)));

        let s = standard_s3(&z(1), &z(2), &z(3));
        let id = ParityAssignment::new((1..=3).map(|i| (FreeVar::z(i), z(i)))).unwrap();
        assert_eq!(s.substitute(&id).unwrap(), s);

        assert!(matches!(
            ParityAssignment::new([(FreeVar::y(1), z(1))]),
            Err(FreeAlgError::ParityViolation { .. })
        ));
        let empty = ParityAssignment::default();
        assert!(matches!(y(1).substitute(&empty), Err(FreeAlgError::UnassignedVariable(_))));
    }

    #[test]
    fn shift_examples() {
        assert!(commutator(&y(1), &z(1)).y_proper_shift(1).is_zero());
        assert_eq!(y(1).y_proper_shift(1), FreePoly::one(q()));
        let expected = &y(1).scale_i64(2) + &FreePoly::one(q());
        assert_eq!((&y(1) * &y(1)).y_proper_shift(1), expected);
    }

    #[test]
    fn multidegree_normalization() {
        let md = MultiDegree::new(vec![2, 0, 1], vec![3, 1]);
        let (n, ren) = md.normalized();
        assert_eq!(n, MultiDegree::new(vec![1, 2], vec![1, 3]));
        assert_eq!(ren[&FreeVar::y(3)], FreeVar::y(1));
        assert_eq!(ren[&FreeVar::y(1)], FreeVar::y(2));
        assert_eq!(ren[&FreeVar::z(2)], FreeVar::z(1));
        assert!(n.is_normalized());
        assert_eq!(MultiDegree::new(vec![1, 1, 1], vec![1, 1]).word_count(), 120);
        assert_eq!(MultiDegree::new(vec![2], vec![1, 1]).word_count(), 12);
        assert_eq!("1,1;2".parse::<MultiDegree>().unwrap(), MultiDegree::new(vec![1, 1], vec![2]));
        assert_eq!("(0;1,1)".parse::<MultiDegree>().unwrap(), MultiDegree::new(vec![], vec![1, 1]));
        assert_eq!(MultiDegree::new(vec![1, 1, 1], vec![1, 1]).label(), "M111-N11");
    }
}
