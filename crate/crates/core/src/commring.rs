//! Commutative polynomials in matrix-entry variables `y_ij^k`, `z_ij^k`, and
//! the monomial orders used to pick leading monomials.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use smallvec::SmallVec;
use thiserror::Error;

use crate::scalars::{FieldSpec, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CommRingError {
    #[error("the zero polynomial has no leading monomial")]
    ZeroPolynomial,
    #[error("unknown order preset `{0}`")]
    UnknownPreset(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    Y,
    Z,
}

/// An entry variable `letter_{row,col}^tag`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntryVar {
    pub letter: Letter,
    pub row: u16,
    pub col: u16,
    pub tag: u32,
}

impl EntryVar {
    pub fn new(letter: Letter, row: u16, col: u16, tag: u32) -> Self {
        EntryVar { letter, row, col, tag }
    }

    pub fn y(row: u16, col: u16, tag: u32) -> Self {
        Self::new(Letter::Y, row, col, tag)
    }

    pub fn z(row: u16, col: u16, tag: u32) -> Self {
        Self::new(Letter::Z, row, col, tag)
    }
}

impl fmt::Display for EntryVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = match self.letter {
            Letter::Y => 'y',
            Letter::Z => 'z',
        };
        write!(f, "{l}{}{}^{}", self.row, self.col, self.tag)
    }
}

/// A commutative monomial, stored as `(variable, exponent)` pairs sorted by
/// variable with positive exponents.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct CMonomial(SmallVec<[(EntryVar, u32); 6]>);

impl CMonomial {
    pub fn one() -> Self {
        CMonomial(SmallVec::new())
    }

    pub fn var(v: EntryVar) -> Self {
        Self::power(v, 1)
    }

    pub fn power(v: EntryVar, e: u32) -> Self {
        let mut m = SmallVec::new();
        if e > 0 {
            m.push((v, e));
        }
        CMonomial(m)
    }

    pub fn from_factors<I: IntoIterator<Item = (EntryVar, u32)>>(factors: I) -> Self {
        let mut acc = CMonomial::one();
        for (v, e) in factors {
            acc = acc.mul(&CMonomial::power(v, e));
        }
        acc
    }

    pub fn factors(&self) -> &[(EntryVar, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, v: EntryVar) -> u32 {
        self.0
            .iter()
            .find(|(w, _)| *w == v)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &CMonomial) -> CMonomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        CMonomial(out)
    }
}

impl fmt::Display for CMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(v, e)| if *e == 1 { v.to_string() } else { format!("({v})^{e}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// A commutative polynomial with no stored zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CPoly {
    field: FieldSpec,
    terms: BTreeMap<CMonomial, Scalar>,
}

impl CPoly {
    pub fn zero(field: FieldSpec) -> Self {
        CPoly {
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Scalar) -> Self {
        Self::term(c, CMonomial::one())
    }

    pub fn one(field: FieldSpec) -> Self {
        Self::constant(field.one())
    }

    pub fn var(field: FieldSpec, v: EntryVar) -> Self {
        Self::term(field.one(), CMonomial::var(v))
    }

    pub fn term(c: Scalar, m: CMonomial) -> Self {
        let mut p = CPoly::zero(c.field());
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CMonomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &CMonomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field.zero())
    }

    /// The value when `self` is a constant.
    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(self.field.zero()),
            1 => self.terms.get(&CMonomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: CMonomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
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

    /// `self += c · other`.
    pub fn add_scaled(&mut self, other: &CPoly, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (m, a) in &other.terms {
            self.add_term(m.clone(), a * c);
        }
    }

    /// `self += a · b`.
    pub fn add_product(&mut self, a: &CPoly, b: &CPoly) {
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                self.add_term(ma.mul(mb), ca * cb);
            }
        }
    }

    pub fn scale(&self, c: &Scalar) -> CPoly {
        let mut out = CPoly::zero(self.field);
        out.add_scaled(self, c);
        out
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn leading_monomial(&self, ord: &VarOrder) -> Result<(CMonomial, Scalar), CommRingError> {
        let mut best: Option<(&CMonomial, &Scalar)> = None;
        for (m, c) in &self.terms {
            best = match best {
                Some((b, _)) if compare_monomials(b, m, ord) != Ordering::Less => best,
                _ => Some((m, c)),
            };
        }
        best.map(|(m, c)| (m.clone(), c.clone()))
            .ok_or(CommRingError::ZeroPolynomial)
    }

    /// Substitutes constants for some variables.
    pub fn specialize(&self, values: &BTreeMap<EntryVar, Scalar>) -> CPoly {
        let mut out = CPoly::zero(self.field);
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = CMonomial::one();
            for &(v, e) in m.factors() {
                match values.get(&v) {
                    Some(x) => {
                        for _ in 0..e {
                            coeff = &coeff * x;
                        }
                    }
                    None => rest = rest.mul(&CMonomial::power(v, e)),
                }
            }
            out.add_term(rest, coeff);
        }
        out
    }
}

impl fmt::Display for CPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{a}*{m}")?;
            }
        }
        Ok(())
    }
}

impl Add for &CPoly {
    type Output = CPoly;
    fn add(self, rhs: &CPoly) -> CPoly {
        assert_eq!(self.field, rhs.field, "polynomials over different fields");
        let mut out = self.clone();
        out.add_scaled(rhs, &self.field.one());
        out
    }
}

impl Sub for &CPoly {
    type Output = CPoly;
    fn sub(self, rhs: &CPoly) -> CPoly {
        assert_eq!(self.field, rhs.field, "polynomials over different fields");
        let mut out = self.clone();
        out.add_scaled(rhs, &-self.field.one());
        out
    }
}

impl Mul for &CPoly {
    type Output = CPoly;
    fn mul(self, rhs: &CPoly) -> CPoly {
        assert_eq!(self.field, rhs.field, "polynomials over different fields");
        let mut out = CPoly::zero(self.field);
        out.add_product(self, rhs);
        out
    }
}

impl Neg for &CPoly {
    type Output = CPoly;
    fn neg(self) -> CPoly {
        self.scale(&-self.field.one())
    }
}

/// Which tags of a variable family a block covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TagSel {
    All,
    Only(u32),
    Except(u32),
}

impl TagSel {
    fn accepts(self, tag: u32) -> bool {
        match self {
            TagSel::All => true,
            TagSel::Only(t) => tag == t,
            TagSel::Except(t) => tag != t,
        }
    }
}

/// A run of variables `letter_{row,col}^k`, increasing in `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderBlock {
    pub letter: Letter,
    pub row: u16,
    pub col: u16,
    pub tags: TagSel,
}

impl OrderBlock {
    pub fn all(letter: Letter, row: u16, col: u16) -> Self {
        OrderBlock { letter, row, col, tags: TagSel::All }
    }

    fn accepts(&self, v: EntryVar) -> bool {
        v.letter == self.letter && v.row == self.row && v.col == self.col && self.tags.accepts(v.tag)
    }
}

/// A total order on entry variables: listed blocks from highest to lowest,
/// then every unlisted variable below them in `(letter, row, col, tag)` order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VarOrder {
    pub blocks: Vec<OrderBlock>,
}

impl VarOrder {
    pub fn new(blocks: Vec<OrderBlock>) -> Self {
        VarOrder { blocks }
    }

    fn key(&self, v: EntryVar) -> (usize, EntryVar) {
        let n = self.blocks.len();
        match self.blocks.iter().position(|b| b.accepts(v)) {
            Some(i) => (n - i, EntryVar::new(Letter::Y, 0, 0, v.tag)),
            None => (0, v),
        }
    }

    pub fn compare_vars(&self, a: EntryVar, b: EntryVar) -> Ordering {
        self.key(a).cmp(&self.key(b))
    }

    fn decreasing(&self, m: &CMonomial) -> Vec<EntryVar> {
        let mut seq: Vec<EntryVar> = m
            .factors()
            .iter()
            .flat_map(|&(v, e)| std::iter::repeat_n(v, e as usize))
            .collect();
        seq.sort_by(|a, b| self.compare_vars(*b, *a));
        seq
    }
}

/// Compares the weakly decreasing letter sequences lexicographically; a proper
/// prefix is smaller.
pub fn compare_monomials(a: &CMonomial, b: &CMonomial, ord: &VarOrder) -> Ordering {
    let (sa, sb) = (ord.decreasing(a), ord.decreasing(b));
    for (x, y) in sa.iter().zip(sb.iter()) {
        match ord.compare_vars(*x, *y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    sa.len().cmp(&sb.len())
}

/// Leading monomial of `f` under `ord`.
pub fn leading_monomial(f: &CPoly, ord: &VarOrder) -> Result<(CMonomial, Scalar), CommRingError> {
    f.leading_monomial(ord)
}

/// Named orders, one per case. `s` is the number of skew variables, used by
/// the preset that singles out `z_12^s`.
pub fn order_presets(s: u32) -> BTreeMap<&'static str, VarOrder> {
    use Letter::{Y, Z};
    let b = OrderBlock::all;
    let mut out = BTreeMap::new();
    out.insert("M0", VarOrder::new(vec![b(Y, 1, 2), b(Y, 1, 1)]));
    out.insert("0N", VarOrder::new(vec![b(Z, 1, 2), b(Z, 1, 1)]));
    out.insert(
        "M1",
        VarOrder::new(vec![b(Y, 1, 2), b(Y, 1, 1), b(Z, 1, 2), b(Z, 1, 1)]),
    );
    out.insert(
        "B1N-ns-ge-3",
        VarOrder::new(vec![
            OrderBlock { letter: Z, row: 1, col: 2, tags: TagSel::Except(s) },
            OrderBlock { letter: Z, row: 1, col: 2, tags: TagSel::Only(s) },
            b(Z, 1, 1),
            b(Y, 1, 2),
            b(Y, 1, 1),
        ]),
    );
    let zy = VarOrder::new(vec![b(Z, 1, 2), b(Y, 1, 2)]);
    out.insert("MN-even-n1-gt-1", zy.clone());
    out.insert("MN-even-n1-eq-1", VarOrder::new(vec![b(Y, 1, 2), b(Z, 1, 2)]));
    out.insert("MN-odd-n1-gt-1", zy.clone());
    out.insert("MN-odd-n1-eq-1-mk-gt-1", zy.clone());
    out.insert("MN-char3", zy);
    out
}

pub fn order_preset(name: &str, s: u32) -> Result<VarOrder, CommRingError> {
    order_presets(s)
        .remove(name)
        .ok_or_else(|| CommRingError::UnknownPreset(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q() -> FieldSpec {
        FieldSpec::RATIONALS
    }

    fn m(factors: &[(EntryVar, u32)]) -> CMonomial {
        CMonomial::from_factors(factors.iter().copied())
    }

    #[test]
    fn order_examples() {
        let ord = order_preset("M0", 1).unwrap();
        let (y12_1, y11_1, y11_2) = (EntryVar::y(1, 2, 1), EntryVar::y(1, 1, 1), EntryVar::y(1, 1, 2));
        assert_eq!(
            compare_monomials(&m(&[(y12_1, 1), (y11_2, 1)]), &m(&[(y12_1, 1), (y11_1, 1)]), &ord),
            Ordering::Greater
        );
        assert_eq!(
            compare_monomials(&m(&[(y12_1, 1), (y11_1, 1)]), &m(&[(y12_1, 1)]), &ord),
            Ordering::Greater
        );
        let a = m(&[(y12_1, 2)]);
        assert_eq!(compare_monomials(&a, &a, &ord), Ordering::Equal);
    }

    #[test]
    fn leading_examples() {
        let ord = order_preset("M0", 1).unwrap();
        let a = CPoly::term(q().one(), m(&[(EntryVar::y(1, 2, 1), 1), (EntryVar::y(1, 1, 2), 1)]));
        let b = CPoly::term(q().one(), m(&[(EntryVar::y(1, 2, 2), 1), (EntryVar::y(1, 1, 1), 1)]));
        let f = &a - &b;
        let (lm, c) = f.leading_monomial(&ord).unwrap();
        assert_eq!(lm, m(&[(EntryVar::y(1, 2, 2), 1), (EntryVar::y(1, 1, 1), 1)]));
        assert_eq!(c, q().from_i64(-1));
        let k = CPoly::constant(q().from_i64(7));
        assert_eq!(k.leading_monomial(&ord).unwrap(), (CMonomial::one(), q().from_i64(7)));
        assert_eq!(CPoly::zero(q()).leading_monomial(&ord), Err(CommRingError::ZeroPolynomial));
    }

    #[test]
    fn preset_examples() {
        let p = order_presets(4);
        let m0 = &p["M0"];
        assert_eq!(m0.compare_vars(EntryVar::y(1, 2, 1), EntryVar::y(1, 1, 9)), Ordering::Greater);
        assert_eq!(m0.compare_vars(EntryVar::y(1, 2, 2), EntryVar::y(1, 2, 1)), Ordering::Greater);
        let b = &p["B1N-ns-ge-3"];
        for l in 1..=2 {
            assert_eq!(b.compare_vars(EntryVar::z(1, 2, l), EntryVar::z(1, 2, 4)), Ordering::Greater);
        }
        assert_eq!(b.compare_vars(EntryVar::z(1, 2, 4), EntryVar::z(1, 1, 9)), Ordering::Greater);
        let mn = &p["MN-even-n1-gt-1"];
        assert_eq!(mn.compare_vars(EntryVar::z(1, 2, 1), EntryVar::y(1, 2, 5)), Ordering::Greater);
        assert_eq!(mn.compare_vars(EntryVar::y(1, 2, 1), EntryVar::z(1, 1, 5)), Ordering::Greater);
    }

    fn entry_var() -> impl Strategy<Value = EntryVar> {
        (any::<bool>(), 1u16..3, 1u16..4, 1u32..4).prop_map(|(y, r, c, t)| {
            EntryVar::new(if y { Letter::Y } else { Letter::Z }, r, c, t)
        })
    }

    fn monomial() -> impl Strategy<Value = CMonomial> {
        prop::collection::vec((entry_var(), 1u32..3), 0..4).prop_map(CMonomial::from_factors)
    }

    proptest! {
        #[test]
        fn order_is_total(a in monomial(), b in monomial(), c in monomial(), which in 0usize..9) {
            let presets = order_presets(2);
            let ord = presets.values().nth(which).unwrap();
            let ab = compare_monomials(&a, &b, ord);
            prop_assert_eq!(ab, compare_monomials(&b, &a, ord).reverse());
            prop_assert_eq!(ab == Ordering::Equal, a == b);
            if ab != Ordering::Greater && compare_monomials(&b, &c, ord) != Ordering::Greater {
                prop_assert_ne!(compare_monomials(&a, &c, ord), Ordering::Greater);
            }
        }

        #[test]
        fn leading_degree_adds(a in monomial(), b in monomial(), c in monomial(), d in monomial()) {
            let ord = order_preset("M1", 1).unwrap();
            let f = &CPoly::term(q().one(), a) + &CPoly::term(q().from_i64(2), b);
            let g = &CPoly::term(q().one(), c) - &CPoly::term(q().from_i64(3), d);
            prop_assume!(!f.is_zero() && !g.is_zero());
            let fg = &f * &g;
            let (lf, _) = f.leading_monomial(&ord).unwrap();
            let (lg, _) = g.leading_monomial(&ord).unwrap();
            let (lfg, _) = fg.leading_monomial(&ord).unwrap();
            prop_assert_eq!(lfg.degree(), lf.degree() + lg.degree());
        }
    }
}
