//! Upper-triangular matrices over the entry ring, the two involutions, and the
//! evaluation of free polynomials on matrices.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::commring::{CPoly, EntryVar, Letter};
use crate::freealg::{FreePoly, FreeVar, VarKind, Word};
use crate::scalars::{FieldSpec, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatRepError {
    #[error("the involution s needs an even matrix size, got {0}")]
    OddSizeForS(usize),
    #[error("variable {0} has no assigned matrix")]
    UnassignedVariable(FreeVar),
    #[error("matrix assigned to {var} is not {expected}")]
    ParityViolation { var: FreeVar, expected: &'static str },
    #[error("matrix size {found} does not match {expected}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("invalid tag {0}")]
    BadTag(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InvolutionKind {
    /// Reflection across the anti-diagonal.
    Star,
    /// The reflection conjugated by `diag(I_m, -I_m)`, for `n = 2m`.
    S,
}

impl InvolutionKind {
    pub fn check_size(self, n: usize) -> Result<(), MatRepError> {
        if self == InvolutionKind::S && n % 2 == 1 {
            Err(MatRepError::OddSizeForS(n))
        } else {
            Ok(())
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            InvolutionKind::Star => "star",
            InvolutionKind::S => "s",
        }
    }

    /// Sign picked up by entry `(i, j)` after the reflection (1-based).
    fn sign(self, n: usize, i: usize, j: usize) -> i64 {
        match self {
            InvolutionKind::Star => 1,
            InvolutionKind::S => {
                let d = |k: usize| if k <= n / 2 { 1 } else { -1 };
                d(i) * d(j)
            }
        }
    }
}

/// An `n × n` upper-triangular matrix with entries in `F[L]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UTMatrix {
    n: usize,
    field: FieldSpec,
    entries: Vec<CPoly>,
}

fn slot(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(1 <= i && i <= j && j <= n);
    (i - 1) * (2 * n + 2 - i) / 2 + (j - i)
}

impl UTMatrix {
    pub fn zero(n: usize, field: FieldSpec) -> Self {
        UTMatrix {
            n,
            field,
            entries: vec![CPoly::zero(field); n * (n + 1) / 2],
        }
    }

    pub fn identity(n: usize, field: FieldSpec) -> Self {
        let mut m = Self::zero(n, field);
        for i in 1..=n {
            m.set(i, i, CPoly::one(field));
        }
        m
    }

    pub fn elementary(n: usize, field: FieldSpec, i: usize, j: usize) -> Self {
        let mut m = Self::zero(n, field);
        m.set(i, j, CPoly::one(field));
        m
    }

    /// Builds a matrix from `(i, j, value)` triples; repeated positions add up.
    pub fn from_entries<I: IntoIterator<Item = (usize, usize, CPoly)>>(
        n: usize,
        field: FieldSpec,
        entries: I,
    ) -> Self {
        let mut m = Self::zero(n, field);
        for (i, j, p) in entries {
            let s = &m.entries[slot(n, i, j)] + &p;
            m.set(i, j, s);
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    /// Entry `(i, j)`, 1-based; `None` below the diagonal.
    pub fn get(&self, i: usize, j: usize) -> Option<&CPoly> {
        if i > j {
            None
        } else {
            Some(&self.entries[slot(self.n, i, j)])
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> CPoly {
        self.get(i, j).cloned().unwrap_or_else(|| CPoly::zero(self.field))
    }

    pub fn set(&mut self, i: usize, j: usize, p: CPoly) {
        assert!(i <= j, "({i},{j}) lies below the diagonal");
        self.entries[slot(self.n, i, j)] = p;
    }

    /// Nonzero entries in row-major order.
    pub fn nonzero_entries(&self) -> impl Iterator<Item = (usize, usize, &CPoly)> {
        let n = self.n;
        (1..=n)
            .flat_map(move |i| (i..=n).map(move |j| (i, j)))
            .map(move |(i, j)| (i, j, &self.entries[slot(n, i, j)]))
            .filter(|(_, _, p)| !p.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|p| p.is_zero())
    }

    /// `Some(c)` when `self = c·1` with `c` constant.
    pub fn as_scalar_constant(&self) -> Option<Scalar> {
        let d = self.get(1, 1)?.as_constant()?;
        for i in 1..=self.n {
            for j in i..=self.n {
                let e = &self.entries[slot(self.n, i, j)];
                if i == j {
                    if e.as_constant()? != d {
                        return None;
                    }
                } else if !e.is_zero() {
                    return None;
                }
            }
        }
        Some(d)
    }

    /// `true` when `self = p·1` for some polynomial `p`.
    pub fn is_scalar_matrix(&self) -> bool {
        let d = &self.entries[0];
        (1..=self.n).all(|i| {
            (i..=self.n).all(|j| {
                let e = &self.entries[slot(self.n, i, j)];
                if i == j {
                    e == d
                } else {
                    e.is_zero()
                }
            })
        })
    }

    pub fn add(&self, other: &UTMatrix) -> UTMatrix {
        assert_eq!(self.n, other.n, "size mismatch");
        UTMatrix {
            n: self.n,
            field: self.field,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &UTMatrix) -> UTMatrix {
        assert_eq!(self.n, other.n, "size mismatch");
        UTMatrix {
            n: self.n,
            field: self.field,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn mul(&self, other: &UTMatrix) -> UTMatrix {
        assert_eq!(self.n, other.n, "size mismatch");
        let n = self.n;
        let mut out = UTMatrix::zero(n, self.field);
        for i in 1..=n {
            for k in i..=n {
                let a = &self.entries[slot(n, i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in k..=n {
                    let b = &other.entries[slot(n, k, j)];
                    if !b.is_zero() {
                        out.entries[slot(n, i, j)].add_product(a, b);
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> UTMatrix {
        UTMatrix {
            n: self.n,
            field: self.field,
            entries: self.entries.iter().map(|p| p.scale(c)).collect(),
        }
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, other: &UTMatrix, c: &Scalar) {
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            a.add_scaled(b, c);
        }
    }

    pub fn commutator(&self, other: &UTMatrix) -> UTMatrix {
        self.mul(other).sub(&other.mul(self))
    }

    /// Substitutes constants for some entry variables in every entry.
    pub fn specialize(&self, values: &BTreeMap<EntryVar, Scalar>) -> UTMatrix {
        UTMatrix {
            n: self.n,
            field: self.field,
            entries: self.entries.iter().map(|p| p.specialize(values)).collect(),
        }
    }
}

impl fmt::Display for UTMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, j, p) in self.nonzero_entries() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({p})e{i}{j}")?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

pub fn apply_involution(a: &UTMatrix, kind: InvolutionKind) -> Result<UTMatrix, MatRepError> {
    let n = a.n;
    kind.check_size(n)?;
    let mut out = UTMatrix::zero(n, a.field);
    for i in 1..=n {
        for j in i..=n {
            let src = &a.entries[slot(n, n + 1 - j, n + 1 - i)];
            let v = if kind.sign(n, i, j) < 0 { -src } else { src.clone() };
            out.set(i, j, v);
        }
    }
    Ok(out)
}

pub fn is_symmetric(a: &UTMatrix, kind: InvolutionKind) -> Result<bool, MatRepError> {
    Ok(apply_involution(a, kind)? == *a)
}

pub fn is_skew(a: &UTMatrix, kind: InvolutionKind) -> Result<bool, MatRepError> {
    let b = apply_involution(a, kind)?;
    Ok(b.add(a).is_zero())
}

/// A constant matrix over `Z` given by its nonzero entries, in row-major order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    pub n: usize,
    pub entries: Vec<((usize, usize), i64)>,
}

impl IntMatrix {
    /// First nonzero position in row-major order.
    pub fn leading_position(&self) -> (usize, usize) {
        self.entries[0].0
    }

    pub fn to_matrix(&self, field: FieldSpec) -> UTMatrix {
        UTMatrix::from_entries(
            self.n,
            field,
            self.entries
                .iter()
                .map(|&((i, j), c)| (i, j, CPoly::constant(field.from_i64(c)))),
        )
    }
}

/// `(+1)`- and `(-1)`-eigenbases of the involution, obtained from
/// `e_ij ± e_ij^∘`, deduplicated, zeros dropped, leading coefficient 1.
pub fn sym_skew_bases(n: usize, kind: InvolutionKind) -> Result<(Vec<IntMatrix>, Vec<IntMatrix>), MatRepError> {
    kind.check_size(n)?;
    let mut sym = Vec::new();
    let mut skew = Vec::new();
    for i in 1..=n {
        for j in i..=n {
            let (ti, tj) = (n + 1 - j, n + 1 - i);
            let s = kind.sign(n, ti, tj);
            for (eps, out) in [(1i64, &mut sym), (-1i64, &mut skew)] {
                let mut acc: BTreeMap<(usize, usize), i64> = BTreeMap::new();
                *acc.entry((i, j)).or_default() += 1;
                *acc.entry((ti, tj)).or_default() += eps * s;
                let mut entries: Vec<((usize, usize), i64)> =
                    acc.into_iter().filter(|(_, c)| *c != 0).collect();
                if entries.is_empty() {
                    continue;
                }
                let lead = entries[0].1;
                for e in entries.iter_mut() {
                    e.1 /= lead;
                }
                let m = IntMatrix { n, entries };
                if !out.contains(&m) {
                    out.push(m);
                }
            }
        }
    }
    Ok((sym, skew))
}

fn generic_from_basis(basis: &[IntMatrix], n: usize, letter: Letter, tag: u32, field: FieldSpec) -> UTMatrix {
    let mut m = UTMatrix::zero(n, field);
    for b in basis {
        let (r, c) = b.leading_position();
        let v = CPoly::var(field, EntryVar::new(letter, r as u16, c as u16, tag));
        for &((i, j), k) in &b.entries {
            let e = &m.entry(i, j) + &v.scale(&field.from_i64(k));
            m.set(i, j, e);
        }
    }
    m
}

/// `Σ y_b^tag · b` over the symmetric basis.
pub fn generic_symmetric(n: usize, kind: InvolutionKind, tag: u32, field: FieldSpec) -> Result<UTMatrix, MatRepError> {
    let (sym, _) = sym_skew_bases(n, kind)?;
    Ok(generic_from_basis(&sym, n, Letter::Y, tag, field))
}

/// `Σ z_b^tag · b` over the skew basis.
pub fn generic_skew(n: usize, kind: InvolutionKind, tag: u32, field: FieldSpec) -> Result<UTMatrix, MatRepError> {
    let (_, skew) = sym_skew_bases(n, kind)?;
    Ok(generic_from_basis(&skew, n, Letter::Z, tag, field))
}

/// Fully generic matrices for the given variables: `y_i ↦ Y_i`, `z_i ↦ Z_i`.
pub fn generic_assignment(
    vars: &[FreeVar],
    n: usize,
    kind: InvolutionKind,
    field: FieldSpec,
) -> Result<BTreeMap<FreeVar, UTMatrix>, MatRepError> {
    let (sym, skew) = sym_skew_bases(n, kind)?;
    Ok(vars
        .iter()
        .map(|&v| {
            let m = match v.kind {
                VarKind::Y => generic_from_basis(&sym, n, Letter::Y, v.index, field),
                VarKind::Z => generic_from_basis(&skew, n, Letter::Z, v.index, field),
            };
            (v, m)
        })
        .collect())
}

fn var(field: FieldSpec, letter: Letter, r: u16, c: u16, tag: u32) -> CPoly {
    CPoly::var(field, EntryVar::new(letter, r, c, tag))
}

/// The matrices `Y_k`, `Z_k` of `UT_3` whose `(2,2)` entry vanishes.
pub fn qgeneric(letter: Letter, tag: u32, field: FieldSpec) -> UTMatrix {
    let v = |r, c| var(field, letter, r, c, tag);
    match letter {
        Letter::Z => UTMatrix::from_entries(
            3,
            field,
            [(1, 1, v(1, 1)), (1, 2, v(1, 2)), (2, 3, -&v(1, 2)), (3, 3, -&v(1, 1))],
        ),
        Letter::Y => UTMatrix::from_entries(
            3,
            field,
            [(1, 1, v(1, 1)), (1, 2, v(1, 2)), (1, 3, v(1, 3)), (2, 3, v(1, 2)), (3, 3, v(1, 1))],
        ),
    }
}

/// Roles of the matrices with unit corner entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SRole {
    Z1,
    Zl(u32),
    Y(u32),
}

pub fn sgeneric(role: SRole, field: FieldSpec) -> Result<UTMatrix, MatRepError> {
    let one = CPoly::one(field);
    Ok(match role {
        SRole::Z1 => UTMatrix::from_entries(3, field, [(1, 1, one.clone()), (3, 3, -&one)]),
        SRole::Zl(l) => {
            if l < 2 {
                return Err(MatRepError::BadTag(l));
            }
            let z = var(field, Letter::Z, 1, 2, l);
            UTMatrix::from_entries(3, field, [(1, 1, one.clone()), (1, 2, z.clone()), (2, 3, -&z), (3, 3, -&one)])
        }
        SRole::Y(j) => {
            if j < 1 {
                return Err(MatRepError::BadTag(j));
            }
            let y12 = var(field, Letter::Y, 1, 2, j);
            let y13 = var(field, Letter::Y, 1, 3, j);
            UTMatrix::from_entries(
                3,
                field,
                [(1, 1, one.clone()), (1, 2, y12.clone()), (1, 3, y13), (2, 3, y12), (3, 3, one)],
            )
        }
    })
}

/// The sgeneric matrix for a free variable: `z_1 ↦ Z_1`, `z_l ↦ Z_l`, `y_j ↦ Y_j`.
pub fn sgeneric_for(v: FreeVar, field: FieldSpec) -> UTMatrix {
    let role = match (v.kind, v.index) {
        (VarKind::Z, 1) => SRole::Z1,
        (VarKind::Z, l) => SRole::Zl(l),
        (VarKind::Y, j) => SRole::Y(j),
    };
    sgeneric(role, field).expect("valid tag")
}

pub fn qgeneric_for(v: FreeVar, field: FieldSpec) -> UTMatrix {
    let letter = match v.kind {
        VarKind::Y => Letter::Y,
        VarKind::Z => Letter::Z,
    };
    qgeneric(letter, v.index, field)
}

fn check_assignment(
    vars: impl IntoIterator<Item = FreeVar>,
    assign: &BTreeMap<FreeVar, UTMatrix>,
    kind: InvolutionKind,
) -> Result<usize, MatRepError> {
    let mut size = None;
    for v in vars {
        let m = assign.get(&v).ok_or(MatRepError::UnassignedVariable(v))?;
        match size {
            None => size = Some(m.size()),
            Some(n) if n != m.size() => {
                return Err(MatRepError::SizeMismatch { expected: n, found: m.size() })
            }
            _ => {}
        }
        let ok = match v.kind {
            VarKind::Y => is_symmetric(m, kind)?,
            VarKind::Z => is_skew(m, kind)?,
        };
        if !ok {
            let expected = if v.kind == VarKind::Y { "symmetric" } else { "skew" };
            return Err(MatRepError::ParityViolation { var: v, expected });
        }
    }
    Ok(size.unwrap_or(0))
}

/// Evaluates each word, sharing work along common prefixes. `words` may be in
/// any order; results come back in input order.
pub fn evaluate_words(
    words: &[Word],
    assign: &BTreeMap<FreeVar, UTMatrix>,
    n: usize,
    field: FieldSpec,
) -> Result<Vec<UTMatrix>, MatRepError> {
    let mut order: Vec<usize> = (0..words.len()).collect();
    order.sort_by(|&a, &b| words[a].letters().cmp(words[b].letters()));
    let mut out: Vec<Option<UTMatrix>> = vec![None; words.len()];
    let mut stack: Vec<UTMatrix> = vec![UTMatrix::identity(n, field)];
    let mut prev: &[FreeVar] = &[];
    for idx in order {
        let w = words[idx].letters();
        let common = prev.iter().zip(w).take_while(|(a, b)| a == b).count();
        stack.truncate(common + 1);
        for v in &w[common..] {
            let m = assign.get(v).ok_or(MatRepError::UnassignedVariable(*v))?;
            let next = stack.last().expect("nonempty").mul(m);
            stack.push(next);
        }
        out[idx] = Some(stack[w.len()].clone());
        prev = w;
    }
    Ok(out.into_iter().map(|m| m.expect("evaluated")).collect())
}

/// The evaluation homomorphism. Each assigned matrix must be symmetric
/// (for `y_i`) or skew (for `z_i`) under `kind`.
pub fn evaluate(
    f: &FreePoly,
    assign: &BTreeMap<FreeVar, UTMatrix>,
    kind: InvolutionKind,
) -> Result<UTMatrix, MatRepError> {
    let n = check_assignment(f.variables(), assign, kind)?;
    let n = if n == 0 {
        assign.values().next().map(|m| m.size()).unwrap_or(1)
    } else {
        n
    };
    let field = f.field();
    let (words, coeffs): (Vec<Word>, Vec<Scalar>) = f.terms().map(|(w, c)| (w.clone(), c.clone())).unzip();
    let values = evaluate_words(&words, assign, n, field)?;
    let mut acc = UTMatrix::zero(n, field);
    for (m, c) in values.iter().zip(&coeffs) {
        acc.add_scaled(m, c);
    }
    Ok(acc)
}

/// Evaluation on the fully generic matrices of size `n`.
pub fn evaluate_generic(f: &FreePoly, n: usize, kind: InvolutionKind) -> Result<UTMatrix, MatRepError> {
    let vars: Vec<FreeVar> = f.variables().into_iter().collect();
    let assign = generic_assignment(&vars, n, kind, f.field())?;
    let field = f.field();
    let (words, coeffs): (Vec<Word>, Vec<Scalar>) = f.terms().map(|(w, c)| (w.clone(), c.clone())).unzip();
    let values = evaluate_words(&words, &assign, n, field)?;
    let mut acc = UTMatrix::zero(n, field);
    for (m, c) in values.iter().zip(&coeffs) {
        acc.add_scaled(m, c);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freealg::{bracket, commutator};
    use proptest::prelude::*;

    fn q() -> FieldSpec {
        FieldSpec::RATIONALS
    }

    fn c(v: i64) -> CPoly {
        CPoly::constant(q().from_i64(v))
    }

    fn ev(letter: Letter, r: u16, col: u16, t: u32) -> CPoly {
        CPoly::var(q(), EntryVar::new(letter, r, col, t))
    }

    fn ints(n: usize, entries: &[((usize, usize), i64)]) -> IntMatrix {
        IntMatrix { n, entries: entries.to_vec() }
    }

    #[test]
    fn star_on_3x3() {
        let a = UTMatrix::from_entries(
            3,
            q(),
            (1..=3).flat_map(|i| (i..=3).map(move |j| (i, j, ev(Letter::Y, i as u16, j as u16, 9)))),
        );
        let b = apply_involution(&a, InvolutionKind::Star).unwrap();
        let name = |i: u16, j: u16| ev(Letter::Y, i, j, 9);
        assert_eq!(b.entry(1, 1), name(3, 3));
        assert_eq!(b.entry(1, 2), name(2, 3));
        assert_eq!(b.entry(1, 3), name(1, 3));
        assert_eq!(b.entry(2, 2), name(2, 2));
        assert_eq!(b.entry(2, 3), name(1, 2));
        assert_eq!(b.entry(3, 3), name(1, 1));
        let id = UTMatrix::identity(4, q());
        assert_eq!(apply_involution(&id, InvolutionKind::S).unwrap(), id);
        assert_eq!(
            apply_involution(&UTMatrix::identity(3, q()), InvolutionKind::S),
            Err(MatRepError::OddSizeForS(3))
        );
    }

    #[test]
    fn bases_3_star() {
        let (sym, skew) = sym_skew_bases(3, InvolutionKind::Star).unwrap();
        let mut sym = sym;
        sym.sort();
        let mut expected = vec![
            ints(3, &[((1, 1), 1), ((3, 3), 1)]),
            ints(3, &[((2, 2), 1)]),
            ints(3, &[((1, 2), 1), ((2, 3), 1)]),
            ints(3, &[((1, 3), 1)]),
        ];
        expected.sort();
        assert_eq!(sym, expected);
        let mut skew = skew;
        skew.sort();
        let mut expected = vec![
            ints(3, &[((1, 1), 1), ((3, 3), -1)]),
            ints(3, &[((1, 2), 1), ((2, 3), -1)]),
        ];
        expected.sort();
        assert_eq!(skew, expected);
    }

    #[test]
    fn bases_dimensions() {
        for n in 1..=6 {
            for kind in [InvolutionKind::Star, InvolutionKind::S] {
                if kind == InvolutionKind::S && n % 2 == 1 {
                    continue;
                }
                let (sym, skew) = sym_skew_bases(n, kind).unwrap();
                assert_eq!(sym.len() + skew.len(), n * (n + 1) / 2, "n={n} {kind:?}");
                for b in &sym {
                    assert!(is_symmetric(&b.to_matrix(q()), kind).unwrap());
                }
                for b in &skew {
                    assert!(is_skew(&b.to_matrix(q()), kind).unwrap());
                }
            }
        }
    }

    #[test]
    fn s_involution_on_corners() {
        let a = UTMatrix::from_entries(4, q(), [(1, 1, c(1)), (4, 4, c(1))]);
        assert!(is_symmetric(&a, InvolutionKind::S).unwrap());
        // D(J A^t J)D by hand on e_14: J e_41 J = e_14, D e_14 D = -e_14
        let e14 = UTMatrix::elementary(4, q(), 1, 4);
        assert_eq!(apply_involution(&e14, InvolutionKind::S).unwrap(), e14.scale(&q().from_i64(-1)));
    }

    #[test]
    fn generic_3_star() {
        let y = generic_symmetric(3, InvolutionKind::Star, 2, q()).unwrap();
        let v = |r, col| ev(Letter::Y, r, col, 2);
        assert_eq!(y.entry(1, 1), v(1, 1));
        assert_eq!(y.entry(3, 3), v(1, 1));
        assert_eq!(y.entry(2, 2), v(2, 2));
        assert_eq!(y.entry(1, 2), v(1, 2));
        assert_eq!(y.entry(2, 3), v(1, 2));
        assert_eq!(y.entry(1, 3), v(1, 3));
        let z = generic_skew(3, InvolutionKind::Star, 2, q()).unwrap();
        assert_eq!(z.entry(3, 3), -&ev(Letter::Z, 1, 1, 2));
        assert_eq!(z.entry(2, 3), -&ev(Letter::Z, 1, 2, 2));
        assert!(z.entry(1, 3).is_zero());
        assert_eq!(apply_involution(&z, InvolutionKind::Star).unwrap(), z.scale(&q().from_i64(-1)));
    }

    #[test]
    fn qgeneric_shape() {
        let y = qgeneric(Letter::Y, 1, q());
        assert!(y.entry(2, 2).is_zero());
        assert!(is_symmetric(&y, InvolutionKind::Star).unwrap());
        assert!(is_skew(&qgeneric(Letter::Z, 1, q()), InvolutionKind::Star).unwrap());
    }

    #[test]
    fn sgeneric_shape() {
        let z1 = sgeneric(SRole::Z1, q()).unwrap();
        assert_eq!(z1, UTMatrix::from_entries(3, q(), [(1, 1, c(1)), (3, 3, c(-1))]));
        let zl = sgeneric(SRole::Zl(3), q()).unwrap();
        assert!(is_skew(&zl, InvolutionKind::Star).unwrap());
        assert!(is_symmetric(&sgeneric(SRole::Y(2), q()).unwrap(), InvolutionKind::Star).unwrap());
        let d = zl.sub(&z1);
        let positions: Vec<(usize, usize)> = d.nonzero_entries().map(|(i, j, _)| (i, j)).collect();
        assert_eq!(positions, vec![(1, 2), (2, 3)]);
        assert_eq!(sgeneric(SRole::Zl(1), q()), Err(MatRepError::BadTag(1)));
    }

    fn qassign(vars: &[FreeVar]) -> BTreeMap<FreeVar, UTMatrix> {
        vars.iter().map(|&v| (v, qgeneric_for(v, q()))).collect()
    }

    #[test]
    fn qgeneric_evaluations() {
        let (y1, y2) = (FreeVar::y(1), FreeVar::y(2));
        let f = bracket(q(), &[y1, y2]);
        let r = evaluate(&f, &qassign(&[y1, y2]), InvolutionKind::Star).unwrap();
        let coef = &(&ev(Letter::Y, 1, 1, 1) * &ev(Letter::Y, 1, 2, 2)) - &(&ev(Letter::Y, 1, 1, 2) * &ev(Letter::Y, 1, 2, 1));
        let expected = UTMatrix::from_entries(3, q(), [(1, 2, coef.clone()), (2, 3, -&coef)]);
        assert_eq!(r, expected);

        let zs: Vec<FreeVar> = (1..=3).map(FreeVar::z).collect();
        let z = |r, col, t| ev(Letter::Z, r, col, t);
        let f = bracket(q(), &zs[..2]);
        let r = evaluate(&f, &qassign(&zs), InvolutionKind::Star).unwrap();
        let coef = &(&z(1, 1, 1) * &z(1, 2, 2)) - &(&z(1, 2, 1) * &z(1, 1, 2));
        assert_eq!(r, UTMatrix::from_entries(3, q(), [(1, 2, coef.clone()), (2, 3, -&coef)]));

        let f = &FreePoly::var(q(), zs[0]) * &bracket(q(), &zs[1..]);
        let r = evaluate(&f, &qassign(&zs), InvolutionKind::Star).unwrap();
        let coef = &(&z(1, 1, 2) * &z(1, 2, 3)) - &(&z(1, 2, 2) * &z(1, 1, 3));
        let expected = UTMatrix::from_entries(
            3,
            q(),
            [(1, 2, &coef * &z(1, 1, 1)), (1, 3, -&(&coef * &z(1, 2, 1)))],
        );
        assert_eq!(r, expected);
    }

    #[test]
    fn evaluation_errors() {
        let f = FreePoly::var(q(), FreeVar::y(1));
        let empty = BTreeMap::new();
        assert_eq!(
            evaluate(&f, &empty, InvolutionKind::Star),
            Err(MatRepError::UnassignedVariable(FreeVar::y(1)))
        );
        let bad: BTreeMap<_, _> = [(FreeVar::y(1), qgeneric(Letter::Z, 1, q()))].into();
        assert!(matches!(
            evaluate(&f, &bad, InvolutionKind::Star),
            Err(MatRepError::ParityViolation { .. })
        ));
        let g = commutator(&f, &FreePoly::var(q(), FreeVar::y(2)));
        let mixed: BTreeMap<_, _> = [
            (FreeVar::y(1), UTMatrix::identity(3, q())),
            (FreeVar::y(2), UTMatrix::identity(4, q())),
        ]
        .into();
        assert!(matches!(
            evaluate(&g, &mixed, InvolutionKind::Star),
            Err(MatRepError::SizeMismatch { .. })
        ));
        let one = FreePoly::one(q());
        assert_eq!(
            evaluate(&one, &qassign(&[FreeVar::y(1)]), InvolutionKind::Star).unwrap(),
            UTMatrix::identity(3, q())
        );
    }

    fn small_poly() -> impl Strategy<Value = FreePoly> {
        let letter = prop_oneof![
            Just(FreeVar::y(1)),
            Just(FreeVar::y(2)),
            Just(FreeVar::z(1)),
            Just(FreeVar::z(2))
        ];
        prop::collection::vec((-3i64..4, prop::collection::vec(letter, 0..4)), 0..4).prop_map(|terms| {
            FreePoly::from_terms(
                q(),
                terms.into_iter().map(|(c, w)| (Word::from_letters(w), q().from_i64(c))),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn evaluation_is_equivariant_homomorphism(f in small_poly(), g in small_poly(), four in any::<bool>()) {
            let (n, kind) = if four { (4, InvolutionKind::S) } else { (3, InvolutionKind::Star) };
            let vars = [FreeVar::y(1), FreeVar::y(2), FreeVar::z(1), FreeVar::z(2)];
            let a = generic_assignment(&vars, n, kind, q()).unwrap();
            let ef = evaluate(&f, &a, kind).unwrap();
            let eg = evaluate(&g, &a, kind).unwrap();
            prop_assert_eq!(evaluate(&(&f * &g), &a, kind).unwrap(), ef.mul(&eg));
            prop_assert_eq!(evaluate(&f.involution(), &a, kind).unwrap(), apply_involution(&ef, kind).unwrap());
        }

        #[test]
        fn involution_has_order_two(f in small_poly(), g in small_poly()) {
            prop_assert_eq!(f.involution().involution(), f.clone());
            prop_assert_eq!((&f * &g).involution(), &g.involution() * &f.involution());
        }
    }
}
