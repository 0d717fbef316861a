//! Exact sparse linear algebra: subspaces of `F^dim` kept in reduced row
//! echelon form.

use std::collections::BTreeMap;

use crate::scalars::{FieldSpec, Scalar};

/// A sparse vector: `(column, value)` pairs with strictly increasing columns
/// and nonzero values.
pub type SparseVec = Vec<(usize, Scalar)>;

/// Builds a sparse vector from arbitrary `(column, value)` pairs, summing
/// repeats and dropping zeros.
pub fn sparse_from_pairs<I: IntoIterator<Item = (usize, Scalar)>>(pairs: I) -> SparseVec {
    let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
    for (c, v) in pairs {
        match acc.get_mut(&c) {
            Some(x) => *x = &*x + &v,
            None => {
                acc.insert(c, v);
            }
        }
    }
    acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

/// `a + c·b`.
pub fn axpy(a: &[(usize, Scalar)], c: &Scalar, b: &[(usize, Scalar)]) -> SparseVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            let v = c * &b[j].1;
            if !v.is_zero() {
                out.push((b[j].0, v));
            }
            j += 1;
        } else {
            let v = &a[i].1 + &(c * &b[j].1);
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn scale_vec(v: &[(usize, Scalar)], c: &Scalar) -> SparseVec {
    if c.is_zero() {
        return Vec::new();
    }
    v.iter().map(|(k, x)| (*k, x * c)).collect()
}

fn lookup(v: &[(usize, Scalar)], col: usize) -> Option<&Scalar> {
    v.binary_search_by_key(&col, |(k, _)| *k).ok().map(|i| &v[i].1)
}

/// A subspace of `F^dim` in reduced row echelon form: every row has leading
/// entry 1, and every pivot column is zero in all other rows.
#[derive(Debug, Clone)]
pub struct Echelon {
    field: FieldSpec,
    dim: usize,
    rows: Vec<SparseVec>,
    pivots: BTreeMap<usize, usize>,
}

impl Echelon {
    pub fn new(field: FieldSpec, dim: usize) -> Self {
        Echelon {
            field,
            dim,
            rows: Vec::new(),
            pivots: BTreeMap::new(),
        }
    }

    /// The whole space `F^dim`.
    pub fn full(field: FieldSpec, dim: usize) -> Self {
        let mut e = Self::new(field, dim);
        for c in 0..dim {
            e.rows.push(vec![(c, field.one())]);
            e.pivots.insert(c, c);
        }
        e
    }

    pub fn from_vectors<I: IntoIterator<Item = SparseVec>>(field: FieldSpec, dim: usize, vs: I) -> Self {
        let mut e = Self::new(field, dim);
        for v in vs {
            e.insert(v);
        }
        e
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.dim
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    /// Rows sorted by pivot column: the canonical basis.
    pub fn rows(&self) -> Vec<&SparseVec> {
        self.pivots.values().map(|&i| &self.rows[i]).collect()
    }

    /// The part of `v` outside the row space, expressed on non-pivot columns.
    pub fn reduce(&self, v: &[(usize, Scalar)]) -> SparseVec {
        let mut out: SparseVec = v.to_vec();
        for (c, x) in v {
            if let Some(&r) = self.pivots.get(c) {
                out = axpy(&out, &-x, &self.rows[r]);
            }
        }
        out
    }

    pub fn contains(&self, v: &[(usize, Scalar)]) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        if self.is_full() {
            return false;
        }
        let r = self.reduce(&v);
        let Some((p, lead)) = r.first().cloned() else {
            return false;
        };
        let r = scale_vec(&r, &lead.inv().expect("nonzero lead"));
        for row in self.rows.iter_mut() {
            if let Some(x) = lookup(row, p) {
                let x = -x;
                *row = axpy(row, &x, &r);
            }
        }
        self.pivots.insert(p, self.rows.len());
        self.rows.push(r);
        true
    }

    /// Coefficients `c` (one per canonical row, in pivot order) with
    /// `v = Σ c_i row_i`, when `v` lies in the span.
    pub fn coordinates(&self, v: &[(usize, Scalar)]) -> Option<Vec<Scalar>> {
        if !self.contains(v) {
            return None;
        }
        Some(
            self.pivots
                .keys()
                .map(|&p| lookup(v, p).cloned().unwrap_or_else(|| self.field.zero()))
                .collect(),
        )
    }

    /// `{x : row · x = 0 for every row}`.
    pub fn orthogonal_complement(&self) -> Echelon {
        let mut out = Echelon::new(self.field, self.dim);
        // column f of the canonical rows gives the kernel vector e_f − Σ R_i[f] e_{p_i}
        let mut by_col: BTreeMap<usize, Vec<(usize, Scalar)>> = BTreeMap::new();
        for (&p, &ri) in &self.pivots {
            for (c, x) in &self.rows[ri] {
                if *c != p {
                    by_col.entry(*c).or_default().push((p, -x));
                }
            }
        }
        for f in 0..self.dim {
            if self.pivots.contains_key(&f) {
                continue;
            }
            let mut v = by_col.remove(&f).unwrap_or_default();
            v.push((f, self.field.one()));
            v.sort_by_key(|(c, _)| *c);
            out.insert(v);
        }
        out
    }

    pub fn contains_subspace(&self, other: &Echelon) -> bool {
        other.rows.iter().all(|r| self.contains(r))
    }

    pub fn intersection(&self, other: &Echelon) -> Echelon {
        let mut sum = self.orthogonal_complement();
        for r in other.orthogonal_complement().rows {
            sum.insert(r);
        }
        sum.orthogonal_complement()
    }

    pub fn sum(&self, other: &Echelon) -> Echelon {
        let mut out = self.clone();
        for r in &other.rows {
            out.insert(r.clone());
        }
        out
    }

    /// Image under a coordinate map `col ↦ map[col]` into a space of size `dim`.
    pub fn map_columns(&self, map: &[usize], dim: usize, sign: &[Scalar]) -> Echelon {
        let mut out = Echelon::new(self.field, dim);
        for r in &self.rows {
            out.insert(sparse_from_pairs(r.iter().map(|(c, x)| (map[*c], x * &sign[*c]))));
        }
        out
    }
}

impl PartialEq for Echelon {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.dim == other.dim && self.rows() == other.rows()
    }
}

impl Eq for Echelon {}

/// Rank of a list of vectors.
pub fn rank<I: IntoIterator<Item = SparseVec>>(field: FieldSpec, dim: usize, vs: I) -> usize {
    Echelon::from_vectors(field, dim, vs).rank()
}

/// `{c : Σ c_i v_i = 0}` for the given vectors `v_i ∈ F^cols`, as a subspace of
/// `F^{vs.len()}`.
pub fn left_kernel(field: FieldSpec, vs: &[SparseVec]) -> Echelon {
    // columns of the matrix whose rows are vs, seen as vectors in F^{vs.len()}
    let mut cols: BTreeMap<usize, Vec<(usize, Scalar)>> = BTreeMap::new();
    for (i, v) in vs.iter().enumerate() {
        for (c, x) in v {
            cols.entry(*c).or_default().push((i, x.clone()));
        }
    }
    let mut span = Echelon::new(field, vs.len());
    for (_, col) in cols {
        span.insert(col);
        if span.is_full() {
            break;
        }
    }
    span.orthogonal_complement()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f5() -> FieldSpec {
        FieldSpec::new(5).unwrap()
    }

    fn v(field: FieldSpec, dense: &[i64]) -> SparseVec {
        sparse_from_pairs(dense.iter().enumerate().map(|(i, &x)| (i, field.from_i64(x))))
    }

    #[test]
    fn rref_basics() {
        let q = FieldSpec::RATIONALS;
        let mut e = Echelon::new(q, 3);
        assert!(e.insert(v(q, &[2, 4, 6])));
        assert!(!e.insert(v(q, &[1, 2, 3])));
        assert!(e.insert(v(q, &[0, 1, 1])));
        assert_eq!(e.rank(), 2);
        assert_eq!(e.rows(), vec![&v(q, &[1, 0, 1]), &v(q, &[0, 1, 1])]);
        let target = v(q, &[3, 5, 8]);
        let c = e.coordinates(&target).unwrap();
        assert_eq!(c, vec![q.from_i64(3), q.from_i64(5)]);
        assert!(e.coordinates(&v(q, &[0, 0, 1])).is_none());
        let k = e.orthogonal_complement();
        assert_eq!(k.rows(), vec![&v(q, &[1, 1, -1])]);
    }

    #[test]
    fn kernel_mod_5() {
        let f = f5();
        let rows = vec![v(f, &[1, 2]), v(f, &[2, 4]), v(f, &[0, 1])];
        let k = left_kernel(f, &rows);
        assert_eq!(k.rank(), 1);
        assert_eq!(k.rows(), vec![&v(f, &[1, 2, 0])]);
    }

    fn dense_vec() -> impl Strategy<Value = Vec<i64>> {
        prop::collection::vec(-2i64..3, 5)
    }

    proptest! {
        #[test]
        fn complement_dimensions(vs in prop::collection::vec(dense_vec(), 0..6), ws in prop::collection::vec(dense_vec(), 0..6)) {
            let f = f5();
            let a = Echelon::from_vectors(f, 5, vs.iter().map(|d| v(f, d)));
            let b = Echelon::from_vectors(f, 5, ws.iter().map(|d| v(f, d)));
            let c = a.orthogonal_complement();
            prop_assert_eq!(a.rank() + c.rank(), 5);
            prop_assert_eq!(c.orthogonal_complement(), a.clone());
            let i = a.intersection(&b);
            prop_assert_eq!(i.rank() + a.sum(&b).rank(), a.rank() + b.rank());
            prop_assert!(a.contains_subspace(&i) && b.contains_subspace(&i));
        }
    }
}
