//! Multirelations: matrices of natural multiplicities between finite index
//! sets, composed by sum-of-products. Hom-sets are infinite (one matrix per
//! entry assignment), so they are carried symbolically by dimension; only
//! identities and composition work on concrete matrices.

use crate::budget::Budget;
use crate::encode::{function_graph, kpair, Family};
use crate::error::Error;
use crate::set::SetTerm;
use crate::universe::{is_small, UniverseSpec};

/// Row-major natural-number matrix. A p: rows x cols is read as a
/// multirelation from a rows-element set to a cols-element set.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<u64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<u64>) -> Result<Matrix, Error> {
        if data.len() != rows * cols {
            return Err(Error::Presentation(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zero(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    /// The matrix as a single hereditarily finite term:
    /// ((rows, cols), graph), the graph sending each index pair to the
    /// entry's numeral. Dimensions are part of the term so that empty
    /// matrices of different shapes stay distinct.
    pub fn to_set_term(&self, budget: &Budget) -> Result<SetTerm, Error> {
        let mut fam = Family::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let e = self.get(i, j);
                if e >= budget.max_children as u64 {
                    return Err(Error::Budget {
                        what: format!("numeral for matrix entry {}", e),
                        limit: budget.max_children as u64,
                        actual: Some(e),
                    });
                }
                fam.insert(
                    kpair(SetTerm::numeral(i), SetTerm::numeral(j)),
                    SetTerm::numeral(e as usize),
                );
            }
        }
        let dims = kpair(SetTerm::numeral(self.rows), SetTerm::numeral(self.cols));
        Ok(kpair(dims, function_graph(&fam)))
    }
}

/// Identity multirelation on an n-element index set: 1 on the diagonal.
pub fn multirel_id(n: usize) -> Matrix {
    let mut m = Matrix::zero(n, n);
    for i in 0..n {
        m.data[i * n + i] = 1;
    }
    m
}

/// Diagrammatic composite (p then q): entry (a, c) is the sum over b of
/// p[a][b] * q[b][c]. Requires p.cols == q.rows.
pub fn multirel_compose(p: &Matrix, q: &Matrix) -> Result<Matrix, Error> {
    if p.cols != q.rows {
        return Err(Error::Dimension {
            p_rows: p.rows,
            p_cols: p.cols,
            q_rows: q.rows,
            q_cols: q.cols,
        });
    }
    let mut out = Matrix::zero(p.rows, q.cols);
    for a in 0..p.rows {
        for c in 0..q.cols {
            let mut acc: u64 = 0;
            for b in 0..p.cols {
                let prod = p.get(a, b).checked_mul(q.get(b, c));
                acc = prod
                    .and_then(|x| acc.checked_add(x))
                    .ok_or(Error::Budget {
                        what: "multirelation entry overflow".to_string(),
                        limit: u64::MAX,
                        actual: None,
                    })?;
            }
            out.data[a * q.cols + c] = acc;
        }
    }
    Ok(out)
}

/// Symbolic description of a multirelation hom-set: all rows x cols natural
/// matrices. Nondegenerate dimensions give infinitely many matrices, so the
/// collection is never small; under HF every matrix term is itself small,
/// making the collection a class, while under any Vn a matrix with a large
/// enough entry escapes, so the collection is not even a class.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct MultirelHomDesc {
    pub rows: usize,
    pub cols: usize,
}

impl MultirelHomDesc {
    fn lone_matrix_term(&self) -> Option<SetTerm> {
        if self.rows == 0 || self.cols == 0 {
            let m = Matrix::zero(self.rows, self.cols);
            Some(m.to_set_term(&Budget::default()).expect("empty matrix term is tiny"))
        } else {
            None
        }
    }

    pub fn is_small(&self, u: UniverseSpec) -> bool {
        match self.lone_matrix_term() {
            Some(t) => is_small(SetTerm::singleton(t), u),
            None => false,
        }
    }

    pub fn is_class(&self, u: UniverseSpec) -> bool {
        match self.lone_matrix_term() {
            Some(t) => is_small(t, u),
            None => match u {
                UniverseSpec::HF => true,
                UniverseSpec::Vn(_) => false,
            },
        }
    }

    /// For Vn, a concrete member whose term is not small, witnessing the
    /// failure of the class judgment. HF has no such witness.
    pub fn witness_not_small(&self, u: UniverseSpec) -> Option<Matrix> {
        let UniverseSpec::Vn(n) = u else { return None };
        if self.rows == 0 || self.cols == 0 {
            return None;
        }
        let mut m = Matrix::zero(self.rows, self.cols);
        m.data[0] = n as u64;
        Some(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::set::canon;

    #[test]
    fn identity_is_diagonal() {
        let id = multirel_id(2);
        assert_eq!(id, Matrix::new(2, 2, vec![1, 0, 0, 1]).unwrap());
    }

    #[test]
    fn one_by_one_composite_multiplies() {
        let p = Matrix::new(1, 1, vec![2]).unwrap();
        let q = Matrix::new(1, 1, vec![3]).unwrap();
        assert_eq!(multirel_compose(&p, &q).unwrap(), Matrix::new(1, 1, vec![6]).unwrap());
    }

    #[test]
    fn unit_laws() {
        let p = Matrix::new(3, 2, vec![4, 0, 1, 5, 2, 3]).unwrap();
        let left = multirel_compose(&multirel_id(3), &p).unwrap();
        let right = multirel_compose(&p, &multirel_id(2)).unwrap();
        assert_eq!(left, p);
        assert_eq!(right, p);
    }

    #[test]
    fn associativity_fixed_triple() {
        let p = Matrix::new(2, 3, vec![1, 2, 0, 3, 1, 1]).unwrap();
        let q = Matrix::new(3, 2, vec![0, 1, 2, 2, 5, 0]).unwrap();
        let r = Matrix::new(2, 2, vec![1, 3, 4, 0]).unwrap();
        let lhs = multirel_compose(&multirel_compose(&p, &q).unwrap(), &r).unwrap();
        let rhs = multirel_compose(&p, &multirel_compose(&q, &r).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let p = Matrix::new(2, 3, vec![0; 6]).unwrap();
        let q = Matrix::new(2, 2, vec![0; 4]).unwrap();
        assert!(matches!(multirel_compose(&p, &q), Err(Error::Dimension { .. })));
    }

    #[test]
    fn terms_are_injective_on_shape_and_entries() {
        let b = Budget::default();
        let t1 = Matrix::zero(0, 3).to_set_term(&b).unwrap();
        let t2 = Matrix::zero(3, 0).to_set_term(&b).unwrap();
        assert_ne!(t1, t2);
        let m = Matrix::new(1, 1, vec![2]).unwrap().to_set_term(&b).unwrap();
        let one = SetTerm::numeral(1);
        let idx = kpair(SetTerm::numeral(0), SetTerm::numeral(0));
        let graph = canon(vec![kpair(idx, SetTerm::numeral(2))]);
        assert_eq!(m, kpair(kpair(one, one), graph));
    }

    #[test]
    fn homset_descriptor_judgments() {
        let d = MultirelHomDesc { rows: 2, cols: 2 };
        assert!(!d.is_small(UniverseSpec::HF));
        assert!(d.is_class(UniverseSpec::HF));
        for n in [1, 3, 6] {
            let u = UniverseSpec::Vn(n);
            assert!(!d.is_small(u));
            assert!(!d.is_class(u));
            let w = d.witness_not_small(u).unwrap();
            let t = w.to_set_term(&Budget::default()).unwrap();
            assert!(!is_small(t, u), "witness under {}", u);
        }
        let degenerate = MultirelHomDesc { rows: 0, cols: 3 };
        assert!(degenerate.is_small(UniverseSpec::HF));
        assert!(degenerate.is_class(UniverseSpec::HF));
    }
}
