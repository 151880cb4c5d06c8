//! Subspaces of `C^n` kept in reduced row echelon form, so equality of
//! subspaces is equality of bases. Spans of real vectors stay real.

use super::matrix::Matrix;
use super::scalar::Gauss;
use super::vector;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<Gauss>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace::span(ambient, (0..ambient).map(|i| vector::unit(ambient, i)))
    }

    pub fn span<I: IntoIterator<Item = Vec<Gauss>>>(ambient: usize, vectors: I) -> Self {
        let rows: Vec<Vec<Gauss>> = vectors.into_iter().filter(|v| !vector::is_zero(v)).collect();
        if rows.is_empty() {
            return Subspace::zero(ambient);
        }
        assert!(rows.iter().all(|r| r.len() == ambient), "vector length differs from ambient");
        let (r, pivots) = Matrix::from_rows(rows).rref();
        let basis = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        Subspace { ambient, basis, pivots }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Gauss>] {
        &self.basis
    }

    /// Coordinates with respect to the echelon basis, if `v` lies in the span.
    pub fn coordinates(&self, v: &[Gauss]) -> Option<Vec<Gauss>> {
        let c: Vec<Gauss> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let mut w = vector::zeros(self.ambient);
        for (ci, b) in c.iter().zip(&self.basis) {
            vector::axpy(&mut w, ci, b);
        }
        (w == v).then_some(c)
    }

    pub fn contains(&self, v: &[Gauss]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_space(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|b| self.contains(b))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        Subspace::span(self.ambient, self.basis.iter().chain(&other.basis).cloned())
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        if self.dim() == 0 || other.dim() == 0 {
            return Subspace::zero(self.ambient);
        }
        // Solve sum a_i u_i - sum b_j w_j = 0.
        let mut cols: Vec<Vec<Gauss>> = self.basis.clone();
        cols.extend(other.basis.iter().map(|w| vector::neg(w)));
        let k = Matrix::from_cols(self.ambient, &cols).kernel();
        Subspace::span(
            self.ambient,
            k.iter().map(|c| {
                let mut v = vector::zeros(self.ambient);
                for (ci, u) in c.iter().zip(&self.basis) {
                    vector::axpy(&mut v, ci, u);
                }
                v
            }),
        )
    }

    /// Linear functionals (as row vectors) vanishing on this subspace.
    pub fn annihilator(&self) -> Vec<Vec<Gauss>> {
        if self.basis.is_empty() {
            return (0..self.ambient).map(|i| vector::unit(self.ambient, i)).collect();
        }
        Matrix::from_rows(self.basis.clone()).kernel()
    }

    pub fn is_real(&self) -> bool {
        self.basis.iter().all(|b| vector::is_real(b))
    }
}
