//! Finite-dimensional Lie algebras given by structure constants
//! `[e_i, e_j] = sum_k c_ij^k e_k`.

use thiserror::Error;

use crate::exact::{vector, ExactError, Gauss, Matrix, Rat, Subspace};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LieError {
    #[error("structure constants are not antisymmetric at ({0}, {1})")]
    Antisymmetry(usize, usize),
    #[error("Jacobi identity fails on ({i}, {j}, {k})")]
    Jacobi { i: usize, j: usize, k: usize },
    #[error("elements {0} and {1} do not commute")]
    NonCommuting(usize, usize),
    #[error("spectrum is not rational or not diagonalizable: {0}")]
    NonRationalSpectrum(String),
    #[error("index out of range: {0}")]
    Index(String),
    #[error("subspace is not closed under the bracket")]
    NotClosed,
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Witness of a Jacobi failure: the basis triple and the nonzero cyclic sum.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiWitness {
    pub triple: (usize, usize, usize),
    pub residual: Vec<Gauss>,
}

#[derive(Clone, PartialEq, Debug)]
pub struct LieAlgebra {
    labels: Vec<String>,
    /// Sparse `table[i][j] = [(k, c_ij^k)]`.
    table: Vec<Vec<Vec<(usize, Gauss)>>>,
}

/// One common eigenspace of a commuting family, with the eigenvalue of each
/// family member.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSpace {
    pub weight: Vec<Rat>,
    pub space: Subspace,
}

impl LieAlgebra {
    /// Builds the algebra from triples; `(j, i, k)` entries are filled in by
    /// antisymmetry and conflicting duplicates are rejected.
    pub fn from_triples(labels: Vec<String>, triples: &[(usize, usize, usize, Gauss)]) -> Result<Self, LieError> {
        let n = labels.len();
        let mut dense = vec![vec![vector::zeros(n); n]; n];
        let mut seen = vec![vec![vec![false; n]; n]; n];
        for (i, j, k, c) in triples {
            let (i, j, k) = (*i, *j, *k);
            if i >= n || j >= n || k >= n {
                return Err(LieError::Index(format!("({i}, {j}, {k}) with dimension {n}")));
            }
            if i == j {
                if !c.is_zero() {
                    return Err(LieError::Antisymmetry(i, j));
                }
                continue;
            }
            let existing = if seen[i][j][k] { Some(dense[i][j][k].clone()) } else { None };
            if let Some(e) = existing {
                if e != *c {
                    return Err(LieError::Antisymmetry(i, j));
                }
            }
            dense[i][j][k] = c.clone();
            dense[j][i][k] = -c;
            seen[i][j][k] = true;
            seen[j][i][k] = true;
        }
        Ok(Self::from_dense_unchecked(labels, &dense))
    }

    /// Builds from `brackets[i][j] = [e_i, e_j]` and checks antisymmetry.
    pub fn from_brackets(labels: Vec<String>, brackets: &[Vec<Vec<Gauss>>]) -> Result<Self, LieError> {
        let n = labels.len();
        for i in 0..n {
            for j in 0..n {
                if vector::add(&brackets[i][j], &brackets[j][i]) != vector::zeros(n) {
                    return Err(LieError::Antisymmetry(i, j));
                }
            }
        }
        Ok(Self::from_dense_unchecked(labels, brackets))
    }

    fn from_dense_unchecked(labels: Vec<String>, dense: &[Vec<Vec<Gauss>>]) -> Self {
        let table = dense
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (k, c.clone())).collect())
                    .collect()
            })
            .collect();
        LieAlgebra { labels, table }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn basis_vector(&self, label: &str) -> Option<Vec<Gauss>> {
        self.index_of(label).map(|i| vector::unit(self.dim(), i))
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> Gauss {
        self.table[i][j].iter().find(|(kk, _)| *kk == k).map(|(_, c)| c.clone()).unwrap_or_else(Gauss::zero)
    }

    /// Mutable access for tests that corrupt a constant deliberately.
    pub fn set_structure_constant(&mut self, i: usize, j: usize, k: usize, c: Gauss) {
        for (a, b, v) in [(i, j, c.clone()), (j, i, -&c)] {
            let row = &mut self.table[a][b];
            row.retain(|(kk, _)| *kk != k);
            if !v.is_zero() {
                row.push((k, v));
                row.sort_by_key(|(kk, _)| *kk);
            }
        }
    }

    /// Nonzero constants with `i < j`, in lexicographic order.
    pub fn triples(&self) -> Vec<(usize, usize, usize, Gauss)> {
        let mut out = Vec::new();
        for i in 0..self.dim() {
            for j in i + 1..self.dim() {
                for (k, c) in &self.table[i][j] {
                    out.push((i, j, *k, c.clone()));
                }
            }
        }
        out
    }

    pub fn basis_bracket(&self, i: usize, j: usize) -> Vec<Gauss> {
        let mut v = vector::zeros(self.dim());
        for (k, c) in &self.table[i][j] {
            v[*k] = c.clone();
        }
        v
    }

    /// Bracket of coordinate vectors (complex coefficients allowed).
    pub fn bracket(&self, x: &[Gauss], y: &[Gauss]) -> Vec<Gauss> {
        let n = self.dim();
        let mut out = vector::zeros(n);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() || self.table[i][j].is_empty() {
                    continue;
                }
                let f = xi * yj;
                for (k, c) in &self.table[i][j] {
                    out[*k] += &(&f * c);
                }
            }
        }
        out
    }

    /// Matrix of `ad(x)`; column `j` is `[x, e_j]`.
    pub fn ad(&self, x: &[Gauss]) -> Matrix {
        let n = self.dim();
        let cols: Vec<Vec<Gauss>> = (0..n).map(|j| self.bracket(x, &vector::unit(n, j))).collect();
        Matrix::from_cols(n, &cols)
    }

    pub fn is_real(&self) -> bool {
        self.table.iter().flatten().flatten().all(|(_, c)| c.is_real())
    }

    /// Checks Jacobi on every basis triple `i < j < k` and returns the count.
    pub fn check_jacobi(&self) -> Result<usize, JacobiWitness> {
        let n = self.dim();
        let mut count = 0;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (ei, ej, ek) = (vector::unit(n, i), vector::unit(n, j), vector::unit(n, k));
                    let a = self.bracket(&ei, &self.basis_bracket(j, k));
                    let b = self.bracket(&ej, &self.basis_bracket(k, i));
                    let c = self.bracket(&ek, &self.basis_bracket(i, j));
                    let r = vector::add(&vector::add(&a, &b), &c);
                    if !vector::is_zero(&r) {
                        return Err(JacobiWitness { triple: (i, j, k), residual: r });
                    }
                    count += 1;
                }
            }
        }
        Ok(count)
    }

    /// `[V, W]` as a subspace.
    pub fn bracket_span(&self, v: &Subspace, w: &Subspace) -> Subspace {
        let mut out = Vec::new();
        for a in v.basis() {
            for b in w.basis() {
                out.push(self.bracket(a, b));
            }
        }
        Subspace::span(self.dim(), out)
    }

    pub fn derived_algebra(&self) -> Subspace {
        let full = Subspace::full(self.dim());
        self.bracket_span(&full, &full)
    }

    /// `g = D^0 ⊇ D^1 ⊇ ...` until it stabilizes.
    pub fn derived_series(&self) -> Vec<Subspace> {
        let mut series = vec![Subspace::full(self.dim())];
        loop {
            let last = series.last().unwrap();
            let next = self.bracket_span(last, last);
            if next.dim() == last.dim() {
                return series;
            }
            let done = next.dim() == 0;
            series.push(next);
            if done {
                return series;
            }
        }
    }

    pub fn is_solvable(&self) -> bool {
        self.derived_series().last().is_some_and(|s| s.dim() == 0)
    }

    /// Solvable with every `ad(e_i)` having rational spectrum.
    pub fn is_split_solvable(&self) -> bool {
        self.is_solvable()
            && (0..self.dim()).all(|i| self.ad(&vector::unit(self.dim(), i)).rational_eigenvalues().is_ok())
    }

    /// Common eigenspaces of `ad(h)` over a commuting family `hs`.
    pub fn simultaneous_eigenspaces(&self, hs: &[Vec<Gauss>]) -> Result<Vec<WeightSpace>, LieError> {
        let n = self.dim();
        for a in 0..hs.len() {
            for b in a + 1..hs.len() {
                if !vector::is_zero(&self.bracket(&hs[a], &hs[b])) {
                    return Err(LieError::NonCommuting(a, b));
                }
            }
        }
        let mut blocks = vec![(Vec::<Rat>::new(), Subspace::full(n))];
        for h in hs {
            let ad = self.ad(h);
            let mut next = Vec::new();
            for (weight, space) in blocks {
                let basis = space.basis().to_vec();
                let frame = Matrix::from_cols(n, &basis);
                let cols = basis
                    .iter()
                    .map(|b| frame.solve_unique(&ad.mul_vec(b)))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| LieError::NonRationalSpectrum("block is not invariant".into()))?;
                let restricted = Matrix::from_cols(basis.len(), &cols);
                let eig =
                    restricted.rational_eigenvalues().map_err(|e| LieError::NonRationalSpectrum(e.to_string()))?;
                let mut total = 0;
                for (lambda, _) in eig {
                    let shifted = restricted.sub(&Matrix::identity(basis.len()).scale(&Gauss::real(lambda.clone())));
                    let ker = shifted.kernel();
                    total += ker.len();
                    let vecs = ker.iter().map(|c| frame.mul_vec(c));
                    let mut w = weight.clone();
                    w.push(lambda);
                    next.push((w, Subspace::span(n, vecs)));
                }
                if total != basis.len() {
                    return Err(LieError::NonRationalSpectrum("ad is not diagonalizable".into()));
                }
            }
            blocks = next;
        }
        Ok(blocks.into_iter().map(|(weight, space)| WeightSpace { weight, space }).collect())
    }

    /// `{x ∈ V : [x, W] ⊆ W}`.
    pub fn relative_normalizer(&self, v: &Subspace, w: &Subspace) -> Subspace {
        let ann = w.annihilator();
        let mut rows = Vec::new();
        for wb in w.basis() {
            let images: Vec<Vec<Gauss>> = v.basis().iter().map(|vb| self.bracket(vb, wb)).collect();
            for f in &ann {
                rows.push(images.iter().map(|img| vector::dot(f, img)).collect::<Vec<_>>());
            }
        }
        if rows.is_empty() {
            return v.clone();
        }
        let ker = Matrix::from_rows(rows).kernel();
        Subspace::span(
            self.dim(),
            ker.iter().map(|c| {
                let mut x = vector::zeros(self.dim());
                for (ci, b) in c.iter().zip(v.basis()) {
                    vector::axpy(&mut x, ci, b);
                }
                x
            }),
        )
    }

    /// The algebra spanned by the first `k` basis vectors.
    pub fn prefix_subalgebra(&self, k: usize) -> Result<LieAlgebra, LieError> {
        let mut triples = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                for (kk, c) in &self.table[i][j] {
                    if *kk >= k {
                        return Err(LieError::NotClosed);
                    }
                    triples.push((i, j, *kk, c.clone()));
                }
            }
        }
        LieAlgebra::from_triples(self.labels[..k].to_vec(), &triples)
    }

    pub fn format(&self, v: &[Gauss]) -> String {
        vector::format_combination(v, &self.labels)
    }

    /// Bracket table lines `[a, b] = c` for `i < j` with nonzero result.
    pub fn bracket_table_lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        for i in 0..self.dim() {
            for j in i + 1..self.dim() {
                let v = self.basis_bracket(i, j);
                if !vector::is_zero(&v) {
                    out.push(format!("[{}, {}] = {}", self.labels[i], self.labels[j], self.format(&v)));
                }
            }
        }
        out
    }
}
