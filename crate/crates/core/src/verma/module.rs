use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grade::GradeIndex;
use crate::linalg::{Matrix, SparseVec};
use crate::products::star_n;
use crate::quotient::FilteredQuotient;
use crate::scalar::{parse_fraction, to_fraction_string, Scalar};
use crate::voa::{phi_map, vacuum, Element, VertexAlgebra};

/// One coset representative and the matrix by which it acts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionEntry {
    pub word: String,
    /// Row-major, entries as exact fraction strings.
    pub matrix: Vec<Vec<String>>,
}

/// On-disk description of a finite-dimensional `A_{g,m}(V)`-module.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AModuleSpec {
    pub m: String,
    pub dim: usize,
    pub action: Vec<ActionEntry>,
}

impl AModuleSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("module spec serializes")
    }

    /// The module on which every coset rep acts by the scalar its normal
    /// form has on the identity coset; needs the algebra to be spanned by
    /// the identity.
    pub fn one_dimensional<A: VertexAlgebra>(q: &FilteredQuotient<A>) -> Result<Self> {
        let alg = q.context().algebra();
        let one = q.normal_form(&vacuum(alg))?;
        if q.dim() != 1 || one.is_empty() {
            return Err(Error::Config(
                "the one-dimensional module needs a one-dimensional algebra".into(),
            ));
        }
        let rep = &q.coset_reps()[0];
        let scale = one.coeff(rep);
        let entry = to_fraction_string(&(<Scalar as num_traits::One>::one() / scale));
        Ok(Self {
            m: q.m.to_string(),
            dim: 1,
            action: vec![ActionEntry {
                word: rep.to_string(),
                matrix: vec![vec![entry]],
            }],
        })
    }
}

/// A validated module over the filtered `A_{g,m}(V)`.
#[derive(Clone)]
pub struct AModule<A: VertexAlgebra> {
    quotient: Arc<FilteredQuotient<A>>,
    dim: usize,
    /// Aligned with the coset reps of `quotient`.
    matrices: Vec<Matrix>,
}

impl<A: VertexAlgebra> AModule<A> {
    /// Checks that every coset rep has a matrix, that the identity coset
    /// acts as the identity, and that products of reps within the weight
    /// cap act as products of matrices.
    pub fn from_spec(spec: &AModuleSpec, quotient: Arc<FilteredQuotient<A>>) -> Result<Self> {
        let bad = |msg: String| Error::InvalidModule(msg);
        let alg = quotient.context().algebra();
        let t = quotient.context().order();
        let m = GradeIndex::parse(&spec.m, t).map_err(|e| bad(e.to_string()))?;
        if m != quotient.m || m != quotient.n {
            return Err(bad(format!(
                "module is over A_{{g,{m}}}, algebra is A_{{g,{}}}",
                quotient.n
            )));
        }
        let reps = quotient.coset_reps();
        let mut matrices: Vec<Option<Matrix>> = vec![None; reps.len()];
        for entry in &spec.action {
            let word = alg
                .parse_word(&entry.word)
                .map_err(|e| bad(e.to_string()))?;
            let idx = reps
                .iter()
                .position(|r| *r == word)
                .ok_or_else(|| bad(format!("{} is not a coset representative", entry.word)))?;
            let rows = entry
                .matrix
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|x| parse_fraction(x))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()
                .map_err(|e| bad(e.to_string()))?;
            let mat = if spec.dim == 0 {
                Matrix::zeros(0, 0)
            } else {
                Matrix::from_rows(rows).ok_or_else(|| bad("ragged matrix".into()))?
            };
            if mat.nrows() != spec.dim || mat.ncols() != spec.dim {
                return Err(bad(format!(
                    "matrix of {} is {}x{}, expected {}x{}",
                    entry.word,
                    mat.nrows(),
                    mat.ncols(),
                    spec.dim,
                    spec.dim
                )));
            }
            if matrices[idx].replace(mat).is_some() {
                return Err(bad(format!("{} listed twice", entry.word)));
            }
        }
        let matrices = matrices
            .into_iter()
            .zip(reps)
            .map(|(m, r)| {
                m.or_else(|| (spec.dim == 0).then(|| Matrix::zeros(0, 0)))
                    .ok_or_else(|| bad(format!("no matrix for {r}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let module = Self {
            quotient,
            dim: spec.dim,
            matrices,
        };
        module.validate()?;
        Ok(module)
    }

    fn from_matrices(
        quotient: Arc<FilteredQuotient<A>>,
        dim: usize,
        matrices: Vec<Matrix>,
    ) -> Self {
        Self {
            quotient,
            dim,
            matrices,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let q = &self.quotient;
        let ctx = q.context();
        let alg = ctx.algebra();
        let one = self.act(&vacuum(alg))?;
        if one != Matrix::identity(self.dim) {
            return Err(Error::InvalidModule(format!(
                "the identity coset acts as {:?}, not the identity",
                one.to_strings()
            )));
        }
        let reps = q.coset_reps();
        for (i, a) in reps.iter().enumerate() {
            for (j, b) in reps.iter().enumerate() {
                if alg.weight(a) + alg.weight(b) > q.w {
                    continue;
                }
                let ab = star_n(
                    ctx,
                    &SparseVec::unit(a.clone()),
                    &SparseVec::unit(b.clone()),
                    &q.n,
                );
                let lhs = self.act(&ab)?;
                let rhs = self.matrices[i].mul(&self.matrices[j]);
                if lhs != rhs {
                    return Err(Error::InvalidModule(format!(
                        "[{a}]*[{b}] acts as {:?}, but [{a}][{b}] is {:?}",
                        lhs.to_strings(),
                        rhs.to_strings()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grade(&self) -> GradeIndex {
        self.quotient.n
    }

    pub fn quotient(&self) -> &Arc<FilteredQuotient<A>> {
        &self.quotient
    }

    /// Matrix of `x + O_{g,m}(V)`.
    pub fn act(&self, x: &Element<A::Word>) -> Result<Matrix> {
        let coords = self.quotient.coordinates(x)?;
        let mut out = Matrix::zeros(self.dim, self.dim);
        for (c, m) in coords.iter().zip(&self.matrices) {
            if !num_traits::Zero::is_zero(c) {
                out = out.axpy(c, m);
            }
        }
        Ok(out)
    }

    /// The dual `U*` as a module over `A_{g^{-1},m}(V)`, acting by
    /// `u . f = f(phi(u) . -)`.
    pub fn dual(&self, inverse_quotient: Arc<FilteredQuotient<A>>) -> Result<Self> {
        let alg = self.quotient.context().algebra();
        let matrices = inverse_quotient
            .coset_reps()
            .iter()
            .map(|r| {
                let x = phi_map(alg, &SparseVec::unit(r.clone()));
                Ok(self.act(&x)?.transpose())
            })
            .collect::<Result<Vec<_>>>()?;
        let dual = Self::from_matrices(inverse_quotient, self.dim, matrices);
        dual.validate()?;
        Ok(dual)
    }
}
