//! Verma-type twisted modules `M(U) = sum_n A_{g,n,m}(V) (x)_{A_{g,m}(V)} U`
//! built level by level from filtered bimodules, the mode operators `u_p`,
//! and the invariant pairing between `M(U*)` and `M(U)`.

mod checks;
mod module;
mod pairing;
mod suite;

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use num_traits::Zero;
use serde::Serialize;

pub use checks::{run_checks, CheckConfig, CheckRecord, Corrupted, ModeAction};
pub use module::{AModule, AModuleSpec, ActionEntry};
pub use pairing::{
    dimension_identity, invariance_check, invariance_vectors, pairing_matrix, universal_check,
    DimCheck, PairingRecord,
};
pub use suite::{run_suite, VermaReport};

use crate::error::{Error, Result};
use crate::generators::{GenBounds, Level};
use crate::grade::GradeIndex;
use crate::linalg::{Matrix, SpanBasis, SparseVec};
use crate::products::{star_nmp, star_right};
use crate::quotient::FilteredQuotient;
use crate::scalar::Scalar;
use crate::voa::{is_homogeneous, top_weight, Element, VertexAlgebra, VoaContext};

/// Budgets for the filtered bimodules behind each level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct VermaConfig {
    #[serde(rename = "W")]
    pub w: u32,
    #[serde(rename = "B")]
    pub b: u32,
    pub composite: u32,
    pub level: Level,
    /// Internal grade cutoff; `m + n + 2` per bimodule when absent.
    #[serde(rename = "P")]
    pub p_max: Option<GradeIndex>,
    #[serde(rename = "N")]
    pub n_max: GradeIndex,
}

impl VermaConfig {
    pub fn new(t: u32) -> Self {
        Self {
            w: 3,
            b: 12,
            composite: 3,
            level: Level::Full,
            p_max: None,
            n_max: GradeIndex::new(2, 0, t),
        }
    }

    fn bounds(&self, m: &GradeIndex, n: &GradeIndex) -> GenBounds {
        let p = self
            .p_max
            .unwrap_or_else(|| m.add(n).shift(2 * m.order() as i64));
        GenBounds::new(self.b, self.composite, p)
    }
}

/// Shares filtered bimodules between `M(U)`, `M(U*)` and the checks.
pub struct QuotientCache<A: VertexAlgebra> {
    cfg: VermaConfig,
    built: Mutex<BTreeMap<(bool, GradeIndex, GradeIndex), Arc<FilteredQuotient<A>>>>,
}

impl<A: VertexAlgebra> QuotientCache<A> {
    pub fn new(cfg: VermaConfig) -> Self {
        Self {
            cfg,
            built: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn config(&self) -> &VermaConfig {
        &self.cfg
    }

    /// The filtered `A_{g,n,m}(V)` for the context's automorphism.
    pub fn get(
        &self,
        ctx: &VoaContext<A>,
        m: &GradeIndex,
        n: &GradeIndex,
    ) -> Result<Arc<FilteredQuotient<A>>> {
        let key = (ctx.effective_inverse(), *m, *n);
        if let Some(q) = self.built.lock().expect("cache lock").get(&key) {
            return Ok(q.clone());
        }
        let bounds = self.cfg.bounds(m, n);
        let q = Arc::new(FilteredQuotient::build(
            ctx,
            *m,
            *n,
            self.cfg.w,
            bounds,
            self.cfg.level,
        )?);
        self.built
            .lock()
            .expect("cache lock")
            .insert(key, q.clone());
        Ok(q)
    }
}

/// A linear map between two levels; `to` may be negative, in which case
/// the matrix has no rows.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelMap {
    pub from: GradeIndex,
    pub to: GradeIndex,
    pub matrix: Matrix,
}

impl LevelMap {
    /// `self` after `first`.
    pub fn after(&self, first: &LevelMap) -> LevelMap {
        assert_eq!(
            self.from, first.to,
            "composing maps between mismatched levels"
        );
        LevelMap {
            from: first.from,
            to: self.to,
            matrix: self.matrix.mul(&first.matrix),
        }
    }
}

/// `M(U)(n)`: coset reps of `A_{g,n,m}(V)` tensored with a basis of `U`,
/// modulo `(v *_{g,m}^n a) (x) w - v (x) a.w`.
pub struct VermaLevel<A: VertexAlgebra> {
    pub n: GradeIndex,
    quotient: Arc<FilteredQuotient<A>>,
    relations: SpanBasis<(usize, usize)>,
    basis: Vec<(usize, usize)>,
}

impl<A: VertexAlgebra> VermaLevel<A> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Pairs (coset rep index, `U` basis index) that survive as a basis.
    pub fn basis(&self) -> &[(usize, usize)] {
        &self.basis
    }

    pub fn quotient(&self) -> &Arc<FilteredQuotient<A>> {
        &self.quotient
    }

    pub fn basis_labels(&self) -> Vec<String> {
        let reps = self.quotient.coset_reps();
        self.basis
            .iter()
            .map(|(i, k)| format!("{} (x) e{k}", reps[*i]))
            .collect()
    }

    fn read(&self, v: &SparseVec<(usize, usize)>) -> Vec<Scalar> {
        let r = self.relations.reduce(v);
        self.basis.iter().map(|k| r.coeff(k)).collect()
    }
}

pub struct VermaModule<A: VertexAlgebra> {
    ctx: VoaContext<A>,
    module: AModule<A>,
    n_max: GradeIndex,
    levels: Vec<VermaLevel<A>>,
}

impl<A: VertexAlgebra> VermaModule<A> {
    /// Builds levels `0, 1/T, ..., N`; the context must match the module's
    /// algebra (use the inverse context for a dual module).
    pub fn build(
        ctx: &VoaContext<A>,
        module: AModule<A>,
        cache: &QuotientCache<A>,
    ) -> Result<Self> {
        let n_max = cache.config().n_max;
        let m0 = module.grade();
        let mut levels = Vec::new();
        for n in n_max.grades_upto() {
            let quotient = cache.get(ctx, &m0, &n)?;
            levels.push(build_level(ctx, &module, n, quotient)?);
        }
        Ok(Self {
            ctx: ctx.clone(),
            module,
            n_max,
            levels,
        })
    }

    pub fn context(&self) -> &VoaContext<A> {
        &self.ctx
    }

    pub fn module(&self) -> &AModule<A> {
        &self.module
    }

    pub fn n_max(&self) -> GradeIndex {
        self.n_max
    }

    pub fn levels(&self) -> &[VermaLevel<A>] {
        &self.levels
    }

    pub fn level(&self, n: &GradeIndex) -> Result<&VermaLevel<A>> {
        if n.units() < 0 || *n > self.n_max {
            return Err(Error::Truncation(format!(
                "level {n} is outside the computed range 0..={}",
                self.n_max
            )));
        }
        Ok(&self.levels[n.units() as usize])
    }

    /// Dimension of `M(U)(n)`, zero below level 0.
    pub fn dim_at(&self, n: &GradeIndex) -> Result<usize> {
        if n.units() < 0 {
            return Ok(0);
        }
        Ok(self.level(n)?.dim())
    }

    /// Coordinates of `x (x) w` in the basis of `M(U)(n)`.
    pub fn tensor_coordinates(
        &self,
        n: &GradeIndex,
        x: &Element<A::Word>,
        w: &[Scalar],
    ) -> Result<Vec<Scalar>> {
        let level = self.level(n)?;
        let coords = level.quotient.coordinates(x)?;
        let mut v = SparseVec::new();
        for (i, c) in coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (k, wk) in w.iter().enumerate() {
                if !wk.is_zero() {
                    v.add_term((i, k), c * wk);
                }
            }
        }
        Ok(level.read(&v))
    }

    /// Target level of `u_p` on level `from` for `u` of weight `wt`.
    pub fn target(&self, wt: u32, p: &GradeIndex, from: &GradeIndex) -> GradeIndex {
        let t = self.ctx.order() as i64;
        from.shift(wt as i64 * t - p.units() - t)
    }

    /// `u_p (v (x) w) = (u *_{g,m,n}^{n'} v) (x) w` on an arbitrary
    /// representative, where `n' = n + wt u - p - 1`.
    pub fn act_on_tensor(
        &self,
        u: &Element<A::Word>,
        p: &GradeIndex,
        from: &GradeIndex,
        x: &Element<A::Word>,
        w: &[Scalar],
    ) -> Result<(GradeIndex, Vec<Scalar>)> {
        let wt = homogeneous_weight(self.ctx.algebra(), u)?;
        let to = self.target(wt, p, from);
        let dim = self.dim_at(&to)?;
        if to.units() < 0 || from.units() < 0 {
            return Ok((to, vec![Scalar::zero(); dim]));
        }
        let m0 = self.module.grade();
        let image = star_nmp(&self.ctx, u, x, &m0, from, &to);
        Ok((to, self.tensor_coordinates(&to, &image, w)?))
    }

    /// Matrix of `u_p` from level `from`, for homogeneous `u`.
    pub fn mode(
        &self,
        u: &Element<A::Word>,
        p: &GradeIndex,
        from: &GradeIndex,
    ) -> Result<LevelMap> {
        let wt = homogeneous_weight(self.ctx.algebra(), u)?;
        let to = self.target(wt, p, from);
        let rows = self.dim_at(&to)?;
        let cols = self.dim_at(from)?;
        let mut matrix = Matrix::zeros(rows, cols);
        if rows == 0 || cols == 0 {
            return Ok(LevelMap {
                from: *from,
                to,
                matrix,
            });
        }
        let m0 = self.module.grade();
        let src = self.level(from)?;
        let dst = self.level(&to)?;
        let reps = src.quotient.coset_reps();
        let mut images: BTreeMap<usize, Vec<Scalar>> = BTreeMap::new();
        for (col, (i, k)) in src.basis.iter().enumerate() {
            if !images.contains_key(i) {
                let v = SparseVec::unit(reps[*i].clone());
                let image = star_nmp(&self.ctx, u, &v, &m0, from, &to);
                images.insert(*i, dst.quotient.coordinates(&image)?);
            }
            let mut vec = SparseVec::new();
            for (j, c) in images[i].iter().enumerate() {
                if !c.is_zero() {
                    vec.add_term((j, *k), c.clone());
                }
            }
            for (row, c) in dst.read(&vec).into_iter().enumerate() {
                matrix[(row, col)] = c;
            }
        }
        Ok(LevelMap {
            from: *from,
            to,
            matrix,
        })
    }

    /// `o_{g,n,m}(x) = x_{wt x + m - n - 1}` as a map from level `m` to
    /// level `n`, extended linearly over the words of `x`.
    pub fn o_op(&self, x: &Element<A::Word>, m: &GradeIndex, n: &GradeIndex) -> Result<Matrix> {
        let alg = self.ctx.algebra();
        let t = self.ctx.order() as i64;
        let mut out = Matrix::zeros(self.dim_at(n)?, self.dim_at(m)?);
        for (word, c) in x.iter() {
            let p = GradeIndex::from_units(
                alg.weight(word) as i64 * t + m.units() - n.units() - t,
                t as u32,
            );
            let map = self.mode(&SparseVec::unit(word.clone()), &p, m)?;
            debug_assert_eq!(map.to, *n);
            out = out.axpy(c, &map.matrix);
        }
        Ok(out)
    }

    /// `[1] (x) w` in level `m`, as columns indexed by the basis of `U`.
    pub fn embed_module(&self) -> Result<Matrix> {
        let m0 = self.module.grade();
        let rows = self.dim_at(&m0)?;
        let one = crate::voa::vacuum(self.ctx.algebra());
        let dim = self.module.dim();
        let cols = (0..dim)
            .map(|k| {
                let mut e = vec![Scalar::zero(); dim];
                e[k] = num_traits::One::one();
                self.tensor_coordinates(&m0, &one, &e)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::from_columns(rows, &cols))
    }
}

fn homogeneous_weight<A: VertexAlgebra>(alg: &A, u: &Element<A::Word>) -> Result<u32> {
    if u.is_zero() || !is_homogeneous(alg, u) {
        return Err(Error::Config(format!(
            "mode operators need a nonzero homogeneous vector, got {u}"
        )));
    }
    Ok(top_weight(alg, u).expect("nonzero"))
}

fn build_level<A: VertexAlgebra>(
    ctx: &VoaContext<A>,
    module: &AModule<A>,
    n: GradeIndex,
    quotient: Arc<FilteredQuotient<A>>,
) -> Result<VermaLevel<A>> {
    let alg = ctx.algebra();
    let m0 = module.grade();
    let dim = module.dim();
    let reps = quotient.coset_reps();
    let algebra_reps = module.quotient().coset_reps();
    let mut relations = SpanBasis::new();
    for (i, v) in reps.iter().enumerate() {
        for a in algebra_reps {
            if alg.weight(v) + alg.weight(a) > quotient.w {
                continue;
            }
            let va = star_right(
                ctx,
                &SparseVec::unit(v.clone()),
                &SparseVec::unit(a.clone()),
                &m0,
                &n,
            );
            let coords = quotient.coordinates(&va)?;
            let action = module.act(&SparseVec::unit(a.clone()))?;
            for k in 0..dim {
                let mut rel = SparseVec::new();
                for (j, c) in coords.iter().enumerate() {
                    if !c.is_zero() {
                        rel.add_term((j, k), c.clone());
                    }
                }
                for l in 0..dim {
                    let c = &action[(l, k)];
                    if !c.is_zero() {
                        rel.add_term((i, l), -c.clone());
                    }
                }
                relations.insert(&rel);
            }
        }
    }
    let basis = (0..reps.len())
        .flat_map(|i| (0..dim).map(move |k| (i, k)))
        .filter(|key| !relations.is_pivot(key))
        .collect();
    Ok(VermaLevel {
        n,
        quotient,
        relations,
        basis,
    })
}

/// Serializable summary of one level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelRecord {
    pub n: String,
    pub dim: usize,
    pub bimodule_dim: usize,
    pub bimodule_stable: bool,
    pub basis: Vec<String>,
}

impl<A: VertexAlgebra> VermaModule<A> {
    pub fn level_records(&self) -> Vec<LevelRecord> {
        self.levels
            .iter()
            .map(|l| LevelRecord {
                n: l.n.to_string(),
                dim: l.dim(),
                bimodule_dim: l.quotient.dim(),
                bimodule_stable: l.quotient.is_stable(),
                basis: l.basis_labels(),
            })
            .collect()
    }
}
