use serde::Serialize;

use super::checks::{run_checks, CheckConfig, CheckRecord};
use super::pairing::{
    block_diagonal_record, dimension_identity, invariance_check, invariance_vectors,
    pairing_matrix, universal_check, DimCheck, PairingRecord,
};
use super::{AModule, AModuleSpec, LevelRecord, QuotientCache, VermaConfig, VermaModule};
use crate::error::Result;
use crate::grade::GradeIndex;
use crate::voa::{VertexAlgebra, VoaContext};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VermaReport {
    pub config: VermaConfig,
    pub checks_config: CheckConfig,
    pub m: String,
    pub module_dim: usize,
    pub dual_inverse: bool,
    pub levels: Vec<LevelRecord>,
    pub dual_levels: Vec<LevelRecord>,
    pub checks: Vec<CheckRecord>,
    pub invariance_vectors: Vec<String>,
    pub pairing: Vec<PairingRecord>,
    pub radical_zero: bool,
    /// `dim A_{g,n,m}(V)` against `dim M(U)(n) dim U*`; equality is expected
    /// when `U` is the only irreducible module.
    pub dimension_identity: Vec<DimCheck>,
    pub passed: bool,
}

/// Builds `M(U)` and `M(U*)`, runs every operator check and the pairing.
pub fn run_suite<A: VertexAlgebra>(
    ctx: &VoaContext<A>,
    spec: &AModuleSpec,
    cache: &QuotientCache<A>,
    checks: &CheckConfig,
) -> Result<VermaReport> {
    let t = ctx.order();
    let m0 = GradeIndex::parse(&spec.m, t)?;
    let algebra = cache.get(ctx, &m0, &m0)?;
    let module = AModule::from_spec(spec, algebra)?;
    let inv = ctx.inverse();
    let dual = module.dual(cache.get(&inv, &m0, &m0)?)?;

    let mu = VermaModule::build(ctx, module, cache)?;
    let mu_star = VermaModule::build(&inv, dual, cache)?;

    let mut records = run_checks(&mu, checks);
    let pairings = mu
        .n_max()
        .grades_upto()
        .iter()
        .map(|n| pairing_matrix(&mu, &mu_star, n))
        .collect::<Result<Vec<_>>>()?;
    let vectors = invariance_vectors(ctx.algebra());
    records.push(block_diagonal_record(pairings.len()));
    records.push(invariance_check(&mu, &mu_star, &pairings, &vectors));
    records.push(universal_check(&mu));

    let pairing: Vec<PairingRecord> = mu
        .levels()
        .iter()
        .zip(&pairings)
        .map(|(l, p)| PairingRecord::new(&l.n, p))
        .collect();
    let passed = records.iter().all(|r| r.passed);
    Ok(VermaReport {
        config: *cache.config(),
        checks_config: *checks,
        m: m0.to_string(),
        module_dim: mu.module().dim(),
        dual_inverse: inv.is_inverse(),
        levels: mu.level_records(),
        dual_levels: mu_star.level_records(),
        checks: records,
        invariance_vectors: vectors.iter().map(|v| v.to_string()).collect(),
        radical_zero: pairing.iter().all(|p| p.radical_dim == 0),
        pairing,
        dimension_identity: dimension_identity(&[&mu]),
        passed,
    })
}
