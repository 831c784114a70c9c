//! Brute-force finite-volume ground truth: explicit rooted trees, exhaustive
//! enumeration of admissible (hard-core) configurations, exact measures, and
//! the compatibility check against the boundary law.
//!
//! Two topologies are carried. The k-branch (every vertex, root included,
//! has k direct successors) is the setting where a constant solution of the
//! boundary law is exactly compatible, so the compatibility oracle uses it.
//! The full tree (root has k + 1 neighbors) is what the counting and
//! norm-dichotomy claims are about.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::analytic::exp_p;
use crate::error::{Error, Result};
use crate::factor::is_prime_u64;
use crate::model::{BoundaryField, ModelParams, Residual};
use crate::padic::PadicNumber;

/// Default ceiling on the number of vertices for full enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    KBranch,
    FullCayley,
}

impl std::fmt::Display for Topology {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Topology::KBranch => write!(f, "k_branch"),
            Topology::FullCayley => write!(f, "full_cayley"),
        }
    }
}

/// A rooted tree cut at depth n, vertices indexed in BFS order so that the
/// ball of radius n-1 is a prefix of the ball of radius n.
#[derive(Clone, Debug)]
pub struct FiniteVolume {
    order: u32,
    depth: u32,
    topology: Topology,
    parent: Vec<u32>,
    level_offsets: Vec<usize>,
}

/// Number of vertices of the ball of radius n.
pub fn expected_vertex_count(k: u32, n: u32, topology: Topology) -> u128 {
    let k = k as u128;
    let mut count: u128 = 1;
    let mut layer: u128 = 1;
    for level in 1..=n {
        layer = if level == 1 {
            match topology {
                Topology::KBranch => k,
                Topology::FullCayley => k + 1,
            }
        } else {
            layer * k
        };
        count += layer;
    }
    count
}

/// Build the explicit volume; errors when enumeration would be infeasible.
pub fn build_volume(k: u32, n: u32, topology: Topology, cap: usize) -> Result<FiniteVolume> {
    if k < 1 {
        return Err(Error::InvalidOrder);
    }
    let expected = expected_vertex_count(k, n, topology);
    if expected > cap as u128 {
        return Err(Error::CapExceeded {
            vertices: expected,
            cap,
        });
    }
    let mut parent = vec![0u32];
    let mut level_offsets = vec![0usize, 1];
    for level in 1..=n {
        let (start, end) = (
            level_offsets[level as usize - 1],
            level_offsets[level as usize],
        );
        for v in start..end {
            let succ = if level == 1 && topology == Topology::FullCayley {
                k + 1
            } else {
                k
            };
            for _ in 0..succ {
                parent.push(v as u32);
            }
        }
        level_offsets.push(parent.len());
    }
    debug_assert_eq!(parent.len() as u128, expected);
    Ok(FiniteVolume {
        order: k,
        depth: n,
        topology,
        parent,
        level_offsets,
    })
}

impl FiniteVolume {
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        if v == 0 {
            None
        } else {
            Some(self.parent[v] as usize)
        }
    }

    /// Vertex index range of the sphere of radius `level`.
    pub fn level_range(&self, level: u32) -> std::ops::Range<usize> {
        self.level_offsets[level as usize]..self.level_offsets[level as usize + 1]
    }

    /// The outer boundary sphere W_n.
    pub fn boundary_range(&self) -> std::ops::Range<usize> {
        self.level_range(self.depth)
    }
}

/// A hard-core configuration on a volume: no edge carries two occupied ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AdmissibleConfiguration {
    bits: u64,
    len: u32,
}

impl AdmissibleConfiguration {
    pub fn occupied(&self, v: usize) -> bool {
        (self.bits >> v) & 1 == 1
    }

    pub fn occupied_count(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn assignments(&self) -> Vec<u8> {
        (0..self.len as usize)
            .map(|v| self.occupied(v) as u8)
            .collect()
    }

    pub fn is_admissible(&self, vol: &FiniteVolume) -> bool {
        (1..vol.vertex_count())
            .all(|v| !(self.occupied(v) && self.occupied(vol.parent[v] as usize)))
    }

    /// Restriction to the first `len` vertices (a smaller ball).
    pub fn restrict(&self, len: u32) -> Self {
        let mask = if len >= 64 { u64::MAX } else { (1 << len) - 1 };
        AdmissibleConfiguration {
            bits: self.bits & mask,
            len,
        }
    }
}

/// Visit every admissible configuration in a fixed depth-first order
/// (vacant branch before occupied; children of an occupied vertex are forced
/// vacant, pruning the subtree of assignments).
pub fn for_each_admissible(
    vol: &FiniteVolume,
    f: &mut impl FnMut(AdmissibleConfiguration),
) -> Result<()> {
    let n = vol.vertex_count();
    if n > 63 {
        return Err(Error::CapExceeded {
            vertices: n as u128,
            cap: 63,
        });
    }
    fn walk(vol: &FiniteVolume, v: usize, bits: u64, f: &mut impl FnMut(AdmissibleConfiguration)) {
        let n = vol.vertex_count();
        if v == n {
            f(AdmissibleConfiguration {
                bits,
                len: n as u32,
            });
            return;
        }
        walk(vol, v + 1, bits, f);
        let parent_occupied = v > 0 && (bits >> vol.parent[v] as usize) & 1 == 1;
        if !parent_occupied {
            walk(vol, v + 1, bits | (1 << v), f);
        }
    }
    walk(vol, 0, 0, f);
    Ok(())
}

pub fn enumerate_admissible(vol: &FiniteVolume) -> Result<Vec<AdmissibleConfiguration>> {
    let mut out = Vec::new();
    for_each_admissible(vol, &mut |c| out.push(c))?;
    Ok(out)
}

/// Exact count of admissible configurations by the two-state subtree DP
/// (ways with the subtree root occupied / vacant), on the explicit volume.
pub fn count_admissible(vol: &FiniteVolume) -> BigUint {
    let n = vol.vertex_count();
    let mut occupied = vec![BigUint::one(); n];
    let mut vacant = vec![BigUint::one(); n];
    for v in (1..n).rev() {
        let p = vol.parent[v] as usize;
        let both = &occupied[v] + &vacant[v];
        occupied[p] = &occupied[p] * &vacant[v];
        vacant[p] = &vacant[p] * both;
    }
    &occupied[0] + &vacant[0]
}

/// The same count from the homogeneous level recursion, with no cap: every
/// depth-m subtree of a homogeneous tree has the same pair of counts.
pub fn count_admissible_unbounded(k: u32, n: u32, topology: Topology) -> Result<BigUint> {
    if k < 1 {
        return Err(Error::InvalidOrder);
    }
    let subtree = |depth: u32| -> (BigUint, BigUint) {
        let mut occ = BigUint::one();
        let mut vac = BigUint::one();
        for _ in 0..depth {
            let both = &occ + &vac;
            occ = vac.pow(k);
            vac = both.pow(k);
        }
        (occ, vac)
    };
    match topology {
        Topology::KBranch => {
            let (occ, vac) = subtree(n);
            Ok(occ + vac)
        }
        Topology::FullCayley => {
            if n == 0 {
                return Ok(BigUint::from(2u32));
            }
            let (occ, vac) = subtree(n - 1);
            let both = &occ + &vac;
            Ok(vac.pow(k + 1) + both.pow(k + 1))
        }
    }
}

/// The closed-form count 2^((k+1)(k^n - 1)/(k - 1)) + 1 for the full tree.
///
/// Exact only at depth n <= 1; from depth 2 on it overcounts (see the README
/// note), so the enumeration and the DP are the authority. Provided for
/// cross-checking, with k = 1 unsupported by the formula.
pub fn omega_count_closed_form(k: u32, n: u32) -> Result<BigUint> {
    if k < 2 {
        return Err(Error::ClosedFormUnsupportedOrder);
    }
    let k_big = BigUint::from(k);
    let edges = (BigUint::from(k + 1) * (k_big.pow(n) - BigUint::one())) / BigUint::from(k - 1);
    let edges_u32: u32 = edges
        .to_u32_digits()
        .first()
        .copied()
        .filter(|_| edges.bits() <= 20)
        .ok_or_else(|| Error::BadInput("closed-form exponent too large".into()))?;
    Ok(BigUint::from(2u32).pow(edges_u32) + BigUint::one())
}

fn valuation_of_biguint(n: &BigUint, p: u64) -> u32 {
    let mut v = 0;
    let mut cur = n.clone();
    let p_big = BigUint::from(p);
    while !cur.is_zero() {
        let (q, r) = num_integer::Integer::div_rem(&cur, &p_big);
        if !r.is_zero() {
            break;
        }
        v += 1;
        cur = q;
    }
    v
}

/// |count|_p as an exact rational, for any positive count.
pub fn padic_norm_of_count(count: &BigUint, p: u64) -> Result<BigRational> {
    if !is_prime_u64(p) {
        return Err(Error::NotPrime(p));
    }
    let v = valuation_of_biguint(count, p);
    Ok(BigRational::new(
        1.into(),
        num_bigint::BigInt::from(p).pow(v),
    ))
}

/// p-adic norm of the closed-form count.
pub fn omega_norm(k: u32, n: u32, p: u64) -> Result<BigRational> {
    padic_norm_of_count(&omega_count_closed_form(k, n)?, p)
}

/// Weight exp_p(J * #occupied) * prod over boundary x of z_(sigma(x), x),
/// with z_(1, x) = 1 and z_(0, x) the boundary value at level n.
pub fn measure_weight(
    vol: &FiniteVolume,
    config: &AdmissibleConfiguration,
    params: &ModelParams,
    boundary: &BoundaryField,
) -> Result<PadicNumber> {
    debug_assert!(config.is_admissible(vol));
    let occupied = config.occupied_count() as i64;
    let arg = params.coupling().mul(&PadicNumber::from_integer(
        occupied,
        params.prime(),
        params.precision().max(1),
    )?)?;
    let exp_part = exp_p(&arg)?;
    let z = boundary.value_at_level(vol.depth())?;
    let vacant_boundary = vol
        .boundary_range()
        .filter(|&v| !config.occupied(v))
        .count() as u64;
    exp_part.mul(&z.pow(vacant_boundary))
}

/// Z_n = sum of weights over all admissible configurations; errors when the
/// sum is indistinguishable from zero (p-adic cancellation).
pub fn partition_function(
    vol: &FiniteVolume,
    params: &ModelParams,
    boundary: &BoundaryField,
) -> Result<PadicNumber> {
    let mut total = PadicNumber::zero(params.prime(), params.precision().max(1));
    let mut error = None;
    for_each_admissible(vol, &mut |config| {
        if error.is_some() {
            return;
        }
        match measure_weight(vol, &config, params, boundary).and_then(|w| total.add(&w)) {
            Ok(t) => total = t,
            Err(e) => error = Some(e),
        }
    })?;
    if let Some(e) = error {
        return Err(e);
    }
    if total.is_zero_at_precision() {
        return Err(Error::ZeroPartitionFunction);
    }
    Ok(total)
}

/// mu_n(config) = weight / Z_n with the partition function supplied by the
/// caller (compute it once per volume).
pub fn mu_n(
    vol: &FiniteVolume,
    config: &AdmissibleConfiguration,
    params: &ModelParams,
    boundary: &BoundaryField,
    z_n: &PadicNumber,
) -> Result<PadicNumber> {
    measure_weight(vol, config, params, boundary)?.div(z_n)
}

/// Residual of sum over all configurations of mu_n minus 1.
pub fn normalization_residual(
    vol: &FiniteVolume,
    params: &ModelParams,
    boundary: &BoundaryField,
) -> Result<Residual> {
    let z_n = partition_function(vol, params, boundary)?;
    let mut total = PadicNumber::zero(params.prime(), params.precision().max(1));
    let mut error = None;
    for_each_admissible(vol, &mut |config| {
        if error.is_some() {
            return;
        }
        match mu_n(vol, &config, params, boundary, &z_n).and_then(|m| total.add(&m)) {
            Ok(t) => total = t,
            Err(e) => error = Some(e),
        }
    })?;
    if let Some(e) = error {
        return Err(e);
    }
    let one = PadicNumber::one(params.prime(), params.precision().max(1));
    Ok(Residual::from_value(&total.sub(&one)?))
}

/// Norm exponents (min, max) of mu_n over all admissible configurations:
/// |mu| = p^e, returned as the e range.
pub fn mu_norm_exponent_range(
    vol: &FiniteVolume,
    params: &ModelParams,
    boundary: &BoundaryField,
) -> Result<(i64, i64)> {
    let z_n = partition_function(vol, params, boundary)?;
    let mut lo = i64::MAX;
    let mut hi = i64::MIN;
    let mut error = None;
    for_each_admissible(vol, &mut |config| {
        if error.is_some() {
            return;
        }
        match mu_n(vol, &config, params, boundary, &z_n) {
            Ok(m) => match m.norm_exponent() {
                Some(e) => {
                    lo = lo.min(e);
                    hi = hi.max(e);
                }
                None => error = Some(Error::ZeroPartitionFunction),
            },
            Err(e) => error = Some(e),
        }
    })?;
    if let Some(e) = error {
        return Err(e);
    }
    Ok((lo, hi))
}

/// Compatibility check between depths n-1 and n on the k-branch: for every
/// admissible base configuration, the summed extensions of mu_n must equal
/// mu_(n-1). Reports the worst (minimum) deviation valuation rather than a
/// bare boolean so perturbed boundaries are measurably incompatible.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompatReport {
    pub depth: u32,
    pub base_configurations: usize,
    pub min_deviation: Residual,
    pub compatible: bool,
}

pub fn check_compatibility(
    params: &ModelParams,
    boundary: &BoundaryField,
    n: u32,
    cap: usize,
) -> Result<CompatReport> {
    if n < 1 {
        return Err(Error::BadInput("compatibility needs depth n >= 1".into()));
    }
    let k = params.order();
    let vol_n = build_volume(k, n, Topology::KBranch, cap)?;
    let vol_prev = build_volume(k, n - 1, Topology::KBranch, cap)?;
    let prev_len = vol_prev.vertex_count() as u32;

    let z_n = partition_function(&vol_n, params, boundary)?;
    let z_prev = partition_function(&vol_prev, params, boundary)?;

    // group the depth-n measure by restriction to the inner ball
    let mut sums: HashMap<u64, PadicNumber> = HashMap::new();
    let mut error = None;
    for_each_admissible(&vol_n, &mut |config| {
        if error.is_some() {
            return;
        }
        let base = config.restrict(prev_len).bits;
        match mu_n(&vol_n, &config, params, boundary, &z_n) {
            Ok(m) => {
                let entry = sums.remove(&base);
                let combined = match entry {
                    Some(acc) => acc.add(&m),
                    None => Ok(m),
                };
                match combined {
                    Ok(c) => {
                        sums.insert(base, c);
                    }
                    Err(e) => error = Some(e),
                }
            }
            Err(e) => error = Some(e),
        }
    })?;
    if let Some(e) = error {
        return Err(e);
    }

    let mut min_deviation: Option<Residual> = None;
    let mut base_count = 0usize;
    let mut error = None;
    for_each_admissible(&vol_prev, &mut |base| {
        if error.is_some() {
            return;
        }
        base_count += 1;
        let extended = sums.get(&base.bits);
        let deviation = (|| -> Result<Residual> {
            let prev_mu = mu_n(&vol_prev, &base, params, boundary, &z_prev)?;
            let diff = match extended {
                Some(s) => s.sub(&prev_mu)?,
                None => prev_mu.neg(),
            };
            Ok(Residual::from_value(&diff))
        })();
        match deviation {
            Ok(d) => {
                min_deviation = Some(match min_deviation.take() {
                    Some(cur) => cur.min(d),
                    None => d,
                });
            }
            Err(e) => error = Some(e),
        }
    })?;
    if let Some(e) = error {
        return Err(e);
    }
    let min_deviation = min_deviation.expect("at least one base configuration");
    Ok(CompatReport {
        depth: n,
        base_configurations: base_count,
        min_deviation,
        compatible: min_deviation.is_zero_at_precision(),
    })
}

/// The oracle's wire report; optional sections are filled per subcommand.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleReport {
    pub k: u32,
    pub n: u32,
    pub topology: Topology,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary: Option<BoundaryField>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_count: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_count_closed_form: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form_match: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_norm: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalization_ok: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_deviation_valuation: Option<Residual>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_norm_range: Option<[String; 2]>,
}

pub fn norm_exponent_string(p: u64, e: i64) -> String {
    let p_big = num_bigint::BigInt::from(p);
    if e >= 0 {
        p_big.pow(e as u32).to_string()
    } else {
        format!("1/{}", p_big.pow((-e) as u32))
    }
}
