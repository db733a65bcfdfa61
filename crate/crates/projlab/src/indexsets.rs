//! Multi-index arithmetic and enumeration of the index-set families the
//! rest of the crate works over: full and tetrahedral degree slices, their
//! up-to variants, and the sets generated by prime factorization.
//!
//! Members are kept in colex order (compare entries from the last position
//! down), which fixes one deterministic layout for reports and golden files.

use std::cmp::Ordering;
use std::sync::Mutex;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default ceiling on enumeration size; large requests must opt in.
pub const DEFAULT_ENUM_CAP: u64 = 10_000_000;

#[derive(Debug, Error)]
pub enum IndexSetError {
    #[error("enumeration too large: {count} members exceeds cap {cap}")]
    TooLarge { count: BigUint, cap: u64 },
    #[error("mixed degrees: operation needs a homogeneous index set")]
    MixedDegrees,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("cannot parse index set: {0}")]
    Parse(String),
    #[error("value out of range: {0}")]
    Range(String),
}

/// Exponent vector alpha in N_0^n with its degree |alpha| cached.
///
/// A zero-length index is allowed; it is the image of 1 under the prime
/// factorization map.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    entries: Vec<u32>,
    degree: u32,
}

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        let degree = entries.iter().sum();
        MultiIndex { entries, degree }
    }

    pub fn zero(dimension: usize) -> Self {
        MultiIndex { entries: vec![0; dimension], degree: 0 }
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn dimension(&self) -> usize {
        self.entries.len()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_tetrahedral(&self) -> bool {
        self.entries.iter().all(|&a| a <= 1)
    }

    /// Number of monomial orderings: |alpha|! / prod alpha_i!, exact.
    pub fn multiplicity(&self) -> BigUint {
        let mut num = factorial(self.degree as u64);
        for &a in &self.entries {
            num /= factorial(a as u64);
        }
        num
    }

    /// Entries sorted descending; the shape alpha* of the index.
    pub fn decreasing_rearrangement(&self) -> MultiIndex {
        let mut e = self.entries.clone();
        e.sort_unstable_by(|a, b| b.cmp(a));
        MultiIndex { entries: e, degree: self.degree }
    }

    /// Split alpha = alpha_T + alpha_E with alpha_T the 0/1 parity vector
    /// and alpha_E even everywhere. The split is unique.
    pub fn tetra_even_decompose(&self) -> (MultiIndex, MultiIndex) {
        let t: Vec<u32> = self.entries.iter().map(|&a| a % 2).collect();
        let e: Vec<u32> = self.entries.iter().map(|&a| a - a % 2).collect();
        (MultiIndex::new(t), MultiIndex::new(e))
    }

    pub fn plus_unit(&self, k: usize) -> MultiIndex {
        let mut e = self.entries.clone();
        e[k] += 1;
        MultiIndex { entries: e, degree: self.degree + 1 }
    }

    /// alpha - e_k, or None when alpha_k = 0.
    pub fn minus_unit(&self, k: usize) -> Option<MultiIndex> {
        if self.entries[k] == 0 {
            return None;
        }
        let mut e = self.entries.clone();
        e[k] -= 1;
        Some(MultiIndex { entries: e, degree: self.degree - 1 })
    }

    /// Pad with trailing zeros up to `dimension`.
    pub fn padded(&self, dimension: usize) -> MultiIndex {
        assert!(dimension >= self.entries.len());
        let mut e = self.entries.clone();
        e.resize(dimension, 0);
        MultiIndex { entries: e, degree: self.degree }
    }
}

impl Ord for MultiIndex {
    /// Colex: shorter first, then compare entries from the last position
    /// down, which is lex order on the reversed entry list.
    fn cmp(&self, other: &Self) -> Ordering {
        self.entries
            .len()
            .cmp(&other.entries.len())
            .then_with(|| self.entries.iter().rev().cmp(other.entries.iter().rev()))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IndexSetKind {
    /// All alpha with |alpha| = m.
    Full(u32),
    /// All alpha with |alpha| <= m.
    FullUpTo(u32),
    /// 0/1 entries, exactly m ones.
    Tetrahedral(u32),
    /// 0/1 entries, at most m ones.
    TetrahedralUpTo(u32),
    /// Exponent vectors of 1..=x under prime factorization.
    PrimeGenerated(u64),
    /// Same, restricted to |alpha| = m.
    PrimeHomog(u64, u32),
    Custom,
}

impl IndexSetKind {
    pub fn descriptor(&self) -> String {
        match self {
            IndexSetKind::Full(m) => format!("full:{m}"),
            IndexSetKind::FullUpTo(m) => format!("full-upto:{m}"),
            IndexSetKind::Tetrahedral(m) => format!("tetra:{m}"),
            IndexSetKind::TetrahedralUpTo(m) => format!("tetra-upto:{m}"),
            IndexSetKind::PrimeGenerated(x) => format!("primes:{x}"),
            IndexSetKind::PrimeHomog(x, m) => format!("primes-homog:{x},{m}"),
            IndexSetKind::Custom => "custom".to_string(),
        }
    }

    pub fn parse(s: &str) -> Result<IndexSetKind, IndexSetError> {
        let bad = |msg: &str| IndexSetError::Parse(format!("{msg} in {s:?}"));
        if s == "custom" {
            return Ok(IndexSetKind::Custom);
        }
        let (head, tail) = s
            .split_once(':')
            .ok_or_else(|| bad("expected kind:args"))?;
        let one = |t: &str| t.trim().parse::<u64>().map_err(|_| bad("bad integer"));
        match head.trim() {
            "full" => Ok(IndexSetKind::Full(one(tail)? as u32)),
            "full-upto" => Ok(IndexSetKind::FullUpTo(one(tail)? as u32)),
            "tetra" => Ok(IndexSetKind::Tetrahedral(one(tail)? as u32)),
            "tetra-upto" => Ok(IndexSetKind::TetrahedralUpTo(one(tail)? as u32)),
            "primes" => Ok(IndexSetKind::PrimeGenerated(one(tail)?)),
            "primes-homog" => {
                let (x, m) = tail
                    .split_once(',')
                    .ok_or_else(|| bad("expected primes-homog:x,m"))?;
                Ok(IndexSetKind::PrimeHomog(one(x)?, one(m)? as u32))
            }
            _ => Err(bad("unknown kind")),
        }
    }
}

/// Finite family of multi-indices sharing one ambient dimension.
#[derive(Clone, Debug)]
pub struct IndexSet {
    dimension: usize,
    kind: IndexSetKind,
    members: Vec<MultiIndex>,
}

/// Equality is extensional: same dimension and same member set. The kind is
/// a construction label, so e.g. the reduced set of a full slice compares
/// equal to the slice one degree down.
impl PartialEq for IndexSet {
    fn eq(&self, other: &Self) -> bool {
        self.dimension == other.dimension && self.members == other.members
    }
}
impl Eq for IndexSet {}

impl IndexSet {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn kind(&self) -> &IndexSetKind {
        &self.kind
    }

    /// Members in colex order.
    pub fn members(&self) -> &[MultiIndex] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, alpha: &MultiIndex) -> bool {
        self.members.binary_search(alpha).is_ok()
    }

    /// All members share one degree; None when degrees are mixed or the set
    /// is empty.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let first = self.members.first()?.degree();
        self.members
            .iter()
            .all(|a| a.degree() == first)
            .then_some(first)
    }

    pub fn enumerate(kind: IndexSetKind, n: usize) -> Result<IndexSet, IndexSetError> {
        IndexSet::enumerate_capped(kind, n, DEFAULT_ENUM_CAP)
    }

    /// Enumerate with an explicit cardinality cap. The count is checked
    /// against the closed formula before any member is materialized.
    pub fn enumerate_capped(
        kind: IndexSetKind,
        n: usize,
        cap: u64,
    ) -> Result<IndexSet, IndexSetError> {
        let count = kind_count_bound(&kind, n)?;
        if count > BigUint::from(cap) {
            return Err(IndexSetError::TooLarge { count, cap });
        }
        let (dimension, members) = match kind {
            IndexSetKind::Full(m) => {
                require_dim(n)?;
                (n, gen_sum(n, m, u32::MAX, false))
            }
            IndexSetKind::FullUpTo(m) => {
                require_dim(n)?;
                (n, gen_sum(n, m, u32::MAX, true))
            }
            IndexSetKind::Tetrahedral(m) => {
                require_dim(n)?;
                (n, gen_sum(n, m, 1, false))
            }
            IndexSetKind::TetrahedralUpTo(m) => {
                require_dim(n)?;
                (n, gen_sum(n, m, 1, true))
            }
            IndexSetKind::PrimeGenerated(x) => gen_primes(x, None)?,
            IndexSetKind::PrimeHomog(x, m) => gen_primes(x, Some(m))?,
            IndexSetKind::Custom => {
                return Err(IndexSetError::Parse(
                    "custom sets need explicit members".to_string(),
                ))
            }
        };
        let mut members = members;
        members.sort();
        Ok(IndexSet { dimension, kind, members })
    }

    pub fn full(m: u32, n: usize) -> Result<IndexSet, IndexSetError> {
        IndexSet::enumerate(IndexSetKind::Full(m), n)
    }

    pub fn full_up_to(m: u32, n: usize) -> Result<IndexSet, IndexSetError> {
        IndexSet::enumerate(IndexSetKind::FullUpTo(m), n)
    }

    pub fn tetrahedral(m: u32, n: usize) -> Result<IndexSet, IndexSetError> {
        IndexSet::enumerate(IndexSetKind::Tetrahedral(m), n)
    }

    pub fn tetrahedral_up_to(m: u32, n: usize) -> Result<IndexSet, IndexSetError> {
        IndexSet::enumerate(IndexSetKind::TetrahedralUpTo(m), n)
    }

    pub fn prime_generated(x: u64) -> Result<IndexSet, IndexSetError> {
        IndexSet::enumerate(IndexSetKind::PrimeGenerated(x), 0)
    }

    pub fn prime_homog(x: u64, m: u32) -> Result<IndexSet, IndexSetError> {
        IndexSet::enumerate(IndexSetKind::PrimeHomog(x, m), 0)
    }

    pub fn custom(members: Vec<MultiIndex>) -> Result<IndexSet, IndexSetError> {
        let dimension = members.first().map_or(0, MultiIndex::dimension);
        for a in &members {
            if a.dimension() != dimension {
                return Err(IndexSetError::DimensionMismatch {
                    expected: dimension,
                    got: a.dimension(),
                });
            }
        }
        let mut members = members;
        members.sort();
        members.dedup();
        Ok(IndexSet { dimension, kind: IndexSetKind::Custom, members })
    }

    /// The set of beta with beta + e_k in self for some k. Defined for
    /// homogeneous sets of degree >= 1.
    pub fn reduced_set(&self) -> Result<IndexSet, IndexSetError> {
        let degree = self
            .homogeneous_degree()
            .ok_or(IndexSetError::MixedDegrees)?;
        if degree == 0 {
            return Err(IndexSetError::MixedDegrees);
        }
        let mut out = Vec::new();
        for alpha in &self.members {
            for k in 0..alpha.dimension() {
                if let Some(beta) = alpha.minus_unit(k) {
                    out.push(beta);
                }
            }
        }
        out.sort();
        out.dedup();
        Ok(IndexSet { dimension: self.dimension, kind: IndexSetKind::Custom, members: out })
    }

    /// Members of one fixed degree, as a new set.
    pub fn degree_slice(&self, m: u32) -> IndexSet {
        let members: Vec<MultiIndex> = self
            .members
            .iter()
            .filter(|a| a.degree() == m)
            .cloned()
            .collect();
        IndexSet { dimension: self.dimension, kind: IndexSetKind::Custom, members }
    }

    pub fn to_json(&self) -> String {
        let repr = IndexSetRepr {
            dimension: self.dimension,
            kind: self.kind.descriptor(),
            members: self.members.iter().map(|a| a.entries.clone()).collect(),
        };
        serde_json::to_string(&repr).expect("index set serializes")
    }

    pub fn from_json(s: &str) -> Result<IndexSet, IndexSetError> {
        let repr: IndexSetRepr =
            serde_json::from_str(s).map_err(|e| IndexSetError::Parse(e.to_string()))?;
        let kind = IndexSetKind::parse(&repr.kind)?;
        let mut members = Vec::with_capacity(repr.members.len());
        for e in repr.members {
            if e.len() != repr.dimension {
                return Err(IndexSetError::DimensionMismatch {
                    expected: repr.dimension,
                    got: e.len(),
                });
            }
            members.push(MultiIndex::new(e));
        }
        members.sort();
        members.dedup();
        Ok(IndexSet { dimension: repr.dimension, kind, members })
    }
}

#[derive(Serialize, Deserialize)]
struct IndexSetRepr {
    dimension: usize,
    kind: String,
    members: Vec<Vec<u32>>,
}

fn require_dim(n: usize) -> Result<(), IndexSetError> {
    if n == 0 {
        return Err(IndexSetError::Range("dimension must be >= 1".to_string()));
    }
    Ok(())
}

/// Closed-form (or safe upper bound, for PrimeHomog) member count.
fn kind_count_bound(kind: &IndexSetKind, n: usize) -> Result<BigUint, IndexSetError> {
    let n_b = BigUint::from(n);
    Ok(match *kind {
        IndexSetKind::Full(m) => binomial(n as u64 + m as u64 - 1, m as u64),
        IndexSetKind::FullUpTo(m) => binomial(n as u64 + m as u64, m as u64),
        IndexSetKind::Tetrahedral(m) => {
            if m as usize > n {
                BigUint::zero()
            } else {
                binomial(n as u64, m as u64)
            }
        }
        IndexSetKind::TetrahedralUpTo(m) => {
            let mut total = BigUint::zero();
            for j in 0..=(m as u64).min(n as u64) {
                total += binomial(n as u64, j);
            }
            total
        }
        IndexSetKind::PrimeGenerated(x) | IndexSetKind::PrimeHomog(x, _) => {
            if x < 1 {
                return Err(IndexSetError::Range("x must be >= 1".to_string()));
            }
            BigUint::from(x)
        }
        IndexSetKind::Custom => n_b,
    })
}

/// All vectors of length `dim` with entries <= entry_cap and degree equal
/// to m (or <= m when `up_to`). Recursion appends the last coordinate
/// ascending, so the output is already colex-sorted.
fn gen_sum(dim: usize, m: u32, entry_cap: u32, up_to: bool) -> Vec<MultiIndex> {
    fn rec(dim: usize, m: u32, entry_cap: u32, up_to: bool, out: &mut Vec<Vec<u32>>) {
        if dim == 1 {
            if up_to {
                for a in 0..=m.min(entry_cap) {
                    out.push(vec![a]);
                }
            } else if m <= entry_cap {
                out.push(vec![m]);
            }
            return;
        }
        for last in 0..=m.min(entry_cap) {
            let mut prefix = Vec::new();
            rec(dim - 1, m - last, entry_cap, up_to, &mut prefix);
            for mut p in prefix {
                p.push(last);
                out.push(p);
            }
        }
    }
    let mut raw = Vec::new();
    rec(dim, m, entry_cap, up_to, &mut raw);
    raw.into_iter().map(MultiIndex::new).collect()
}

/// Exponent vectors of 1..=x, padded to dimension pi(x), optionally
/// filtered to one degree. Factors every n at once through a
/// smallest-prime-factor sieve instead of per-n trial division.
fn gen_primes(x: u64, degree: Option<u32>) -> Result<(usize, Vec<MultiIndex>), IndexSetError> {
    if x < 1 {
        return Err(IndexSetError::Range("x must be >= 1".to_string()));
    }
    let xs = x as usize;
    let mut spf = vec![0u32; xs + 1];
    let mut prime_index = vec![usize::MAX; xs + 1];
    let mut dimension = 0usize;
    for i in 2..=xs {
        if spf[i] == 0 {
            prime_index[i] = dimension;
            dimension += 1;
            let mut j = i;
            while j <= xs {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    let mut members = Vec::new();
    for n in 1..=xs {
        let mut entries = vec![0u32; dimension];
        let mut rest = n;
        let mut deg = 0u32;
        while rest > 1 {
            let p = spf[rest] as usize;
            entries[prime_index[p]] += 1;
            deg += 1;
            rest /= p;
        }
        if degree.map_or(true, |m| deg == m) {
            members.push(MultiIndex::new(entries));
        }
    }
    Ok((dimension, members))
}

fn factorial(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

struct PrimeCache {
    limit: u64,
    primes: Vec<u64>,
}

fn prime_cache() -> &'static Mutex<PrimeCache> {
    static CACHE: OnceLock<Mutex<PrimeCache>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(PrimeCache { limit: 1, primes: Vec::new() }))
}

/// All primes <= limit, from a process-wide sieve that regrows on demand.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    let mut cache = prime_cache().lock().unwrap();
    if limit > cache.limit {
        // Grow geometrically so repeated slightly-larger requests stay cheap.
        let new_limit = limit.max(cache.limit.saturating_mul(2)).max(1 << 10);
        let mut is_composite = vec![false; (new_limit + 1) as usize];
        let mut primes = Vec::new();
        for p in 2..=new_limit {
            if !is_composite[p as usize] {
                primes.push(p);
                let mut q = p * p;
                while q <= new_limit {
                    is_composite[q as usize] = true;
                    q += p;
                }
            }
        }
        cache.limit = new_limit;
        cache.primes = primes;
    }
    let cut = cache.primes.partition_point(|&p| p <= limit);
    cache.primes[..cut].to_vec()
}

/// Number of primes <= x.
pub fn prime_pi(x: u64) -> usize {
    if x < 2 {
        return 0;
    }
    primes_up_to(x).len()
}

/// Exponent vector of n over the primes in order, trailing zeros trimmed;
/// n = 1 maps to the empty index.
pub fn prime_map(n: u64) -> MultiIndex {
    assert!(n >= 1, "prime map needs n >= 1");
    if n == 1 {
        return MultiIndex::new(Vec::new());
    }
    let primes = primes_up_to(n);
    let mut rest = n;
    let mut entries = Vec::new();
    for &p in &primes {
        if rest == 1 {
            break;
        }
        let mut e = 0u32;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        entries.push(e);
    }
    while entries.last() == Some(&0) {
        entries.pop();
    }
    assert_eq!(rest, 1);
    MultiIndex::new(entries)
}

/// Rebuild n from its exponent vector. Errors on u128 overflow.
pub fn prime_map_inverse(alpha: &MultiIndex) -> Result<u128, IndexSetError> {
    let overflow = || IndexSetError::Range("prime map inverse overflows".to_string());
    if alpha.dimension() == 0 {
        return Ok(1);
    }
    // The i-th entry needs the i-th prime; sieve far enough to have it.
    let mut limit = 64u64;
    let mut primes = primes_up_to(limit);
    while primes.len() < alpha.dimension() {
        limit *= 2;
        primes = primes_up_to(limit);
    }
    let mut acc: u128 = 1;
    for (&p, &e) in primes.iter().zip(alpha.entries()) {
        for _ in 0..e {
            acc = acc.checked_mul(p as u128).ok_or_else(overflow)?;
        }
    }
    Ok(acc)
}
