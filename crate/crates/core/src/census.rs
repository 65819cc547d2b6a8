//! Census harness: enumerate every Dickson pair, variant and subgroup up to
//! an order bound, run the selected structural checks, and emit a
//! deterministic report. Per-record failures never abort the run.

use crate::arith;
use crate::error::{Error, Result};
use crate::nearfield::{count_dickson_nearfields, DicksonNearField, DicksonPair};
use crate::perm::{Perm, PermGroup};
use crate::scheme::{self, AutGroup, CyclotomicScheme};
use crate::zsigmondy;
use crate::{Elt, FiniteField};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Order ceiling for automorphism-group checks.
pub const AUT_ORDER_CAP: u64 = 169;
/// Order ceiling for arithmetic-only runs.
pub const ORDER_CAP: u64 = 343;
/// Socle computation requires the full element store.
pub const SOCLE_ORDER_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Check {
    Primitivity,
    Aut,
    Agl,
    FrobeniusSocle,
    Thm14,
    FieldReduction,
}

impl Check {
    pub const ALL: [Check; 6] = [
        Check::Primitivity,
        Check::Aut,
        Check::Agl,
        Check::FrobeniusSocle,
        Check::Thm14,
        Check::FieldReduction,
    ];

    fn needs_aut(self) -> bool {
        !matches!(self, Check::Primitivity)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Check::Primitivity => "primitivity",
            Check::Aut => "aut",
            Check::Agl => "agl",
            Check::FrobeniusSocle => "frobenius-socle",
            Check::Thm14 => "thm14",
            Check::FieldReduction => "field-reduction",
        };
        f.write_str(s)
    }
}

impl FromStr for Check {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "primitivity" => Ok(Check::Primitivity),
            "aut" => Ok(Check::Aut),
            "agl" => Ok(Check::Agl),
            "frobenius-socle" => Ok(Check::FrobeniusSocle),
            "thm14" => Ok(Check::Thm14),
            "field-reduction" => Ok(Check::FieldReduction),
            other => Err(Error::Precondition(format!("unknown check '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CensusOptions {
    pub max_order: u64,
    pub checks: Vec<Check>,
    pub cache_dir: Option<PathBuf>,
}

impl CensusOptions {
    pub fn new(max_order: u64) -> Self {
        CensusOptions {
            max_order,
            checks: Check::ALL.to_vec(),
            cache_dir: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CensusRecord {
    pub q: u64,
    pub n: u32,
    pub d: u32,
    pub p: u64,
    pub variant: usize,
    pub subgroup: usize,
    pub k_order: u64,
    pub rank: usize,
    pub valency: u64,
    pub primitive: Option<bool>,
    pub aut_order: Option<u64>,
    pub aut_equals_tgbar: Option<bool>,
    pub frobenius_or_socle_ok: Option<bool>,
    pub agl_containment_ok: Option<bool>,
    pub thm14_applicable: Option<bool>,
    pub thm14_ok: Option<bool>,
    pub field_reducible: Option<bool>,
    pub error: Option<String>,
}

impl CensusRecord {
    /// A record fails if any flag is explicitly false or an error occurred.
    pub fn failed(&self) -> bool {
        self.error.is_some()
            || [
                self.primitive.map(|_| true), // primitive=false is a finding, not a failure
                self.aut_equals_tgbar,
                self.frobenius_or_socle_ok,
                self.agl_containment_ok,
                self.thm14_ok,
                self.field_reducible,
            ]
            .iter()
            .any(|f| *f == Some(false))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CensusSummary {
    pub max_order: u64,
    pub checks: Vec<String>,
    pub records: usize,
    pub failures: usize,
    pub errors: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CensusReport {
    pub records: Vec<CensusRecord>,
    pub summary: CensusSummary,
}

impl CensusReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// CSV mirror: one line per record, no summary.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "q,n,d,p,variant,subgroup,k_order,rank,valency,primitive,aut_order,\
             aut_equals_tgbar,frobenius_or_socle_ok,agl_containment_ok,\
             thm14_applicable,thm14_ok,field_reducible,error\n",
        );
        let cell = |o: &Option<bool>| match o {
            Some(v) => v.to_string(),
            None => String::new(),
        };
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.q,
                r.n,
                r.d,
                r.p,
                r.variant,
                r.subgroup,
                r.k_order,
                r.rank,
                r.valency,
                cell(&r.primitive),
                r.aut_order.map(|o| o.to_string()).unwrap_or_default(),
                cell(&r.aut_equals_tgbar),
                cell(&r.frobenius_or_socle_ok),
                cell(&r.agl_containment_ok),
                cell(&r.thm14_applicable),
                cell(&r.thm14_ok),
                cell(&r.field_reducible),
                r.error.clone().unwrap_or_default().replace(',', ";"),
            ));
        }
        out
    }
}

pub fn run_census(opts: &CensusOptions) -> Result<CensusReport> {
    if opts.max_order > ORDER_CAP {
        return Err(Error::BoundExceeded(opts.max_order, ORDER_CAP));
    }
    if opts.max_order > AUT_ORDER_CAP && opts.checks.iter().any(|c| c.needs_aut()) {
        return Err(Error::BoundExceeded(opts.max_order, AUT_ORDER_CAP));
    }
    let cache = opts.cache_dir.as_deref().map(Cache::new);
    // deterministic task list: (q, n, variant, subgroup index)
    let mut tasks: Vec<(DicksonNearField, usize, Vec<Elt>)> = Vec::new();
    for q in 2..=opts.max_order {
        if arith::prime_power(q).is_none() {
            continue;
        }
        let mut n = 1u32;
        while q.pow(n) <= opts.max_order {
            if DicksonPair::is_valid(q, n)? {
                for variant in 0..count_dickson_nearfields(q, n)? as usize {
                    let nf = match &cache {
                        Some(c) => {
                            let pair = DicksonPair::new(q, n)?;
                            let field = c.field(pair.p, pair.prime_degree())?;
                            DicksonNearField::with_field(q, n, variant, field)?
                        }
                        None => DicksonNearField::new(q, n, variant)?,
                    };
                    let mg = nf.mult_group()?;
                    for (idx, sub) in mg.subgroups().into_iter().enumerate() {
                        let k: Vec<Elt> = sub.iter().map(|&i| mg.elements[i]).collect();
                        tasks.push((nf.clone(), idx, k));
                    }
                }
            }
            n += 1;
        }
    }
    let records: Vec<CensusRecord> = tasks
        .par_iter()
        .map(|(nf, idx, k)| census_record(nf, *idx, k, &opts.checks))
        .collect();
    let failures = records.iter().filter(|r| r.failed()).count();
    let errors = records.iter().filter(|r| r.error.is_some()).count();
    Ok(CensusReport {
        summary: CensusSummary {
            max_order: opts.max_order,
            checks: opts.checks.iter().map(|c| c.to_string()).collect(),
            records: records.len(),
            failures,
            errors,
        },
        records,
    })
}

fn census_record(
    nf: &DicksonNearField,
    subgroup: usize,
    k: &[Elt],
    checks: &[Check],
) -> CensusRecord {
    let pair = &nf.pair;
    let mut rec = CensusRecord {
        q: pair.q,
        n: pair.n,
        d: pair.d,
        p: pair.p,
        variant: nf.variant,
        subgroup,
        k_order: k.len() as u64,
        rank: 0,
        valency: 0,
        primitive: None,
        aut_order: None,
        aut_equals_tgbar: None,
        frobenius_or_socle_ok: None,
        agl_containment_ok: None,
        thm14_applicable: None,
        thm14_ok: None,
        field_reducible: None,
        error: None,
    };
    if let Err(e) = census_checks(nf, k, checks, &mut rec) {
        rec.error = Some(e.to_string());
    }
    rec
}

fn census_checks(
    nf: &DicksonNearField,
    k: &[Elt],
    checks: &[Check],
    rec: &mut CensusRecord,
) -> Result<()> {
    let c = scheme::build_cyclotomic(nf, k)?;
    rec.rank = c.scheme.rank;
    rec.valency = c.valency;
    if (rec.rank as u64 - 1) * rec.valency != nf.order() - 1 {
        return Err(Error::Precondition("rank-valency identity violated".into()));
    }
    let has = |ch: Check| checks.contains(&ch);
    if has(Check::Primitivity) {
        let prim = c.scheme.is_primitive();
        let irr = scheme::base_group(nf, k)?.is_irreducible();
        if prim != irr {
            return Err(Error::Precondition(
                "primitivity disagrees with base-group irreducibility".into(),
            ));
        }
        rec.primitive = Some(prim);
    }
    let aut = if checks.iter().any(|ch| ch.needs_aut()) {
        Some(scheme::aut_group(&c)?)
    } else {
        None
    };
    if let Some(aut) = &aut {
        if has(Check::Aut) {
            rec.aut_order = aut.order();
            if let AutGroup::Group(g) = aut {
                let oracle = scheme::aut_bruteforce(&c.scheme)?;
                rec.aut_equals_tgbar = Some(g.same_group(&oracle));
            }
        }
        if let AutGroup::Group(g) = aut {
            if has(Check::Agl) {
                rec.agl_containment_ok = Some(stabilizer_is_linear(&c, g)?);
            }
            if has(Check::FrobeniusSocle) {
                rec.frobenius_or_socle_ok = Some(frobenius_or_socle(&c, g)?);
            }
        }
        if has(Check::Thm14) {
            let applicable = zsigmondy::thm14_hypothesis(&c)?.is_some();
            rec.thm14_applicable = Some(applicable);
            if applicable {
                rec.thm14_ok = Some(zsigmondy::thm14_conclusion_check(&c)?);
            }
        }
        if has(Check::FieldReduction)
            && c.scheme.is_primitive()
            && !c.scheme.is_trivial()
            && scheme::base_group(nf, k)?.is_abelian()
        {
            rec.field_reducible = Some(scheme::abelian_field_reduction(&c).is_ok());
        }
    }
    Ok(())
}

/// Every generator of the stabilizer of 0 must be additive (GF(p)-linear).
fn stabilizer_is_linear(c: &CyclotomicScheme, aut: &PermGroup) -> Result<bool> {
    let f = &c.nearfield.field;
    let n = c.scheme.n;
    let stab = aut.point_stabilizer(0)?;
    for g in stab.generators() {
        for x in 0..n as u64 {
            for y in 0..n as u64 {
                if g.apply(f.add(x, y) as usize) as u64
                    != f.add(g.apply(x as usize) as u64, g.apply(y as usize) as u64)
                {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn translations(nf: &DicksonNearField) -> Result<PermGroup> {
    let f = &nf.field;
    let n = f.order() as usize;
    let gens: Vec<Perm> = (0..nf.pair.prime_degree())
        .map(|j| {
            let e = nf.pair.p.pow(j);
            Perm::new((0..n).map(|x| f.add(x as u64, e) as u32).collect())
        })
        .collect::<Result<_>>()?;
    PermGroup::from_generators_degree(gens, Some(n))
}

/// Imprimitive: Aut is Frobenius with kernel T and equals the affine group
/// T.K. Primitive: T is the unique minimal normal subgroup when the element
/// store is available, otherwise at least normal.
fn frobenius_or_socle(c: &CyclotomicScheme, aut: &PermGroup) -> Result<bool> {
    let t = translations(&c.nearfield)?;
    let n = c.scheme.n as u64;
    if !c.scheme.is_primitive() {
        let (frob, kernel) = aut.is_frobenius()?;
        let kernel_is_t = kernel
            .map(|ker| ker.order() == n && t.is_subgroup_of(&ker))
            .unwrap_or(false);
        return Ok(frob && kernel_is_t && aut.order() == n * c.valency);
    }
    if aut.order() <= SOCLE_ORDER_CAP && aut.elements().is_some() {
        let minimals = aut.minimal_normal_subgroups()?;
        Ok(minimals.len() == 1 && minimals[0].same_group(&t))
    } else {
        Ok(t.is_normal_in(aut))
    }
}

// ---------------------------------------------------------------------------
// cache

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    pub payload: String,
    pub checksum: String,
}

impl CacheEntry {
    pub fn new(key: impl Into<String>, payload: impl Into<String>) -> Self {
        let key = key.into();
        let payload = payload.into();
        let checksum = hex_digest(&payload);
        CacheEntry {
            key,
            payload,
            checksum,
        }
    }

    pub fn is_valid(&self) -> bool {
        hex_digest(&self.payload) == self.checksum
    }
}

fn hex_digest(s: &str) -> String {
    let mut h = Sha256::new();
    h.update(s.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// File-backed cache; the directory is created on demand. Pick the location
/// with `Cache::resolve` (explicit flag wins over NEARCYC_CACHE_DIR).
#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    pub fn resolve(flag: Option<PathBuf>) -> Option<PathBuf> {
        flag.or_else(|| std::env::var_os("NEARCYC_CACHE_DIR").map(PathBuf::from))
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn store(&self, entry: &CacheEntry) -> Result<()> {
        let io = |source: std::io::Error, path: &Path| Error::Io {
            path: path.display().to_string(),
            source,
        };
        std::fs::create_dir_all(&self.dir).map_err(|e| io(e, &self.dir))?;
        let path = self.path(&entry.key);
        let body = serde_json::to_string(entry)?;
        std::fs::write(&path, body).map_err(|e| io(e, &path))
    }

    /// Returns the payload, or None on miss or checksum mismatch.
    pub fn load(&self, key: &str) -> Option<String> {
        let body = std::fs::read_to_string(self.path(key)).ok()?;
        let entry: CacheEntry = serde_json::from_str(&body).ok()?;
        (entry.key == key && entry.is_valid()).then_some(entry.payload)
    }

    /// Save-then-load reproduces the payload byte for byte.
    pub fn roundtrip(&self, entry: &CacheEntry) -> Result<bool> {
        self.store(entry)?;
        Ok(self.load(&entry.key).as_deref() == Some(entry.payload.as_str()))
    }

    /// Field tables keyed by (p, e): cache hit with a valid checksum, or
    /// recompute and store.
    pub fn field(&self, p: u64, e: u32) -> Result<FiniteField> {
        let key = format!("field_p{p}_e{e}");
        if let Some(payload) = self.load(&key) {
            if let Ok(f) = serde_json::from_str::<FiniteField>(&payload) {
                if let Ok(f) = f.validate_tables() {
                    if f.p == p && f.e == e {
                        return Ok(f);
                    }
                }
            }
        }
        let f = FiniteField::new(p, e)?;
        self.store(&CacheEntry::new(key, serde_json::to_string(&f)?))?;
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn census_order_9_shape() {
        let mut opts = CensusOptions::new(9);
        opts.checks = vec![Check::Primitivity];
        let report = run_census(&opts).unwrap();
        // pairs: (2,1),(3,1),(4,1),(5,1),(7,1),(8,1),(9,1),(3,2)
        let mut pairs: Vec<(u64, u32)> = report
            .records
            .iter()
            .map(|r| (r.q, r.n))
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        pairs.sort_unstable();
        assert_eq!(
            pairs,
            vec![(2, 1), (3, 1), (3, 2), (4, 1), (5, 1), (7, 1), (8, 1), (9, 1)]
        );
        // Q8 has 6 subgroups
        let nf_records = report
            .records
            .iter()
            .filter(|r| (r.q, r.n) == (3, 2))
            .count();
        assert_eq!(nf_records, 6);
        assert_eq!(report.summary.failures, 0);
        // rank-valency identity baked into every record
        for r in &report.records {
            assert_eq!((r.rank as u64 - 1) * r.valency, r.q.pow(r.n) - 1);
        }
    }

    #[test]
    fn census_order_25_full_checks() {
        let report = run_census(&CensusOptions::new(25)).unwrap();
        assert_eq!(report.summary.failures, 0);
        assert_eq!(report.summary.errors, 0);
        for r in &report.records {
            if r.rank > 2 {
                assert_eq!(r.aut_equals_tgbar, Some(true), "q={} n={} K={}", r.q, r.n, r.k_order);
            }
        }
    }

    #[test]
    fn census_deterministic() {
        let mut opts = CensusOptions::new(16);
        opts.checks = vec![Check::Primitivity, Check::Aut];
        let a = run_census(&opts).unwrap();
        let b = run_census(&opts).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn census_rejects_out_of_bounds() {
        assert!(run_census(&CensusOptions::new(400)).is_err());
        let mut opts = CensusOptions::new(343);
        assert!(run_census(&opts).is_err()); // aut checks past the cap
        opts.checks = vec![Check::Primitivity];
        assert!(run_census(&opts).is_ok());
    }

    #[test]
    fn check_parsing() {
        for c in Check::ALL {
            assert_eq!(c.to_string().parse::<Check>().unwrap(), c);
        }
        assert!("bogus".parse::<Check>().is_err());
    }

    #[test]
    fn cache_roundtrip_and_fault_injection() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path().join("sub")); // missing dir: created
        let entry = CacheEntry::new("demo", "payload-bytes");
        assert!(cache.roundtrip(&entry).unwrap());
        // truncate the file: load must miss, not fail
        let path = dir.path().join("sub").join("demo.json");
        let body = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, &body[..body.len() / 2]).unwrap();
        assert_eq!(cache.load("demo"), None);
        // corrupt the payload with a stale checksum: load must miss
        let mut bad = CacheEntry::new("demo2", "original");
        bad.payload = "tampered".into();
        cache.store(&bad).unwrap();
        assert_eq!(cache.load("demo2"), None);
    }

    #[test]
    fn cached_field_matches_fresh() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let fresh = FiniteField::new(3, 2).unwrap();
        let first = cache.field(3, 2).unwrap(); // miss: compute and store
        let second = cache.field(3, 2).unwrap(); // hit
        assert_eq!(first.modulus, fresh.modulus);
        assert_eq!(second.modulus, fresh.modulus);
        for x in 0..9u64 {
            for y in 0..9 {
                assert_eq!(first.mul(x, y), fresh.mul(x, y));
                assert_eq!(second.mul(x, y), fresh.mul(x, y));
            }
        }
        // corrupted cache file falls back to recomputation
        let path = dir.path().join("field_p3_e2.json");
        std::fs::write(&path, "garbage").unwrap();
        let third = cache.field(3, 2).unwrap();
        assert_eq!(third.modulus, fresh.modulus);
    }

    #[test]
    fn census_with_cache_matches_without() {
        let dir = tempfile::tempdir().unwrap();
        let mut opts = CensusOptions::new(9);
        opts.checks = vec![Check::Primitivity];
        let plain = run_census(&opts).unwrap();
        opts.cache_dir = Some(dir.path().to_path_buf());
        let cached = run_census(&opts).unwrap();
        assert_eq!(plain.to_json(), cached.to_json());
    }

    #[test]
    fn resolve_prefers_flag() {
        assert_eq!(
            Cache::resolve(Some(PathBuf::from("/x"))),
            Some(PathBuf::from("/x"))
        );
    }
}
