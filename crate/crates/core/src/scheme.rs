//! Cyclotomic association schemes over Dickson near-fields.
//!
//! Relations are colors: an N x N matrix with 0 reserved for the diagonal
//! and nonzero classes numbered by the smallest element of the defining
//! coset, i.e. by lexicographically smallest pair.

use crate::error::{Error, Result};
use crate::matrix::{self, Mat, MatrixGroup};
use crate::nearfield::DicksonNearField;
use crate::perm::{Perm, PermGroup};
use crate::Elt;
use serde::Serialize;
use std::collections::HashSet;

/// Ceiling on N for the cubic intersection-number scan.
pub const VERIFY_BOUND: usize = 1 << 10;
/// Schemes up to this size are verified (and their tensor stored) at build
/// time; larger ones call verify_scheme_axioms on demand.
pub const BUILD_VERIFY_BOUND: usize = 121;
/// Ceiling on N for the backtracking automorphism search.
pub const AUT_BACKTRACK_BOUND: usize = 169;
/// Ceiling on rank - 1 for the union-enumeration primitivity oracle.
pub const UNION_ORACLE_RANK: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssociationScheme {
    pub n: usize,
    /// Row-major N x N relation indices; 0 is the diagonal class.
    pub colors: Vec<u16>,
    pub rank: usize,
    /// p^T_{RS}, indexed [(t * rank + r) * rank + s]; set once verified.
    pub tensor: Option<Vec<u32>>,
}

/// First violation found by the axiom scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomWitness {
    pub description: String,
    pub pair: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemeCheck {
    Valid(Vec<u32>),
    Violation(AxiomWitness),
}

impl AssociationScheme {
    pub fn color(&self, x: usize, y: usize) -> u16 {
        self.colors[x * self.n + y]
    }

    pub fn is_trivial(&self) -> bool {
        self.rank <= 2
    }

    /// Exhaustive check of the defining axioms. Returns the intersection
    /// tensor, or the first violating configuration.
    pub fn verify_scheme_axioms(&self) -> Result<SchemeCheck> {
        let n = self.n;
        if n > VERIFY_BOUND {
            return Err(Error::BoundExceeded(n as u64, VERIFY_BOUND as u64));
        }
        let r = self.rank;
        let witness = |description: String, pair: (usize, usize)| {
            Ok(SchemeCheck::Violation(AxiomWitness { description, pair }))
        };
        // structural: diagonal is class 0 and only the diagonal
        let mut seen = vec![false; r];
        for x in 0..n {
            for y in 0..n {
                let c = self.color(x, y) as usize;
                if c >= r {
                    return witness(format!("color {c} out of range"), (x, y));
                }
                seen[c] = true;
                if (x == y) != (c == 0) {
                    return witness("diagonal must be exactly class 0".into(), (x, y));
                }
            }
        }
        if let Some(c) = seen.iter().position(|&s| !s) {
            return witness(format!("class {c} is empty"), (0, 0));
        }
        // transpose closure: color(y,x) must be a function of color(x,y)
        let mut transpose = vec![u16::MAX; r];
        for x in 0..n {
            for y in 0..n {
                let c = self.color(x, y) as usize;
                let ct = self.color(y, x);
                if transpose[c] == u16::MAX {
                    transpose[c] = ct;
                } else if transpose[c] != ct {
                    return witness(
                        format!("class {c} has inconsistent transpose"),
                        (x, y),
                    );
                }
            }
        }
        // intersection numbers: tensor from the first pair of each class,
        // then constancy over every other pair
        let mut tensor = vec![u32::MAX; r * r * r];
        let mut counts = vec![0u32; r * r];
        let mut touched: Vec<usize> = Vec::with_capacity(n);
        let mut class_support: Vec<Vec<usize>> = vec![Vec::new(); r];
        for u in 0..n {
            for w in 0..n {
                let t = self.color(u, w) as usize;
                for v in 0..n {
                    let idx =
                        self.color(u, v) as usize * r + self.color(v, w) as usize;
                    if counts[idx] == 0 {
                        touched.push(idx);
                    }
                    counts[idx] += 1;
                }
                if tensor[t * r * r] == u32::MAX && class_support[t].is_empty() {
                    // first pair of class t: freeze the slice
                    for cell in &mut tensor[t * r * r..(t + 1) * r * r] {
                        *cell = 0;
                    }
                    for &idx in &touched {
                        tensor[t * r * r + idx] = counts[idx];
                    }
                    class_support[t] = touched.clone();
                    class_support[t].sort_unstable();
                } else {
                    let slice = &tensor[t * r * r..(t + 1) * r * r];
                    let mut sorted = touched.clone();
                    sorted.sort_unstable();
                    if sorted != class_support[t]
                        || touched.iter().any(|&idx| slice[idx] != counts[idx])
                    {
                        for &idx in &touched {
                            counts[idx] = 0;
                        }
                        return witness(
                            format!("intersection numbers of class {t} not constant"),
                            (u, w),
                        );
                    }
                }
                for &idx in &touched {
                    counts[idx] = 0;
                }
                touched.clear();
            }
        }
        Ok(SchemeCheck::Valid(tensor))
    }

    /// Fast primitivity test: every nonzero class, viewed as an undirected
    /// graph together with its transpose, is connected.
    pub fn is_primitive(&self) -> bool {
        let n = self.n;
        for c in 1..self.rank as u16 {
            let mut visited = vec![false; n];
            let mut stack = vec![0usize];
            visited[0] = true;
            let mut count = 1;
            while let Some(x) = stack.pop() {
                for y in 0..n {
                    if !visited[y] && (self.color(x, y) == c || self.color(y, x) == c) {
                        visited[y] = true;
                        count += 1;
                        stack.push(y);
                    }
                }
            }
            if count < n {
                return false;
            }
        }
        true
    }

    /// Definition-level primitivity: no union of classes containing the
    /// diagonal is a nontrivial equivalence relation. Enumerates all
    /// 2^(rank-1) unions; usable only at small rank.
    pub fn is_primitive_union_oracle(&self) -> Result<bool> {
        let r = self.rank - 1;
        if r > UNION_ORACLE_RANK {
            return Err(Error::BoundExceeded(r as u64, UNION_ORACLE_RANK as u64));
        }
        let n = self.n;
        let words = n.div_ceil(64);
        for mask in 1u32..((1u32 << r) - 1) {
            let in_union = |c: u16| c == 0 || mask >> (c - 1) & 1 == 1;
            // equivalence iff related points have identical rows
            let mut rows = vec![0u64; n * words];
            for x in 0..n {
                for y in 0..n {
                    if in_union(self.color(x, y)) {
                        rows[x * words + y / 64] |= 1 << (y % 64);
                    }
                }
            }
            let mut is_equiv = true;
            'scan: for x in 0..n {
                for y in 0..n {
                    if in_union(self.color(x, y))
                        && rows[x * words..(x + 1) * words]
                            != rows[y * words..(y + 1) * words]
                    {
                        is_equiv = false;
                        break 'scan;
                    }
                }
            }
            if is_equiv {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// JSON export: N, rank, valency, row-major colors, intersection tensor.
    pub fn to_json(&self, valency: u64) -> String {
        #[derive(Serialize)]
        struct SchemeJson<'a> {
            n: usize,
            rank: usize,
            valency: u64,
            colors: &'a [u16],
            intersection_tensor: &'a [u32],
        }
        serde_json::to_string_pretty(&SchemeJson {
            n: self.n,
            rank: self.rank,
            valency,
            colors: &self.colors,
            intersection_tensor: self.tensor.as_deref().unwrap_or(&[]),
        })
        .expect("serializable")
    }
}

#[derive(Debug, Clone)]
pub struct CyclotomicScheme {
    pub scheme: AssociationScheme,
    pub nearfield: DicksonNearField,
    pub k: Vec<Elt>,
    pub valency: u64,
    /// One coset representative per nonzero class, ascending.
    pub coset_reps: Vec<Elt>,
}

fn check_subgroup(nf: &DicksonNearField, k: &[Elt]) -> Result<()> {
    let set: HashSet<Elt> = k.iter().copied().collect();
    if !set.contains(&nf.field.one()) || set.contains(&nf.field.zero()) || set.len() != k.len() {
        return Err(Error::NotSubgroup);
    }
    for &a in k {
        for &b in k {
            if !set.contains(&nf.circ(a, b)) {
                return Err(Error::NotSubgroup);
            }
        }
    }
    Ok(())
}

/// Partitions the nonzero points into left cosets a*K of a multiplicative
/// subgroup, classes numbered by smallest coset element. Returns the color
/// matrix (difference-based, base-p componentwise subtraction) and the reps.
fn coset_colors(
    n: usize,
    k: &[u64],
    sub: impl Fn(u64, u64) -> u64,
    mul: impl Fn(u64, u64) -> u64,
) -> (Vec<u16>, Vec<u64>) {
    let mut class_of = vec![u16::MAX; n];
    let mut reps = Vec::new();
    let mut next = 1u16;
    for a in 1..n as u64 {
        if class_of[a as usize] != u16::MAX {
            continue;
        }
        for &x in k {
            class_of[mul(a, x) as usize] = next;
        }
        reps.push(a);
        next += 1;
    }
    let mut colors = vec![0u16; n * n];
    for x in 0..n as u64 {
        for y in 0..n as u64 {
            if x != y {
                colors[x as usize * n + y as usize] = class_of[sub(y, x) as usize];
            }
        }
    }
    (colors, reps)
}

/// Builds Cyc(K, NF): (x, y) are in relation a when y - x lies in a o K.
pub fn build_cyclotomic(nf: &DicksonNearField, k: &[Elt]) -> Result<CyclotomicScheme> {
    check_subgroup(nf, k)?;
    let n = nf.field.order() as usize;
    let (colors, reps) = coset_colors(
        n,
        k,
        |y, x| nf.field.sub(y, x),
        |a, x| nf.circ(a, x),
    );
    let rank = 1 + reps.len();
    let mut scheme = AssociationScheme {
        n,
        colors,
        rank,
        tensor: None,
    };
    if n <= BUILD_VERIFY_BOUND {
        match scheme.verify_scheme_axioms()? {
            SchemeCheck::Valid(t) => scheme.tensor = Some(t),
            SchemeCheck::Violation(w) => {
                return Err(Error::Precondition(format!(
                    "constructed scheme violates axioms at {:?}: {}",
                    w.pair, w.description
                )))
            }
        }
    }
    Ok(CyclotomicScheme {
        scheme,
        nearfield: nf.clone(),
        k: k.to_vec(),
        valency: k.len() as u64,
        coset_reps: reps,
    })
}

/// The image of K under the natural linear representation x -> x o b over
/// the prime field.
pub fn base_group(nf: &DicksonNearField, k: &[Elt]) -> Result<MatrixGroup> {
    check_subgroup(nf, k)?;
    let p = nf.pair.p;
    let b = nf.pair.prime_degree() as usize;
    let mats: Vec<Mat> = k
        .iter()
        .map(|&kk| {
            // column j = image of the j-th basis vector (point index p^j)
            let cols: Vec<u64> = (0..b).map(|j| nf.circ(p.pow(j as u32), kk)).collect();
            let mut entries = vec![0u64; b * b];
            for (j, &col) in cols.iter().enumerate() {
                let mut x = col;
                for i in 0..b {
                    entries[i * b + j] = x % p;
                    x /= p;
                }
            }
            Mat { dim: b, p, entries }
        })
        .collect();
    MatrixGroup::from_elements(b, p, mats)
}

/// The affine group Gamma(K, NF) generated by all translations and the
/// right multiplications x -> x o b, b in K.
pub fn affine_group(nf: &DicksonNearField, k: &[Elt]) -> Result<PermGroup> {
    check_subgroup(nf, k)?;
    let f = &nf.field;
    let n = f.order() as usize;
    let b = nf.pair.prime_degree() as usize;
    let mut gens = Vec::new();
    for j in 0..b {
        let e = nf.pair.p.pow(j as u32);
        gens.push(Perm::new(
            (0..n).map(|x| f.add(x as u64, e) as u32).collect(),
        )?);
    }
    for &kk in k {
        gens.push(Perm::new(
            (0..n).map(|x| nf.circ(x as u64, kk) as u32).collect(),
        )?);
    }
    PermGroup::from_generators_degree(gens, Some(n))
}

/// Outcome of the field reduction of a primitive scheme with abelian base
/// group: the induced field structure on V, the image of K, and the scheme
/// rebuilt over the field (identical color matrix).
#[derive(Debug, Clone)]
pub struct FieldReduction {
    pub field: matrix::FieldOnV,
    pub k_image: Vec<u64>,
    pub scheme: AssociationScheme,
}

pub fn abelian_field_reduction(c: &CyclotomicScheme) -> Result<FieldReduction> {
    if !c.scheme.is_primitive() {
        return Err(Error::Precondition("scheme is not primitive".into()));
    }
    let g = base_group(&c.nearfield, &c.k)?;
    if !g.is_abelian() {
        return Err(Error::Precondition("base group is not abelian".into()));
    }
    let span = matrix::span_field(&g)?;
    let field = span.field;
    // transport K through tau: b -> unit^(matrix of b)
    let p = c.nearfield.pair.p;
    let b = c.nearfield.pair.prime_degree() as usize;
    let mut k_image: Vec<u64> = c
        .k
        .iter()
        .map(|&kk| {
            let cols: Vec<u64> = (0..b)
                .map(|j| c.nearfield.circ(p.pow(j as u32), kk))
                .collect();
            // image of the unit point under the matrix of kk
            let mut digits = field.unit;
            let mut out = 0u64;
            for col in cols {
                let d = digits % p;
                digits /= p;
                for _ in 0..d {
                    out = add_points(out, col, p, b);
                }
            }
            out
        })
        .collect();
    k_image.sort_unstable();
    let n = c.scheme.n;
    let (colors, reps) = coset_colors(
        n,
        &k_image,
        |y, x| c.nearfield.field.sub(y, x),
        |a, x| field.mul(a, x),
    );
    let scheme = AssociationScheme {
        n,
        colors,
        rank: 1 + reps.len(),
        tensor: None,
    };
    if scheme.colors != c.scheme.colors {
        return Err(Error::Precondition(
            "field reduction produced a different color matrix".into(),
        ));
    }
    Ok(FieldReduction {
        field,
        k_image,
        scheme,
    })
}

fn add_points(x: u64, y: u64, p: u64, b: usize) -> u64 {
    let (mut x, mut y, mut out, mut base) = (x, y, 0u64, 1u64);
    for _ in 0..b {
        out += (x % p + y % p) % p * base;
        x /= p;
        y /= p;
        base *= p;
    }
    out
}

#[derive(Debug, Clone)]
pub enum AutGroup {
    /// Trivial scheme: the automorphism group is all of Sym(V).
    Symmetric(usize),
    Group(PermGroup),
}

impl AutGroup {
    /// None when N! does not fit in 64 bits (large trivial schemes).
    pub fn order(&self) -> Option<u64> {
        match self {
            AutGroup::Symmetric(n) => {
                (1..=*n as u64).try_fold(1u64, |acc, k| acc.checked_mul(k))
            }
            AutGroup::Group(g) => Some(g.order()),
        }
    }
}

/// Aut(C) as the product of the translation group with the linear closure
/// of the base group; every generator is re-verified to preserve colors.
pub fn aut_group(c: &CyclotomicScheme) -> Result<AutGroup> {
    let n = c.scheme.n;
    if c.scheme.is_trivial() {
        return Ok(AutGroup::Symmetric(n));
    }
    let g = base_group(&c.nearfield, &c.k)?;
    let gbar = g.linear_closure()?;
    let f = &c.nearfield.field;
    let b = c.nearfield.pair.prime_degree() as usize;
    let mut gens: Vec<Perm> = (0..b)
        .map(|j| {
            let e = c.nearfield.pair.p.pow(j as u32);
            Perm::new((0..n).map(|x| f.add(x as u64, e) as u32).collect())
        })
        .collect::<Result<_>>()?;
    // a small generating subset of the closure keeps verification cheap
    let mut stab = PermGroup::trivial(n);
    for m in &gbar.elements {
        let perm = m.to_perm()?;
        if !stab.contains(&perm) {
            gens.push(perm.clone());
            stab = PermGroup::from_generators_degree(gens[b..].to_vec(), Some(n))?;
        }
    }
    for perm in &gens {
        for x in 0..n {
            for y in 0..n {
                if c.scheme.color(perm.apply(x), perm.apply(y)) != c.scheme.color(x, y) {
                    return Err(Error::Precondition(format!(
                        "generator fails to preserve colors at ({x},{y})"
                    )));
                }
            }
        }
    }
    let aut = PermGroup::from_generators_degree(gens, Some(n))?;
    debug_assert_eq!(aut.order(), n as u64 * gbar.order() as u64);
    Ok(AutGroup::Group(aut))
}

/// Deterministic point processing order: color-degree refinement signature,
/// ties broken by index. For schemes all signatures usually coincide.
fn refined_order(s: &AssociationScheme) -> Vec<usize> {
    let n = s.n;
    let mut sig: Vec<(Vec<u32>, usize)> = (0..n)
        .map(|x| {
            let mut row = vec![0u32; s.rank];
            for y in 0..n {
                row[s.color(x, y) as usize] += 1;
                row[s.color(y, x) as usize] += 1;
            }
            (row, x)
        })
        .collect();
    sig.sort();
    sig.into_iter().map(|(_, x)| x).collect()
}

/// Full color-automorphism group by backtracking over point images with
/// color-consistency pruning. Exact; intended as an independent oracle.
///
/// Schreier-style chain search, deepest level first: the generators found
/// at levels > k fix the first k+1 base points, so at level k one coset
/// representative per new orbit point of base point k (together with the
/// level-(k+1) group) generates the full stabilizer of the first k points.
/// This avoids walking all |Aut| leaves of the naive search tree.
pub fn aut_bruteforce(s: &AssociationScheme) -> Result<PermGroup> {
    let n = s.n;
    if n > AUT_BACKTRACK_BOUND {
        return Err(Error::BoundExceeded(n as u64, AUT_BACKTRACK_BOUND as u64));
    }
    let order = refined_order(s);
    let ctx = AutCtx::new(s);
    let mut gens: Vec<Perm> = Vec::new();
    for k in (0..n).rev() {
        let pk = order[k];
        let mut in_prefix = vec![false; n];
        for &pi in &order[..k] {
            in_prefix[pi] = true;
        }
        let mut orbit = orbit_closure(pk, &gens, n);
        for v in 0..n {
            if v == pk || orbit[v] || in_prefix[v] {
                continue;
            }
            // color consistency of pk -> v with the pointwise-fixed prefix
            if !(0..k).all(|i| {
                let pi = order[i];
                s.color(pi, pk) == s.color(pi, v) && s.color(pk, pi) == s.color(v, pi)
            }) {
                continue;
            }
            let mut img = vec![usize::MAX; n];
            for &pi in &order[..k] {
                img[pi] = pi;
            }
            img[pk] = v;
            if let Some(full) = ctx.first_extension(&img) {
                let perm = Perm::new(full.iter().map(|&x| x as u32).collect())
                    .expect("bijection");
                gens.push(perm);
                orbit = orbit_closure(pk, &gens, n);
            }
        }
    }
    PermGroup::from_generators_degree(gens, Some(n))
}

fn orbit_closure(start: usize, gens: &[Perm], n: usize) -> Vec<bool> {
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut queue = vec![start];
    while let Some(x) = queue.pop() {
        for g in gens {
            let y = g.apply(x);
            if !seen[y] {
                seen[y] = true;
                queue.push(y);
            }
        }
    }
    seen
}

/// Forward-checking search context: for every point v and color c, bitsets
/// of the points w with color(v, w) = c (rows) and color(w, v) = c
/// (columns). Candidate sets of unassigned points are intersections of
/// these, so a placement propagates in O(n/64) words per point and dead
/// branches surface as soon as any candidate set empties.
struct AutCtx<'a> {
    s: &'a AssociationScheme,
    words: usize,
    rowb: Vec<u64>,
    colb: Vec<u64>,
}

impl<'a> AutCtx<'a> {
    fn new(s: &'a AssociationScheme) -> Self {
        let n = s.n;
        let rank = s.rank;
        let words = n.div_ceil(64);
        let mut rowb = vec![0u64; n * rank * words];
        let mut colb = vec![0u64; n * rank * words];
        for v in 0..n {
            for w in 0..n {
                let cr = s.color(v, w) as usize;
                rowb[(v * rank + cr) * words + w / 64] |= 1 << (w % 64);
                let cc = s.color(w, v) as usize;
                colb[(v * rank + cc) * words + w / 64] |= 1 << (w % 64);
            }
        }
        AutCtx { s, words, rowb, colb }
    }

    fn row(&self, v: usize, c: usize) -> &[u64] {
        &self.rowb[(v * self.s.rank + c) * self.words..][..self.words]
    }

    fn col(&self, v: usize, c: usize) -> &[u64] {
        &self.colb[(v * self.s.rank + c) * self.words..][..self.words]
    }

    /// First automorphism extending the partial point map img (usize::MAX =
    /// unassigned), or None. img must already be color-consistent.
    fn first_extension(&self, img: &[usize]) -> Option<Vec<usize>> {
        let n = self.s.n;
        let words = self.words;
        let mut img = img.to_vec();
        let mut rem: Vec<usize> = (0..n).filter(|&u| img[u] == usize::MAX).collect();
        // initial candidate sets: constrain every unassigned point by every
        // assigned one
        let assigned: Vec<usize> = (0..n).filter(|&u| img[u] != usize::MAX).collect();
        let mut cand = vec![u64::MAX; n * words];
        for &u in &rem {
            let mut acc = vec![u64::MAX; words];
            for &a in &assigned {
                let r = self.row(img[a], self.s.color(a, u) as usize);
                let c = self.col(img[a], self.s.color(u, a) as usize);
                let mut nz = 0u64;
                for t in 0..words {
                    acc[t] &= r[t] & c[t];
                    nz |= acc[t];
                }
                if nz == 0 {
                    return None;
                }
            }
            cand[u * words..(u + 1) * words].copy_from_slice(&acc);
        }
        if self.search(&mut rem, 0, &mut img, &cand) {
            Some(img)
        } else {
            None
        }
    }

    fn search(&self, rem: &mut Vec<usize>, k: usize, img: &mut [usize], cand: &[u64]) -> bool {
        let words = self.words;
        if k == rem.len() {
            return true;
        }
        // most-constrained unassigned point first
        let mut best = k;
        let mut best_count = u32::MAX;
        for i in k..rem.len() {
            let u = rem[i];
            let cnt: u32 = cand[u * words..(u + 1) * words]
                .iter()
                .map(|w| w.count_ones())
                .sum();
            if cnt < best_count {
                best_count = cnt;
                best = i;
                if cnt == 0 {
                    return false;
                }
            }
        }
        rem.swap(k, best);
        let u = rem[k];
        let cu: Vec<u64> = cand[u * words..(u + 1) * words].to_vec();
        for (wi, &word) in cu.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let w = wi * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                img[u] = w;
                // propagate the placement into the other candidate sets
                let mut child = cand.to_vec();
                let mut ok = true;
                for &u2 in rem[k + 1..].iter() {
                    let r = self.row(w, self.s.color(u, u2) as usize);
                    let c = self.col(w, self.s.color(u2, u) as usize);
                    let slot = &mut child[u2 * words..(u2 + 1) * words];
                    let mut nz = 0u64;
                    for t in 0..words {
                        slot[t] &= r[t] & c[t];
                        nz |= slot[t];
                    }
                    if nz == 0 {
                        ok = false;
                        break;
                    }
                }
                if ok && self.search(rem, k + 1, img, &child) {
                    return true;
                }
            }
        }
        img[u] = usize::MAX;
        rem.swap(k, best);
        false
    }
}

/// Finds one color isomorphism (classes may be relabeled) by backtracking,
/// or None. Oracle counterpart of the conjugacy-based test.
pub fn iso_bruteforce(a: &AssociationScheme, b: &AssociationScheme) -> Result<Option<Perm>> {
    if a.n != b.n || a.rank != b.rank {
        return Ok(None);
    }
    let n = a.n;
    if n > AUT_BACKTRACK_BOUND {
        return Err(Error::BoundExceeded(n as u64, AUT_BACKTRACK_BOUND as u64));
    }
    let order = refined_order(a);
    let mut img = vec![0usize; n];
    let mut used = vec![false; n];
    let mut cmap = vec![u16::MAX; a.rank];
    let mut cmap_inv = vec![u16::MAX; a.rank];
    cmap[0] = 0;
    cmap_inv[0] = 0;
    let found = iso_search(a, b, &order, 0, &mut img, &mut used, &mut cmap, &mut cmap_inv);
    if !found {
        return Ok(None);
    }
    let mut images = vec![0u32; n];
    for (k, &pt) in order.iter().enumerate() {
        images[pt] = img[k] as u32;
    }
    Ok(Some(Perm::new(images)?))
}

#[allow(clippy::too_many_arguments)]
fn iso_search(
    a: &AssociationScheme,
    b: &AssociationScheme,
    order: &[usize],
    k: usize,
    img: &mut Vec<usize>,
    used: &mut Vec<bool>,
    cmap: &mut Vec<u16>,
    cmap_inv: &mut Vec<u16>,
) -> bool {
    let n = a.n;
    if k == n {
        return true;
    }
    let pk = order[k];
    'cand: for v in 0..n {
        if used[v] {
            continue;
        }
        // bind class correspondences required by this assignment
        let mut bound: Vec<u16> = Vec::new();
        for i in 0..k {
            let pi = order[i];
            for (ca, cb) in [
                (a.color(pi, pk), b.color(img[i], v)),
                (a.color(pk, pi), b.color(v, img[i])),
            ] {
                let (ca, cb) = (ca as usize, cb);
                if cmap[ca] == u16::MAX {
                    if cmap_inv[cb as usize] != u16::MAX {
                        for &c in &bound {
                            cmap_inv[cmap[c as usize] as usize] = u16::MAX;
                            cmap[c as usize] = u16::MAX;
                        }
                        continue 'cand;
                    }
                    cmap[ca] = cb;
                    cmap_inv[cb as usize] = ca as u16;
                    bound.push(ca as u16);
                } else if cmap[ca] != cb {
                    for &c in &bound {
                        cmap_inv[cmap[c as usize] as usize] = u16::MAX;
                        cmap[c as usize] = u16::MAX;
                    }
                    continue 'cand;
                }
            }
        }
        img[k] = v;
        used[v] = true;
        if iso_search(a, b, order, k + 1, img, used, cmap, cmap_inv) {
            return true;
        }
        used[v] = false;
        for &c in &bound {
            cmap_inv[cmap[c as usize] as usize] = u16::MAX;
            cmap[c as usize] = u16::MAX;
        }
    }
    false
}

/// Decides isomorphism of two cyclotomic schemes on the same point set by
/// conjugacy of the linear closures of their base groups; the witness is
/// re-verified classwise before being returned.
pub fn are_isomorphic(
    a: &CyclotomicScheme,
    b: &CyclotomicScheme,
) -> Result<(bool, Option<Perm>)> {
    let n = a.scheme.n;
    if n != b.scheme.n {
        return Ok((false, None));
    }
    if a.scheme.is_trivial() && b.scheme.is_trivial() {
        return Ok((true, Some(Perm::identity(n))));
    }
    if a.scheme.is_trivial() != b.scheme.is_trivial() {
        return Ok((false, None));
    }
    if a.scheme.rank != b.scheme.rank {
        return Ok((false, None));
    }
    let ga = base_group(&a.nearfield, &a.k)?.linear_closure()?;
    let gb = base_group(&b.nearfield, &b.k)?.linear_closure()?;
    let conj = match matrix::find_conjugator(&ga, &gb)? {
        Some(g) => g,
        None => return Ok((false, None)),
    };
    // g^-1 (T Ga) g = T Gb as function conjugation, so the point map
    // carrying classes of the first scheme onto the second is g^-1
    let f = conj.inverse().expect("GL element").to_perm()?;
    if !maps_classes_to_classes(&a.scheme, &b.scheme, &f) {
        return Err(Error::Precondition(
            "conjugator does not induce a scheme isomorphism".into(),
        ));
    }
    Ok((true, Some(f)))
}

/// Checks R^f is a class of the target scheme for every class R.
pub fn maps_classes_to_classes(a: &AssociationScheme, b: &AssociationScheme, f: &Perm) -> bool {
    if a.n != b.n || a.rank != b.rank {
        return false;
    }
    let n = a.n;
    let mut cmap = vec![u16::MAX; a.rank];
    let mut seen = vec![false; b.rank];
    for x in 0..n {
        for y in 0..n {
            let ca = a.color(x, y) as usize;
            let cb = b.color(f.apply(x), f.apply(y));
            if cmap[ca] == u16::MAX {
                if seen[cb as usize] {
                    return false;
                }
                cmap[ca] = cb;
                seen[cb as usize] = true;
            } else if cmap[ca] != cb {
                return false;
            }
        }
    }
    true
}
