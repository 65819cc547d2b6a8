//! Dickson pairs and Dickson near-fields.
//!
//! A Dickson near-field of order q^n shares the additive group of GF(q^n)
//! and twists multiplication by field automorphisms: y ∘ x = y^{σ_x} · x,
//! where σ_x depends only on the discrete log of x modulo n.

use crate::arith;
use crate::error::{Error, Result};
use crate::finite_field::{Elt, FiniteField};
use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt::Write as _;

/// Order ceiling for the exhaustive cubic axiom checks.
pub const AXIOM_CHECK_BOUND: u64 = 1 << 12;
/// Order ceiling for explicit Cayley tables and subgroup enumeration.
pub const CAYLEY_BOUND: u64 = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DicksonPair {
    pub q: u64,
    pub n: u32,
    pub p: u64,
    pub d: u32,
}

impl DicksonPair {
    pub fn new(q: u64, n: u32) -> Result<Self> {
        if !Self::is_valid(q, n)? {
            return Err(Error::NotDicksonPair { q, n: n as u64 });
        }
        let (p, d) = arith::prime_power(q).unwrap();
        Ok(DicksonPair { q, n, p, d })
    }

    /// Both Dickson conditions: every prime factor of n divides q-1,
    /// and 4 | n implies 4 | q-1.
    pub fn is_valid(q: u64, n: u32) -> Result<bool> {
        if arith::prime_power(q).is_none() {
            return Err(Error::NotPrimePower(q));
        }
        if n == 0 {
            return Ok(false);
        }
        let n64 = n as u64;
        let primes_ok = arith::distinct_prime_factors(n64)
            .into_iter()
            .all(|r| (q - 1) % r == 0);
        let four_ok = n % 4 != 0 || (q - 1) % 4 == 0;
        Ok(primes_ok && four_ok)
    }

    pub fn order(&self) -> u64 {
        self.q.pow(self.n)
    }

    /// Extension degree of GF(q^n) over the prime field.
    pub fn prime_degree(&self) -> u32 {
        self.d * self.n
    }
}

/// Number of pairwise nonisomorphic Dickson near-fields for the pair:
/// phi(n) / k where k is the multiplicative order of p modulo n.
pub fn count_dickson_nearfields(q: u64, n: u32) -> Result<u64> {
    let pair = DicksonPair::new(q, n)?;
    if n == 1 {
        return Ok(1);
    }
    let k = arith::mult_order(pair.p % n as u64, n as u64);
    Ok(arith::phi(n as u64) / k)
}

/// Coset representatives of the units mod n modulo <p>, sorted ascending;
/// variant i of the (q,n) family is labelled by the i-th representative.
pub fn variant_representatives(pair: &DicksonPair) -> Vec<u64> {
    let n = pair.n as u64;
    if n == 1 {
        return vec![1];
    }
    let units: Vec<u64> = (1..n).filter(|&u| arith::gcd(u, n) == 1).collect();
    let mut seen: HashSet<u64> = HashSet::new();
    let mut reps = Vec::new();
    for &u in &units {
        if seen.contains(&u) {
            continue;
        }
        // orbit of u under multiplication by p mod n
        let mut v = u;
        loop {
            seen.insert(v);
            v = v * (pair.p % n) % n;
            if v == u {
                break;
            }
        }
        reps.push(u);
    }
    reps.sort_unstable();
    reps
}

#[derive(Debug, Clone)]
pub struct DicksonNearField {
    pub pair: DicksonPair,
    pub field: FiniteField,
    pub variant: usize,
    /// Unit u mod n labelling this variant (the coupling twist).
    pub variant_rep: u64,
    /// coupling[m mod n] = Frobenius exponent j for elements x = g^m.
    coupling: Vec<u32>,
    /// twist[m mod n] = q^coupling[m mod n] mod (q^n - 1), so that
    /// y^(sigma_x) = g^(log(y) * twist) without repeated exponentiation.
    twist: Vec<u64>,
}

fn twist_table(pair: &DicksonPair, coupling: &[u32]) -> Vec<u64> {
    let m = pair.order() - 1;
    let q = pair.q % m;
    coupling.iter().map(|&j| arith::pow_mod(q, j as u64, m)).collect()
}

impl DicksonNearField {
    pub fn new(q: u64, n: u32, variant: usize) -> Result<Self> {
        let pair = DicksonPair::new(q, n)?;
        let reps = variant_representatives(&pair);
        let count = count_dickson_nearfields(q, n)? as usize;
        debug_assert_eq!(reps.len(), count);
        if variant >= count {
            return Err(Error::VariantOutOfRange { got: variant, count });
        }
        let field = FiniteField::new(pair.p, pair.prime_degree())?;
        let coupling = build_coupling(&pair, reps[variant])?;
        let twist = twist_table(&pair, &coupling);
        Ok(DicksonNearField {
            pair,
            field,
            variant,
            variant_rep: reps[variant],
            coupling,
            twist,
        })
    }

    /// Like `new`, but reuses an already-built (e.g. cached) field table.
    pub fn with_field(q: u64, n: u32, variant: usize, field: FiniteField) -> Result<Self> {
        let fresh = Self::new(q, n, variant)?;
        if field.p != fresh.pair.p || field.e != fresh.pair.prime_degree() {
            return Err(Error::Precondition(format!(
                "field GF({}^{}) does not match pair ({q},{n})",
                field.p, field.e
            )));
        }
        Ok(DicksonNearField { field, ..fresh })
    }

    /// Diagnostic constructor with an explicit coupling table (negative
    /// controls for the axiom checker).
    pub fn with_custom_coupling(q: u64, n: u32, coupling: Vec<u32>) -> Result<Self> {
        let pair = DicksonPair::new(q, n)?;
        if coupling.len() != n as usize || coupling.iter().any(|&j| j >= n) {
            return Err(Error::Precondition("coupling must map Z_n -> [0,n)".into()));
        }
        let field = FiniteField::new(pair.p, pair.prime_degree())?;
        let twist = twist_table(&pair, &coupling);
        Ok(DicksonNearField {
            pair,
            field,
            variant: 0,
            variant_rep: 1,
            coupling,
            twist,
        })
    }

    pub fn order(&self) -> u64 {
        self.field.order()
    }

    pub fn coupling_exponent(&self, x: Elt) -> Result<u32> {
        let m = self.field.discrete_log(x)?;
        Ok(self.coupling[(m % self.pair.n as u64) as usize])
    }

    /// y ∘ x = y^{σ_x} · x; the coupling depends on the right factor.
    pub fn circ(&self, y: Elt, x: Elt) -> Elt {
        if x == 0 || y == 0 {
            return 0;
        }
        let m = self.field.order() - 1;
        let lx = self.field.discrete_log(x).unwrap();
        let ly = self.field.discrete_log(y).unwrap();
        let t = self.twist[(lx % self.pair.n as u64) as usize];
        // y^(sigma_x) * x = g^(ly * q^j + lx); ly * t < 2^40 at the order bound
        self.field.exp_of(ly * t % m + lx)
    }

    /// Inverse of x in (K^x, ∘).
    pub fn circ_inv(&self, x: Elt) -> Result<Elt> {
        if x == 0 {
            return Err(Error::ZeroLog);
        }
        // |K^x| is finite: x^(ord) = 1, inverse = x^(ord-1) under ∘
        let mut acc = x;
        let mut prev = self.field.one();
        while acc != self.field.one() {
            prev = acc;
            acc = self.circ(acc, x);
        }
        Ok(prev)
    }

    /// Order of x in (K^x, ∘).
    pub fn circ_order(&self, x: Elt) -> Result<u64> {
        if x == 0 {
            return Err(Error::ZeroLog);
        }
        let mut acc = x;
        let mut k = 1u64;
        while acc != self.field.one() {
            acc = self.circ(acc, x);
            k += 1;
        }
        Ok(k)
    }

    pub fn is_field(&self) -> bool {
        self.coupling.iter().all(|&j| j == 0)
    }

    pub fn mult_group(&self) -> Result<MultGroup> {
        MultGroup::new(self)
    }

    /// CSV export of the multiplication table: row x, column y, value y∘x,
    /// all encoded as discrete logs of the fixed primitive element.
    pub fn mult_table_csv(&self) -> String {
        let mut out = String::from("log_x,log_y,log_y_circ_x\n");
        let f = &self.field;
        for x in 1..f.order() {
            for y in 1..f.order() {
                let _ = writeln!(
                    out,
                    "{},{},{}",
                    f.discrete_log(x).unwrap(),
                    f.discrete_log(y).unwrap(),
                    f.discrete_log(self.circ(y, x)).unwrap()
                );
            }
        }
        out
    }
}

/// Invert m -> (q^j - 1)/(q - 1) mod n. Well-defined for Dickson pairs:
/// n divides q^n - 1 and the map j -> m is a bijection on Z_n.
fn build_coupling(pair: &DicksonPair, variant_rep: u64) -> Result<Vec<u32>> {
    let n = pair.n as u64;
    if n == 1 {
        return Ok(vec![0]);
    }
    let mut inverse = vec![u32::MAX; n as usize];
    let mut s = 0u64; // (q^j - 1)/(q - 1) = 1 + q + ... + q^{j-1} mod n
    let qn = pair.q % n;
    for j in 0..pair.n {
        if inverse[(s % n) as usize] != u32::MAX {
            return Err(Error::NotDicksonPair { q: pair.q, n });
        }
        inverse[(s % n) as usize] = j;
        s = (s * qn + 1) % n;
    }
    let v = arith::inv_mod(variant_rep % n, n);
    Ok((0..n).map(|m| inverse[(m * v % n) as usize]).collect())
}

/// Explicit multiplication group (K^x, ∘) with a Cayley table.
#[derive(Debug, Clone)]
pub struct MultGroup {
    /// Nonzero field elements, ascending by index.
    pub elements: Vec<Elt>,
    /// cayley[i][j] = position of elements[i] ∘ elements[j].
    pub cayley: Vec<Vec<u32>>,
    /// Position of the identity (field 1).
    pub identity: usize,
}

impl MultGroup {
    pub fn new(nf: &DicksonNearField) -> Result<Self> {
        let order = nf.order();
        if order > CAYLEY_BOUND {
            return Err(Error::BoundExceeded(order, CAYLEY_BOUND));
        }
        let elements: Vec<Elt> = (1..order).collect();
        let pos = |x: Elt| (x - 1) as usize;
        let cayley = elements
            .iter()
            .map(|&a| elements.iter().map(|&b| pos(nf.circ(a, b)) as u32).collect())
            .collect();
        Ok(MultGroup {
            elements,
            cayley,
            identity: pos(nf.field.one()),
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn op(&self, i: usize, j: usize) -> usize {
        self.cayley[i][j] as usize
    }

    pub fn element_order(&self, i: usize) -> u64 {
        let mut acc = i;
        let mut k = 1u64;
        while acc != self.identity {
            acc = self.op(acc, i);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|i| (i..n).all(|j| self.cayley[i][j] == self.cayley[j][i]))
    }

    /// Closure of a set of positions under the group operation.
    pub fn generated_subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[self.identity] = true;
        let mut members = vec![self.identity];
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.op(x, g);
                if !seen[y] {
                    seen[y] = true;
                    members.push(y);
                    queue.push_back(y);
                }
            }
        }
        members.sort_unstable();
        members
    }

    /// All subgroups, each as a sorted position list, ordered by (order, lex).
    /// Closure of the cyclic subgroups under pairwise joins.
    pub fn subgroups(&self) -> Vec<Vec<usize>> {
        let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
        found.insert(vec![self.identity]);
        for i in 0..self.order() {
            found.insert(self.generated_subgroup(&[i]));
        }
        loop {
            let snapshot: Vec<Vec<usize>> = found.iter().cloned().collect();
            let before = found.len();
            for a in 0..snapshot.len() {
                for b in a + 1..snapshot.len() {
                    if snapshot[a].len() * snapshot[b].len() > self.order() * self.order() {
                        continue;
                    }
                    let mut gens = snapshot[a].clone();
                    gens.extend_from_slice(&snapshot[b]);
                    found.insert(self.generated_subgroup(&gens));
                }
            }
            if found.len() == before {
                break;
            }
        }
        let mut out: Vec<Vec<usize>> = found.into_iter().collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }

    /// A small generating set (greedy by element order).
    pub fn generating_set(&self) -> Vec<usize> {
        let mut gens: Vec<usize> = Vec::new();
        let mut current = vec![self.identity];
        while current.len() < self.order() {
            let next = (0..self.order())
                .filter(|i| current.binary_search(i).is_err())
                .max_by_key(|&i| self.element_order(i))
                .unwrap();
            gens.push(next);
            current = self.generated_subgroup(&gens);
        }
        gens
    }
}

/// Per-axiom verdict of the exhaustive near-field axiom scan; a failing
/// axiom carries a witness triple of field-element indices.
#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub right_distributive: std::result::Result<(), (Elt, Elt, Elt)>,
    pub associative: std::result::Result<(), (Elt, Elt, Elt)>,
    pub identity: std::result::Result<(), Elt>,
    pub inverses: std::result::Result<(), Elt>,
    pub zero_absorbing: std::result::Result<(), Elt>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.right_distributive.is_ok()
            && self.associative.is_ok()
            && self.identity.is_ok()
            && self.inverses.is_ok()
            && self.zero_absorbing.is_ok()
    }
}

/// Exhaustive axiom verification: right distributivity over all triples,
/// associativity of ∘ over all nonzero triples, two-sided identity and
/// inverses, and absorption of zero.
pub fn verify_nearfield_axioms(nf: &DicksonNearField) -> Result<AxiomReport> {
    let order = nf.order();
    if order > AXIOM_CHECK_BOUND {
        return Err(Error::BoundExceeded(order, AXIOM_CHECK_BOUND));
    }
    let f = &nf.field;
    let one = f.one();
    let m = order as usize;

    // cubic scans over full operation tables: ct[x*m + y] = y ∘ x (row per
    // right factor keeps the inner loops on contiguous memory), and the
    // symmetric addition table at[a*m + b] = a + b
    let mut ct = vec![0u32; m * m];
    let mut at = vec![0u32; m * m];
    for a in 0..order {
        for b in 0..order {
            ct[(a * order + b) as usize] = nf.circ(b, a) as u32;
            at[(a * order + b) as usize] = f.add(a, b) as u32;
        }
    }

    let mut right_distributive = Ok(());
    'rd: for x in 0..m {
        let cx = &ct[x * m..(x + 1) * m];
        for y in 0..m {
            let yrow = &at[y * m..(y + 1) * m];
            let prow = &at[cx[y] as usize * m..(cx[y] as usize + 1) * m];
            for z in 0..m {
                // (y + z) ∘ x  ==  y ∘ x + z ∘ x
                if cx[yrow[z] as usize] != prow[cx[z] as usize] {
                    right_distributive = Err((y as Elt, z as Elt, x as Elt));
                    break 'rd;
                }
            }
        }
    }

    let mut associative = Ok(());
    'as_: for y in 1..m {
        let cy = &ct[y * m..(y + 1) * m];
        for z in 1..m {
            let cz = &ct[z * m..(z + 1) * m];
            let yz = cz[y] as usize;
            let cyz = &ct[yz * m..(yz + 1) * m];
            for x in 1..m {
                // (x ∘ y) ∘ z  ==  x ∘ (y ∘ z)
                if cz[cy[x] as usize] != cyz[x] {
                    associative = Err((x as Elt, y as Elt, z as Elt));
                    break 'as_;
                }
            }
        }
    }

    let mut identity = Ok(());
    for x in 1..order {
        if nf.circ(x, one) != x || nf.circ(one, x) != x {
            identity = Err(x);
            break;
        }
    }

    let mut inverses = Ok(());
    for x in 1..order {
        let y = nf.circ_inv(x)?;
        if nf.circ(y, x) != one || nf.circ(x, y) != one {
            inverses = Err(x);
            break;
        }
    }

    let mut zero_absorbing = Ok(());
    for x in 0..order {
        if nf.circ(x, 0) != 0 || nf.circ(0, x) != 0 {
            zero_absorbing = Err(x);
            break;
        }
    }

    Ok(AxiomReport {
        right_distributive,
        associative,
        identity,
        inverses,
        zero_absorbing,
    })
}

/// Brute-force near-field isomorphism: searches for a bijection that is
/// multiplicative on K^x and GF(p)-linear on the additive group. Returns the
/// bijection as an image table indexed by field-element index.
pub fn nearfields_isomorphic(a: &DicksonNearField, b: &DicksonNearField) -> Option<Vec<Elt>> {
    if a.order() != b.order() || a.pair.p != b.pair.p {
        return None;
    }
    let ga = a.mult_group().expect("order within Cayley bound");
    let gb = b.mult_group().expect("order within Cayley bound");
    let gens = ga.generating_set();
    let gen_orders: Vec<u64> = gens.iter().map(|&g| ga.element_order(g)).collect();
    let orders_b: Vec<u64> = (0..gb.order()).map(|i| gb.element_order(i)).collect();

    let mut candidate_images: Vec<Vec<usize>> = gen_orders
        .iter()
        .map(|&o| (0..gb.order()).filter(|&i| orders_b[i] == o).collect())
        .collect();
    // keep the search tree small: most-constrained generator first
    let mut order_idx: Vec<usize> = (0..gens.len()).collect();
    order_idx.sort_by_key(|&i| candidate_images[i].len());
    let gens: Vec<usize> = order_idx.iter().map(|&i| gens[i]).collect();
    candidate_images = order_idx.iter().map(|&i| candidate_images[i].clone()).collect();

    let mut images = vec![0usize; gens.len()];
    search_iso(a, b, &ga, &gb, &gens, &candidate_images, &mut images, 0)
}

fn search_iso(
    a: &DicksonNearField,
    b: &DicksonNearField,
    ga: &MultGroup,
    gb: &MultGroup,
    gens: &[usize],
    candidates: &[Vec<usize>],
    images: &mut Vec<usize>,
    depth: usize,
) -> Option<Vec<Elt>> {
    if depth == gens.len() {
        return extend_and_check(a, b, ga, gb, gens, images);
    }
    for &cand in &candidates[depth] {
        images[depth] = cand;
        // cheap relation filter on adjacent generator products
        if depth > 0 {
            let prod_a = ga.op(gens[depth - 1], gens[depth]);
            let prod_b = gb.op(images[depth - 1], cand);
            if ga.element_order(prod_a) != gb.element_order(prod_b) {
                continue;
            }
        }
        if let Some(w) = search_iso(a, b, ga, gb, gens, candidates, images, depth + 1) {
            return Some(w);
        }
    }
    None
}

fn extend_and_check(
    a: &DicksonNearField,
    b: &DicksonNearField,
    ga: &MultGroup,
    gb: &MultGroup,
    gens: &[usize],
    images: &[usize],
) -> Option<Vec<Elt>> {
    let n = ga.order();
    let mut map: Vec<Option<usize>> = vec![None; n];
    map[ga.identity] = Some(gb.identity);
    let mut used = vec![false; n];
    used[gb.identity] = true;
    let mut queue = VecDeque::from([ga.identity]);
    let mut covered = 1usize;
    while let Some(x) = queue.pop_front() {
        let fx = map[x].unwrap();
        for (&g, &h) in gens.iter().zip(images) {
            let y = ga.op(x, g);
            let fy = gb.op(fx, h);
            match map[y] {
                Some(prev) if prev != fy => return None,
                Some(_) => {}
                None => {
                    if used[fy] {
                        return None; // not injective
                    }
                    used[fy] = true;
                    map[y] = Some(fy);
                    covered += 1;
                    queue.push_back(y);
                }
            }
        }
    }
    if covered != n {
        return None; // generators fail to generate, should not happen
    }
    // full multiplicativity: every Cayley edge along each generator
    for x in 0..n {
        for (&g, &h) in gens.iter().zip(images) {
            if map[ga.op(x, g)] != Some(gb.op(map[x].unwrap(), h)) {
                return None;
            }
        }
    }
    // image table on field-element indices, with 0 -> 0
    let order = a.order();
    let mut table = vec![0 as Elt; order as usize];
    for x in 0..n {
        table[ga.elements[x] as usize] = gb.elements[map[x].unwrap()];
    }
    // additive side: the map must be GF(p)-linear
    if !is_gfp_linear(&a.field, &b.field, &table) {
        return None;
    }
    Some(table)
}

fn is_gfp_linear(fa: &FiniteField, fb: &FiniteField, table: &[Elt]) -> bool {
    let p = fa.p;
    let e = fa.e;
    // images of the basis determine the candidate linear map
    for x in 0..fa.order() {
        let coeffs = fa.coeffs(x);
        let mut expected = 0 as Elt;
        for i in 0..e as usize {
            let basis_img = table[p.pow(i as u32) as usize];
            let mut scaled = 0 as Elt;
            for _ in 0..coeffs[i] {
                scaled = fb.add(scaled, basis_img);
            }
            expected = fb.add(expected, scaled);
        }
        if table[x as usize] != expected {
            return false;
        }
    }
    true
}

/// Partition variant indices of the (q,n) family into isomorphism classes
/// by brute-force pairwise testing.
pub fn classify_variants(q: u64, n: u32) -> Result<Vec<Vec<usize>>> {
    let count = count_dickson_nearfields(q, n)? as usize;
    let nfs: Vec<DicksonNearField> = (0..count)
        .map(|v| DicksonNearField::new(q, n, v))
        .collect::<Result<_>>()?;
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..count {
        match classes
            .iter_mut()
            .find(|c| nearfields_isomorphic(&nfs[c[0]], &nfs[i]).is_some())
        {
            Some(c) => c.push(i),
            None => classes.push(vec![i]),
        }
    }
    Ok(classes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dickson_pair_validation() {
        // direct check of both conditions
        assert!(DicksonPair::is_valid(3, 2).unwrap());
        for (q, n) in [(2u64, 6u32), (2, 4), (4, 2), (8, 2)] {
            assert!(!DicksonPair::is_valid(q, n).unwrap(), "({q},{n})");
        }
        for q in [2u64, 3, 4, 5, 7, 8, 9, 343] {
            assert!(DicksonPair::is_valid(q, 1).unwrap());
        }
        assert!(matches!(
            DicksonPair::is_valid(6, 2),
            Err(Error::NotPrimePower(6))
        ));
    }

    #[test]
    fn nearfield_counts() {
        assert_eq!(count_dickson_nearfields(3, 2).unwrap(), 1);
        assert_eq!(count_dickson_nearfields(5, 4).unwrap(), 2);
        for q in [2u64, 3, 9, 25] {
            assert_eq!(count_dickson_nearfields(q, 1).unwrap(), 1);
        }
        assert!(count_dickson_nearfields(2, 6).is_err());
    }

    #[test]
    fn coupling_is_bijection_on_zn() {
        for (q, n) in [(3u64, 2u32), (5, 2), (7, 2), (9, 2), (4, 3), (5, 4), (7, 3)] {
            let pair = DicksonPair::new(q, n).unwrap();
            for rep in variant_representatives(&pair) {
                let coupling = build_coupling(&pair, rep).unwrap();
                let mut seen: Vec<u32> = coupling.clone();
                seen.sort_unstable();
                assert_eq!(seen, (0..n).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn field_case_is_plain_multiplication() {
        let nf = DicksonNearField::new(7, 1, 0).unwrap();
        assert!(nf.is_field());
        for x in 0..7 {
            for y in 0..7 {
                assert_eq!(nf.circ(y, x), nf.field.mul(y, x));
            }
        }
    }

    #[test]
    fn order9_coupling_parity() {
        // j(g^m): m even -> 0, m odd -> 1, since (3^1-1)/2 = 1 = 1 mod 2
        let nf = DicksonNearField::new(3, 2, 0).unwrap();
        let f = &nf.field;
        for x in 1..9u64 {
            let m = f.discrete_log(x).unwrap();
            let expected = (m % 2) as u32;
            assert_eq!(nf.coupling_exponent(x).unwrap(), expected);
            // y ∘ x = y·x for even log x, y^3·x for odd log x
            for y in 1..9u64 {
                let plain = f.mul(y, x);
                let cubed = f.mul(f.pow(y, 3), x);
                assert_eq!(nf.circ(y, x), if m % 2 == 0 { plain } else { cubed });
            }
        }
    }

    #[test]
    fn order9_mult_group_is_quaternion() {
        let nf = DicksonNearField::new(3, 2, 0).unwrap();
        let g = nf.mult_group().unwrap();
        assert_eq!(g.order(), 8);
        assert!(!g.is_abelian());
        let orders: Vec<u64> = (0..8).map(|i| g.element_order(i)).collect();
        assert_eq!(orders.iter().filter(|&&o| o == 2).count(), 1);
        assert_eq!(orders.iter().filter(|&&o| o == 4).count(), 6);
        assert_eq!(orders.iter().filter(|&&o| o == 1).count(), 1);
    }

    #[test]
    fn order9_noncommutativity_witness() {
        let nf = DicksonNearField::new(3, 2, 0).unwrap();
        let found = (1..9u64)
            .any(|x| (1..9u64).any(|y| nf.circ(y, x) != nf.circ(x, y)));
        assert!(found);
    }

    #[test]
    fn identity_is_field_one() {
        for (q, n) in [(3u64, 2u32), (5, 2), (4, 3)] {
            let nf = DicksonNearField::new(q, n, 0).unwrap();
            for y in 1..nf.order() {
                assert_eq!(nf.circ(y, 1), y);
                assert_eq!(nf.circ(1, y), y);
            }
        }
    }

    #[test]
    fn axioms_pass_small_nearfields() {
        for (q, n) in [(3u64, 2u32), (5, 2), (9, 1), (4, 3)] {
            for v in 0..count_dickson_nearfields(q, n).unwrap() as usize {
                let nf = DicksonNearField::new(q, n, v).unwrap();
                let report = verify_nearfield_axioms(&nf).unwrap();
                assert!(report.all_pass(), "({q},{n}) variant {v}: {report:?}");
            }
        }
    }

    #[test]
    fn mutated_coupling_fails_associativity() {
        // swap the coupling on one coset: (3,2) correct coupling is [0,1]
        let nf = DicksonNearField::with_custom_coupling(3, 2, vec![1, 1]).unwrap();
        let report = verify_nearfield_axioms(&nf).unwrap();
        assert!(!report.all_pass());
        assert!(report.associative.is_err() || report.inverses.is_err() || report.identity.is_err());
        // right distributivity survives any coupling (it never uses it on the left)
        assert!(report.right_distributive.is_ok());
    }

    #[test]
    fn subgroups_of_quaternion() {
        let nf = DicksonNearField::new(3, 2, 0).unwrap();
        let g = nf.mult_group().unwrap();
        let subs = g.subgroups();
        // textbook lattice of Q8: 1, <-1>, three cyclic of order 4, Q8
        assert_eq!(subs.len(), 6);
        let sizes: Vec<usize> = subs.iter().map(|s| s.len()).collect();
        assert_eq!(sizes, vec![1, 2, 4, 4, 4, 8]);
    }

    #[test]
    fn subgroups_of_cyclic_8() {
        let nf = DicksonNearField::new(9, 1, 0).unwrap();
        let g = nf.mult_group().unwrap();
        assert!(g.is_abelian());
        let subs = g.subgroups();
        assert_eq!(subs.len(), 4); // one per divisor of 8
        assert_eq!(
            subs.iter().map(|s| s.len()).collect::<Vec<_>>(),
            vec![1, 2, 4, 8]
        );
    }

    #[test]
    fn trivial_group_subgroups() {
        let nf = DicksonNearField::new(2, 1, 0).unwrap();
        let g = nf.mult_group().unwrap();
        assert_eq!(g.subgroups(), vec![vec![g.identity]]);
    }

    #[test]
    fn field_iff_abelian() {
        for (q, n) in [(3u64, 2u32), (5, 2), (9, 1), (25, 1), (4, 3)] {
            let nf = DicksonNearField::new(q, n, 0).unwrap();
            let g = nf.mult_group().unwrap();
            assert_eq!(nf.is_field(), g.is_abelian(), "({q},{n})");
        }
    }

    #[test]
    fn sylow_subgroups_cyclic_or_quaternion() {
        for (q, n) in [(3u64, 2u32), (5, 2), (7, 2), (4, 3)] {
            let nf = DicksonNearField::new(q, n, 0).unwrap();
            let g = nf.mult_group().unwrap();
            let order = g.order() as u64;
            for (p, e) in arith::factor(order) {
                let pk = p.pow(e) as usize;
                let sylow = g
                    .subgroups()
                    .into_iter()
                    .find(|s| s.len() == pk)
                    .expect("Sylow subgroup exists");
                let has_full_order_elt = sylow.iter().any(|&i| g.element_order(i) == pk as u64);
                let involutions = sylow.iter().filter(|&&i| g.element_order(i) == 2).count();
                // cyclic, or a (generalized) quaternion 2-group: unique involution
                assert!(
                    has_full_order_elt || (p == 2 && involutions == 1),
                    "({q},{n}) Sylow {p}-subgroup"
                );
            }
        }
    }

    #[test]
    fn self_isomorphism_and_variant_classes() {
        let nf = DicksonNearField::new(3, 2, 0).unwrap();
        let w = nearfields_isomorphic(&nf, &nf).expect("self-isomorphic");
        assert_eq!(w[1], 1);
        assert_eq!(w[0], 0);
        assert_eq!(classify_variants(3, 2).unwrap().len(), 1);
        assert_eq!(classify_variants(5, 2).unwrap().len(), 1);
    }

    #[test]
    fn nearfield_not_isomorphic_to_field_order9() {
        let nf = DicksonNearField::new(3, 2, 0).unwrap();
        let f9 = DicksonNearField::new(9, 1, 0).unwrap();
        assert!(nearfields_isomorphic(&nf, &f9).is_none());
    }

    #[test]
    fn mult_table_csv_shape() {
        let nf = DicksonNearField::new(3, 1, 0).unwrap();
        let csv = nf.mult_table_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "log_x,log_y,log_y_circ_x");
        assert_eq!(lines.len(), 1 + 4);
    }
}
