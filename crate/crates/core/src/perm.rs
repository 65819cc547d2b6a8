//! Permutations and permutation groups.
//!
//! Two engines back every group: a stabilizer chain (deterministic
//! Schreier-Sims) giving order and membership for any size, and a full
//! element enumeration below `ENUMERATION_BOUND` serving as the oracle
//! engine for structural computations (Frobenius kernels, normal closures,
//! minimal normal subgroups).

use crate::error::{Error, Result};
use std::collections::{HashMap, HashSet, VecDeque};

/// Largest order at which the element store is populated.
pub const ENUMERATION_BOUND: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<u32>,
}

impl Perm {
    pub fn new(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i as usize >= n || seen[i as usize] {
                return Err(Error::Precondition("image array is not a bijection".into()));
            }
            seen[i as usize] = true;
        }
        Ok(Perm { images })
    }

    pub fn identity(n: usize) -> Self {
        Perm {
            images: (0..n as u32).collect(),
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> usize) -> Result<Self> {
        Perm::new((0..n).map(|i| f(i) as u32).collect())
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    /// self followed by other: (self * other)(x) = other(self(x)).
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm {
            images: self.images.iter().map(|&i| other.images[i as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0u32; self.degree()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j as usize] = i as u32;
        }
        Perm { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    pub fn fixed_points(&self) -> usize {
        self.images
            .iter()
            .enumerate()
            .filter(|(i, &j)| *i as u32 == j)
            .count()
    }

    /// g^-1 * self * g.
    pub fn conjugate(&self, g: &Perm) -> Perm {
        g.inverse().compose(self).compose(g)
    }
}

// ---------------------------------------------------------------------------
// stabilizer chain

#[derive(Debug, Clone)]
struct ChainLevel {
    base_point: usize,
    /// orbit point -> transversal element mapping base_point to that point
    transversal: HashMap<usize, Perm>,
    gens: Vec<Perm>,
}

#[derive(Debug, Clone)]
pub struct StabChain {
    degree: usize,
    levels: Vec<ChainLevel>,
}

impl StabChain {
    pub fn new(degree: usize, gens: &[Perm]) -> Self {
        let mut chain = StabChain {
            degree,
            levels: Vec::new(),
        };
        let gens: Vec<Perm> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        if gens.is_empty() {
            return chain;
        }
        let bp = (0..degree).find(|&i| gens.iter().any(|g| g.apply(i) != i)).unwrap();
        chain.push_level(bp);
        chain.levels[0].gens = gens;
        chain.schreier_sims(0);
        chain
    }

    pub fn order(&self) -> u64 {
        self.levels
            .iter()
            .map(|l| l.transversal.len() as u64)
            .product()
    }

    pub fn contains(&self, g: &Perm) -> bool {
        self.sift_from(g, 0).is_none()
    }

    /// Strips g through levels start.., returning the first stuck level and
    /// residue; None means full strip (membership, for start = 0).
    fn sift_from(&self, g: &Perm, start: usize) -> Option<(usize, Perm)> {
        let mut h = g.clone();
        for (idx, level) in self.levels.iter().enumerate().skip(start) {
            let img = h.apply(level.base_point);
            match level.transversal.get(&img) {
                Some(t) => h = h.compose(&t.inverse()),
                None => return Some((idx, h)),
            }
        }
        if h.is_identity() {
            None
        } else {
            Some((self.levels.len(), h))
        }
    }

    fn push_level(&mut self, base_point: usize) {
        let mut transversal = HashMap::new();
        transversal.insert(base_point, Perm::identity(self.degree));
        self.levels.push(ChainLevel {
            base_point,
            transversal,
            gens: Vec::new(),
        });
    }

    fn rebuild_orbit(&mut self, i: usize) {
        let bp = self.levels[i].base_point;
        let gens = self.levels[i].gens.clone();
        let mut transversal: HashMap<usize, Perm> = HashMap::new();
        transversal.insert(bp, Perm::identity(self.degree));
        let mut queue = VecDeque::from([bp]);
        while let Some(pt) = queue.pop_front() {
            let rep = transversal[&pt].clone();
            for g in &gens {
                let img = g.apply(pt);
                if !transversal.contains_key(&img) {
                    transversal.insert(img, rep.compose(g));
                    queue.push_back(img);
                }
            }
        }
        self.levels[i].transversal = transversal;
    }

    /// Establishes the chain invariant at level i, assuming it holds below:
    /// afterwards the group generated by the gens of level i+1 is exactly the
    /// stabilizer of base_point[i] in the group generated at level i.
    fn schreier_sims(&mut self, i: usize) {
        'restart: loop {
            self.rebuild_orbit(i);
            let gens = self.levels[i].gens.clone();
            let mut points: Vec<usize> = self.levels[i].transversal.keys().copied().collect();
            points.sort_unstable();
            for pt in points {
                for s in &gens {
                    let rep = self.levels[i].transversal[&pt].clone();
                    let img = s.apply(pt);
                    let rep_img_inv = self.levels[i].transversal[&img].inverse();
                    let schreier = rep.compose(s).compose(&rep_img_inv);
                    if schreier.is_identity() {
                        continue;
                    }
                    if let Some((j, residue)) = self.sift_from(&schreier, i + 1) {
                        // residue fixes the first j base points
                        if j == self.levels.len() {
                            let bp = (0..self.degree)
                                .find(|&k| residue.apply(k) != k)
                                .expect("nonidentity residue moves a point");
                            self.push_level(bp);
                        }
                        for k in i + 1..=j {
                            self.levels[k].gens.push(residue.clone());
                        }
                        for k in (i + 1..=j).rev() {
                            self.schreier_sims(k);
                        }
                        continue 'restart;
                    }
                }
            }
            return;
        }
    }
}

// ---------------------------------------------------------------------------
// permutation groups

#[derive(Debug, Clone)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    chain: StabChain,
    elements: Option<Vec<Perm>>,
}

impl PermGroup {
    pub fn from_generators(gens: Vec<Perm>) -> Result<Self> {
        Self::from_generators_degree(gens, None)
    }

    /// Degree must be supplied for the empty generator list.
    pub fn from_generators_degree(gens: Vec<Perm>, degree: Option<usize>) -> Result<Self> {
        let degree = match (gens.first(), degree) {
            (Some(g), d) => {
                let n = g.degree();
                if let Some(d) = d {
                    if d != n {
                        return Err(Error::DegreeMismatch(d, n));
                    }
                }
                n
            }
            (None, Some(d)) => d,
            (None, None) => {
                return Err(Error::Precondition(
                    "degree required for the trivial group".into(),
                ))
            }
        };
        for g in &gens {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch(degree, g.degree()));
            }
        }
        let chain = StabChain::new(degree, &gens);
        let mut group = PermGroup {
            degree,
            generators: gens,
            chain,
            elements: None,
        };
        if group.order() <= ENUMERATION_BOUND {
            group.elements = Some(group.enumerate());
        }
        Ok(group)
    }

    pub fn trivial(degree: usize) -> Self {
        Self::from_generators_degree(Vec::new(), Some(degree)).unwrap()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn order(&self) -> u64 {
        self.chain.order()
    }

    pub fn contains(&self, g: &Perm) -> bool {
        g.degree() == self.degree && self.chain.contains(g)
    }

    /// Full element list, sorted; available below the enumeration bound.
    pub fn elements(&self) -> Option<&[Perm]> {
        self.elements.as_deref()
    }

    fn enumerate(&self) -> Vec<Perm> {
        let mut seen: HashSet<Perm> = HashSet::new();
        let id = Perm::identity(self.degree);
        seen.insert(id.clone());
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for g in &self.generators {
                let y = x.compose(g);
                if !seen.contains(&y) {
                    seen.insert(y.clone());
                    queue.push_back(y);
                }
            }
        }
        let mut out: Vec<Perm> = seen.into_iter().collect();
        out.sort_unstable();
        out
    }

    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree];
        let mut out = Vec::new();
        for start in 0..self.degree {
            if seen[start] {
                continue;
            }
            let mut orbit = vec![start];
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(pt) = queue.pop_front() {
                for g in &self.generators {
                    let img = g.apply(pt);
                    if !seen[img] {
                        seen[img] = true;
                        orbit.push(img);
                        queue.push_back(img);
                    }
                }
            }
            orbit.sort_unstable();
            out.push(orbit);
        }
        out
    }

    pub fn is_transitive(&self) -> bool {
        self.orbits().len() == 1
    }

    /// Orbit partition of the coordinatewise action on ordered pairs,
    /// as an N x N matrix of class labels. Classes are numbered by the
    /// row-major first occurrence of a representative pair.
    pub fn two_orbit_labels(&self) -> Vec<u32> {
        let n = self.degree;
        let mut labels = vec![u32::MAX; n * n];
        let mut next = 0u32;
        for u in 0..n {
            for w in 0..n {
                if labels[u * n + w] != u32::MAX {
                    continue;
                }
                labels[u * n + w] = next;
                let mut queue = VecDeque::from([(u, w)]);
                while let Some((a, b)) = queue.pop_front() {
                    for g in &self.generators {
                        let (a2, b2) = (g.apply(a), g.apply(b));
                        if labels[a2 * n + b2] == u32::MAX {
                            labels[a2 * n + b2] = next;
                            queue.push_back((a2, b2));
                        }
                    }
                }
                next += 1;
            }
        }
        labels
    }

    pub fn two_orbit_count(&self) -> usize {
        let labels = self.two_orbit_labels();
        (labels.iter().copied().max().unwrap_or(0) + 1) as usize
    }

    /// Normal closure of the given elements, chain-backed (no enumeration).
    pub fn normal_closure(&self, seeds: &[Perm]) -> PermGroup {
        let mut gens: Vec<Perm> = seeds.iter().filter(|g| !g.is_identity()).cloned().collect();
        let mut chain = StabChain::new(self.degree, &gens);
        loop {
            let mut added = false;
            let snapshot = gens.clone();
            for h in &snapshot {
                for g in &self.generators {
                    let conj = h.conjugate(g);
                    if !chain.contains(&conj) {
                        gens.push(conj);
                        chain = StabChain::new(self.degree, &gens);
                        added = true;
                    }
                }
            }
            if !added {
                break;
            }
        }
        PermGroup::from_generators_degree(gens, Some(self.degree)).unwrap()
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.generators.iter().all(|g| other.contains(g))
    }

    pub fn same_group(&self, other: &PermGroup) -> bool {
        self.order() == other.order() && self.is_subgroup_of(other)
    }

    pub fn is_normal_in(&self, other: &PermGroup) -> bool {
        self.is_subgroup_of(other)
            && self
                .generators
                .iter()
                .all(|h| other.generators.iter().all(|g| self.contains(&h.conjugate(g))))
    }

    /// All minimal normal subgroups: minimal elements among normal closures
    /// of single elements of prime order. Requires the element store.
    pub fn minimal_normal_subgroups(&self) -> Result<Vec<PermGroup>> {
        let elements = self
            .elements()
            .ok_or(Error::BoundExceeded(self.order(), ENUMERATION_BOUND))?;
        // one closure per conjugacy class of prime-order elements
        let mut class_of: HashMap<&Perm, usize> = HashMap::new();
        let mut reps: Vec<&Perm> = Vec::new();
        let elem_index: HashMap<&Perm, usize> =
            elements.iter().enumerate().map(|(i, g)| (g, i)).collect();
        let mut assigned = vec![false; elements.len()];
        for (i, x) in elements.iter().enumerate() {
            if assigned[i] || x.is_identity() {
                continue;
            }
            let class_id = reps.len();
            reps.push(x);
            let mut queue = VecDeque::from([x.clone()]);
            assigned[i] = true;
            class_of.insert(x, class_id);
            while let Some(y) = queue.pop_front() {
                for g in &self.generators {
                    let z = y.conjugate(g);
                    let zi = elem_index[&z];
                    if !assigned[zi] {
                        assigned[zi] = true;
                        queue.push_back(z);
                    }
                }
            }
        }
        // prime order filter
        let order_of = |g: &Perm| {
            let mut acc = g.clone();
            let mut k = 1u64;
            while !acc.is_identity() {
                acc = acc.compose(g);
                k += 1;
            }
            k
        };
        let mut closures: Vec<PermGroup> = Vec::new();
        for rep in reps {
            if !crate::arith::is_prime(order_of(rep)) {
                continue;
            }
            let c = self.normal_closure(std::slice::from_ref(rep));
            if !closures.iter().any(|k| k.same_group(&c)) {
                closures.push(c);
            }
        }
        let minimal: Vec<PermGroup> = closures
            .iter()
            .filter(|c| {
                !closures
                    .iter()
                    .any(|d| d.order() < c.order() && d.is_subgroup_of(c))
            })
            .cloned()
            .collect();
        Ok(minimal)
    }

    /// Socle: product of the minimal normal subgroups.
    pub fn socle(&self) -> Result<PermGroup> {
        let minimal = self.minimal_normal_subgroups()?;
        let gens: Vec<Perm> = minimal
            .iter()
            .flat_map(|g| g.generators().iter().cloned())
            .collect();
        PermGroup::from_generators_degree(gens, Some(self.degree))
    }

    /// Frobenius test: transitive and only the identity fixes two points.
    /// On success also returns the kernel (identity plus the fixed-point-free
    /// elements), verified to be a normal subgroup of order equal to the degree.
    pub fn is_frobenius(&self) -> Result<(bool, Option<PermGroup>)> {
        if !self.is_transitive() {
            return Err(Error::Intransitive);
        }
        let elements = self
            .elements()
            .ok_or(Error::BoundExceeded(self.order(), ENUMERATION_BOUND))?;
        if elements
            .iter()
            .any(|g| !g.is_identity() && g.fixed_points() >= 2)
        {
            return Ok((false, None));
        }
        let kernel_elems: Vec<Perm> = elements
            .iter()
            .filter(|g| g.is_identity() || g.fixed_points() == 0)
            .cloned()
            .collect();
        let kernel = PermGroup::from_generators_degree(kernel_elems.clone(), Some(self.degree))?;
        let ok = kernel.order() == self.degree as u64
            && kernel.order() == kernel_elems.len() as u64
            && kernel.is_normal_in(self);
        if !ok {
            return Err(Error::Precondition(
                "Frobenius kernel verification failed".into(),
            ));
        }
        Ok((true, Some(kernel)))
    }

    /// Stabilizer of a point, from the element store.
    pub fn point_stabilizer(&self, point: usize) -> Result<PermGroup> {
        let elements = self
            .elements()
            .ok_or(Error::BoundExceeded(self.order(), ENUMERATION_BOUND))?;
        let stab: Vec<Perm> = elements
            .iter()
            .filter(|g| g.apply(point) == point)
            .cloned()
            .collect();
        PermGroup::from_generators_degree(stab, Some(self.degree))
    }
}
