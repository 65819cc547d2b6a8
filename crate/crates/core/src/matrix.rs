//! Matrix groups over prime fields.
//!
//! Points of V = GF(p)^b are indexed 0..p^b by base-p digit encoding of the
//! coordinate vector, the same convention the field and scheme modules use,
//! so matrices, permutations and field elements interconvert losslessly.

use crate::error::{Error, Result};
use crate::perm::Perm;
use std::collections::HashSet;

/// Ceiling on |GL(b,p)| for full enumeration; |GL(4,3)| is the intended
/// largest instance.
pub const GL_ENUMERATION_BOUND: u64 = 24_261_120;
/// Point-count ceiling (p^b) for the linear-closure backtracking search.
pub const CLOSURE_POINT_BOUND: u64 = 1 << 10;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat {
    pub dim: usize,
    pub p: u64,
    /// Row-major entries.
    pub entries: Vec<u64>,
}

impl Mat {
    pub fn identity(dim: usize, p: u64) -> Self {
        let mut entries = vec![0u64; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1;
        }
        Mat { dim, p, entries }
    }

    pub fn from_rows(p: u64, rows: &[Vec<u64>]) -> Self {
        let dim = rows.len();
        let entries = rows.iter().flatten().map(|&x| x % p).collect();
        Mat { dim, p, entries }
    }

    pub fn at(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.dim + j]
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        let n = self.dim;
        let mut entries = vec![0u64; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.at(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] =
                        (entries[i * n + j] + a * other.at(k, j)) % self.p;
                }
            }
        }
        Mat {
            dim: n,
            p: self.p,
            entries,
        }
    }

    /// Gauss-Jordan inverse; None for singular matrices.
    pub fn inverse(&self) -> Option<Mat> {
        let n = self.dim;
        let p = self.p;
        let mut a: Vec<u64> = self.entries.clone();
        let mut inv = Mat::identity(n, p).entries;
        for col in 0..n {
            let pivot = (col..n).find(|&r| a[r * n + col] != 0)?;
            for j in 0..n {
                a.swap(pivot * n + j, col * n + j);
                inv.swap(pivot * n + j, col * n + j);
            }
            let scale = crate::arith::inv_mod(a[col * n + col], p);
            for j in 0..n {
                a[col * n + j] = a[col * n + j] * scale % p;
                inv[col * n + j] = inv[col * n + j] * scale % p;
            }
            for r in 0..n {
                if r == col || a[r * n + col] == 0 {
                    continue;
                }
                let factor = a[r * n + col];
                for j in 0..n {
                    a[r * n + j] = (a[r * n + j] + p * p - factor * a[col * n + j] % p) % p;
                    inv[r * n + j] = (inv[r * n + j] + p * p - factor * inv[col * n + j] % p) % p;
                }
            }
        }
        Some(Mat {
            dim: n,
            p,
            entries: inv,
        })
    }

    /// Applies the matrix to a point of V (base-p digit encoding).
    pub fn apply(&self, v: u64) -> u64 {
        let n = self.dim;
        let p = self.p;
        let mut digits = vec![0u64; n];
        let mut x = v;
        for d in digits.iter_mut() {
            *d = x % p;
            x /= p;
        }
        let mut out = 0u64;
        let mut base = 1u64;
        for i in 0..n {
            let mut acc = 0u64;
            for j in 0..n {
                acc += self.at(i, j) * digits[j];
            }
            out += acc % p * base;
            base *= p;
        }
        out
    }

    /// The permutation induced on the p^b points of V.
    pub fn to_perm(&self) -> Result<Perm> {
        let size = self.p.pow(self.dim as u32) as usize;
        Perm::new((0..size).map(|v| self.apply(v as u64) as u32).collect())
    }
}

pub fn gl_order(dim: usize, p: u64) -> u64 {
    let q = p.pow(dim as u32);
    let mut out = 1u64;
    let mut pk = 1u64;
    for _ in 0..dim {
        out *= q - pk;
        pk *= p;
    }
    out
}

/// A subgroup of GL(b,p) as an explicit matrix set.
#[derive(Debug, Clone)]
pub struct MatrixGroup {
    pub dim: usize,
    pub p: u64,
    pub elements: Vec<Mat>,
}

impl MatrixGroup {
    /// Builds from a full element list; verifies closure and invertibility.
    pub fn from_elements(dim: usize, p: u64, mut elements: Vec<Mat>) -> Result<Self> {
        elements.sort_unstable();
        elements.dedup();
        let set: HashSet<&Mat> = elements.iter().collect();
        for a in &elements {
            if a.inverse().is_none() {
                return Err(Error::NotSubgroup);
            }
            for b in &elements {
                if !set.contains(&a.mul(b)) {
                    return Err(Error::NotSubgroup);
                }
            }
        }
        if !set.contains(&Mat::identity(dim, p)) {
            return Err(Error::NotSubgroup);
        }
        Ok(MatrixGroup { dim, p, elements })
    }

    pub fn generate(dim: usize, p: u64, gens: &[Mat]) -> Self {
        let id = Mat::identity(dim, p);
        let mut seen: HashSet<Mat> = HashSet::from([id.clone()]);
        let mut queue = vec![id];
        while let Some(m) = queue.pop() {
            for g in gens {
                let next = m.mul(g);
                if seen.insert(next.clone()) {
                    queue.push(next);
                }
            }
        }
        let mut elements: Vec<Mat> = seen.into_iter().collect();
        elements.sort_unstable();
        MatrixGroup { dim, p, elements }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, m: &Mat) -> bool {
        self.elements.binary_search(m).is_ok()
    }

    pub fn point_count(&self) -> u64 {
        self.p.pow(self.dim as u32)
    }

    pub fn is_abelian(&self) -> bool {
        self.elements
            .iter()
            .all(|a| self.elements.iter().all(|b| a.mul(b) == b.mul(a)))
    }

    /// Orbits on V, as an orbit-id label per point.
    pub fn orbit_labels(&self) -> Vec<u32> {
        let n = self.point_count() as usize;
        let mut labels = vec![u32::MAX; n];
        let mut next = 0u32;
        for start in 0..n {
            if labels[start] != u32::MAX {
                continue;
            }
            let mut stack = vec![start as u64];
            labels[start] = next;
            while let Some(v) = stack.pop() {
                for m in &self.elements {
                    let w = m.apply(v);
                    if labels[w as usize] == u32::MAX {
                        labels[w as usize] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        labels
    }

    /// True iff no proper nonzero subspace is invariant under the group:
    /// for every nonzero v, the span of the orbit of v must be all of V.
    pub fn is_irreducible(&self) -> bool {
        let n = self.point_count();
        for v in 1..n {
            let mut basis = SpanBasis::new(self.dim, self.p);
            let mut stack = vec![v];
            let mut seen = HashSet::from([v]);
            while let Some(x) = stack.pop() {
                basis.insert(x);
                if basis.dim() == self.dim {
                    break;
                }
                for m in &self.elements {
                    let w = m.apply(x);
                    if seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
            if basis.dim() < self.dim {
                return false;
            }
        }
        true
    }

    /// Linear closure: all h in GL(b,p) fixing every orbit of the group
    /// setwise. Enumerated by rank extension over the images of the standard
    /// basis vectors, pruning on orbit membership of the partial span.
    pub fn linear_closure(&self) -> Result<MatrixGroup> {
        // the search never materializes GL; its work is bounded by the
        // orbit-pruned column tree, so the guard is on the point count
        if self.point_count() > CLOSURE_POINT_BOUND {
            return Err(Error::BoundExceeded(self.point_count(), CLOSURE_POINT_BOUND));
        }
        let labels = self.orbit_labels();
        let mut out: Vec<Mat> = Vec::new();
        let mut columns: Vec<u64> = Vec::new();
        self.closure_search(&labels, &mut columns, &mut out);
        let closure = MatrixGroup::from_elements(self.dim, self.p, out)?;
        // sanity: extensive and orbit-preserving
        debug_assert!(self.elements.iter().all(|m| closure.contains(m)));
        Ok(closure)
    }

    fn closure_search(&self, labels: &[u32], columns: &mut Vec<u64>, out: &mut Vec<Mat>) {
        let b = self.dim;
        let p = self.p;
        if columns.len() == b {
            out.push(mat_from_columns(b, p, columns));
            return;
        }
        let k = columns.len();
        let basis_vec = p.pow(k as u32); // index of e_k
        for img in 1..p.pow(b as u32) {
            if labels[img as usize] != labels[basis_vec as usize] {
                continue;
            }
            columns.push(img);
            if partial_span_ok(b, p, columns, labels) {
                self.closure_search(labels, columns, out);
            }
            columns.pop();
        }
    }
}

/// Checks every vector supported on the first k basis vectors: its image
/// under the partial matrix must stay inside its own orbit. Vectors with a
/// nonzero top digit also certify linear independence of the new column.
fn partial_span_ok(b: usize, p: u64, columns: &[u64], labels: &[u32]) -> bool {
    let k = columns.len();
    let count = p.pow(k as u32);
    let add = |x: u64, y: u64| -> u64 {
        let mut out = 0u64;
        let (mut x, mut y) = (x, y);
        let mut base = 1u64;
        for _ in 0..b {
            out += (x % p + y % p) % p * base;
            x /= p;
            y /= p;
            base *= p;
        }
        out
    };
    // iterate combos with nonzero coefficient on the newest column
    let stride = count / p; // p^{k-1}
    let mut seen_zero_image = false;
    for combo in stride..count {
        let mut digits = combo;
        let mut v = 0u64; // domain vector
        let mut image = 0u64;
        let mut base = 1u64;
        for col in columns.iter().take(k) {
            let c = digits % p;
            digits /= p;
            v += c * base;
            base *= p;
            let mut scaled = 0u64;
            for _ in 0..c {
                scaled = add(scaled, *col);
            }
            image = add(image, scaled);
        }
        if image == 0 {
            seen_zero_image = true;
            break;
        }
        if labels[image as usize] != labels[v as usize] {
            return false;
        }
    }
    !seen_zero_image
}

fn mat_from_columns(b: usize, p: u64, columns: &[u64]) -> Mat {
    let mut entries = vec![0u64; b * b];
    for (j, &col) in columns.iter().enumerate() {
        let mut x = col;
        for i in 0..b {
            entries[i * b + j] = x % p;
            x /= p;
        }
    }
    Mat {
        dim: b,
        p,
        entries,
    }
}

/// Plain rank-extension enumeration of all of GL(b,p), row by row, each row
/// avoiding the span of the previous rows. Oracle counterpart of the pruned
/// search inside linear_closure.
pub fn enumerate_gl(dim: usize, p: u64) -> Result<Vec<Mat>> {
    if gl_order(dim, p) > GL_ENUMERATION_BOUND {
        return Err(Error::BoundExceeded(gl_order(dim, p), GL_ENUMERATION_BOUND));
    }
    let mut out = Vec::with_capacity(gl_order(dim, p) as usize);
    let mut rows: Vec<u64> = Vec::new();
    gl_search(dim, p, &mut rows, &mut out);
    Ok(out)
}

fn gl_search(dim: usize, p: u64, rows: &mut Vec<u64>, out: &mut Vec<Mat>) {
    if rows.len() == dim {
        let row_vecs: Vec<Vec<u64>> = rows
            .iter()
            .map(|&r| {
                let mut x = r;
                (0..dim)
                    .map(|_| {
                        let c = x % p;
                        x /= p;
                        c
                    })
                    .collect()
            })
            .collect();
        out.push(Mat::from_rows(p, &row_vecs));
        return;
    }
    let span = span_of(dim, p, rows);
    for r in 1..p.pow(dim as u32) {
        if !span.contains(&r) {
            rows.push(r);
            gl_search(dim, p, rows, out);
            rows.pop();
        }
    }
}

fn span_of(dim: usize, p: u64, vecs: &[u64]) -> HashSet<u64> {
    let add = |x: u64, y: u64| -> u64 {
        let mut out = 0u64;
        let (mut x, mut y) = (x, y);
        let mut base = 1u64;
        for _ in 0..dim {
            out += (x % p + y % p) % p * base;
            x /= p;
            y /= p;
            base *= p;
        }
        out
    };
    let mut span = HashSet::from([0u64]);
    for &v in vecs {
        let members: Vec<u64> = span.iter().copied().collect();
        for m in members {
            let mut acc = m;
            for _ in 1..p {
                acc = add(acc, v);
                span.insert(acc);
            }
        }
    }
    span
}

/// Incremental row-echelon basis over GF(p) for vectors given as point
/// indices.
struct SpanBasis {
    dim: usize,
    p: u64,
    /// rows[i]: a vector with pivot at position i (digit i), or 0
    rows: Vec<u64>,
    count: usize,
}

impl SpanBasis {
    fn new(dim: usize, p: u64) -> Self {
        SpanBasis {
            dim,
            p,
            rows: vec![0; dim],
            count: 0,
        }
    }

    fn digits(&self, v: u64) -> Vec<u64> {
        let mut x = v;
        (0..self.dim)
            .map(|_| {
                let c = x % self.p;
                x /= self.p;
                c
            })
            .collect()
    }

    fn from_digits(&self, d: &[u64]) -> u64 {
        d.iter().rev().fold(0u64, |acc, &c| acc * self.p + c % self.p)
    }

    fn insert(&mut self, v: u64) -> bool {
        let p = self.p;
        let mut d = self.digits(v);
        for i in (0..self.dim).rev() {
            if d[i] == 0 {
                continue;
            }
            if self.rows[i] == 0 {
                // normalize pivot to 1
                let inv = crate::arith::inv_mod(d[i], p);
                for c in d.iter_mut() {
                    *c = *c * inv % p;
                }
                self.rows[i] = self.from_digits(&d);
                self.count += 1;
                return true;
            }
            let pivot_row = self.digits(self.rows[i]);
            let factor = d[i];
            for (c, &pr) in d.iter_mut().zip(&pivot_row) {
                *c = (*c + p * p - factor * pr % p) % p;
            }
        }
        false
    }

    fn dim(&self) -> usize {
        self.count
    }
}

/// Searches GL(b,p) for g with g^-1 A g = B (as element sets).
pub fn find_conjugator(a: &MatrixGroup, b: &MatrixGroup) -> Result<Option<Mat>> {
    if a.dim != b.dim || a.p != b.p || a.order() != b.order() {
        return Ok(None);
    }
    for g in enumerate_gl(a.dim, a.p)? {
        let ginv = g.inverse().expect("GL element");
        if a
            .elements
            .iter()
            .all(|m| b.contains(&ginv.mul(m).mul(&g)))
        {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// field structure on V induced by the span of an irreducible abelian group

/// A field of order p^b living on the points of V: multiplication is
/// transported from the matrix algebra span L(G) through tau: f -> u^f with
/// u the smallest nonzero point.
#[derive(Debug, Clone)]
pub struct FieldOnV {
    pub p: u64,
    pub dim: usize,
    /// The multiplicative identity u of the transported field.
    pub unit: u64,
    exp: Vec<u64>,
    log: Vec<u64>,
}

impl FieldOnV {
    pub fn order(&self) -> u64 {
        self.p.pow(self.dim as u32)
    }

    pub fn mul(&self, x: u64, y: u64) -> u64 {
        if x == 0 || y == 0 {
            return 0;
        }
        let m = self.order() - 1;
        self.exp[((self.log[x as usize] + self.log[y as usize]) % m) as usize]
    }

    /// x^(p^j), the j-th Frobenius power.
    pub fn frobenius(&self, x: u64, j: u32) -> u64 {
        if x == 0 {
            return 0;
        }
        let m = self.order() - 1;
        let pj = crate::arith::pow_mod(self.p % m, j as u64, m);
        self.exp[((self.log[x as usize] as u128 * pj as u128) % m as u128) as usize]
    }
}

/// Result of transporting the span field: the field on points plus the
/// Singer subgroup L(G)^x as matrices.
#[derive(Debug, Clone)]
pub struct FieldSpan {
    pub field: FieldOnV,
    pub span_matrices: Vec<Mat>,
}

/// Computes the linear span L(G) of the group inside Mat(b,p) and, when the
/// span is a field of order p^b, transports its structure to V.
/// Errors distinguish "span not a field" from size mismatches.
pub fn span_field(group: &MatrixGroup) -> Result<FieldSpan> {
    let b = group.dim;
    let p = group.p;
    // basis of the span over GF(p), matrices flattened to length-b^2 vectors
    let mut basis: Vec<Vec<u64>> = Vec::new();
    let reduce = |basis: &Vec<Vec<u64>>, m: &Mat| -> Vec<u64> {
        let mut v = m.entries.clone();
        for row in basis {
            let pivot = row.iter().position(|&x| x != 0).unwrap();
            if v[pivot] != 0 {
                let factor = v[pivot] * crate::arith::inv_mod(row[pivot], p) % p;
                for (x, &r) in v.iter_mut().zip(row) {
                    *x = (*x + p * p - factor * r % p) % p;
                }
            }
        }
        v
    };
    for m in &group.elements {
        let v = reduce(&basis, m);
        if v.iter().any(|&x| x != 0) {
            basis.push(v);
            basis.sort_by_key(|row| row.iter().position(|&x| x != 0).unwrap());
        }
    }
    if basis.len() != b {
        return Err(Error::Precondition(format!(
            "span of the group has dimension {} != {b}; not a field of order p^b",
            basis.len()
        )));
    }
    // enumerate the span: all GF(p)-combinations of the basis
    let mut span: Vec<Mat> = Vec::with_capacity(p.pow(b as u32) as usize);
    let total = p.pow(b as u32);
    for combo in 0..total {
        let mut digits = combo;
        let mut entries = vec![0u64; b * b];
        for row in &basis {
            let c = digits % p;
            digits /= p;
            if c != 0 {
                for (x, &r) in entries.iter_mut().zip(row) {
                    *x = (*x + c * r) % p;
                }
            }
        }
        span.push(Mat {
            dim: b,
            p,
            entries,
        });
    }
    // multiplicative closure and commutativity make the span a field
    let span_set: HashSet<&Mat> = span.iter().collect();
    for a in &span {
        for c in &span {
            let prod = a.mul(c);
            if !span_set.contains(&prod) || prod != c.mul(a) {
                return Err(Error::Precondition("span is not a field".into()));
            }
        }
    }
    // find a generator of the cyclic group span^x
    let m = total - 1;
    let unit = 1u64; // smallest nonzero point
    let gen = span
        .iter()
        .filter(|s| s.inverse().is_some())
        .find(|s| {
            let mut acc = (*s).clone();
            let mut k = 1u64;
            let id = Mat::identity(b, p);
            while acc != id {
                acc = acc.mul(s);
                k += 1;
                if k > m {
                    return false;
                }
            }
            k == m
        })
        .ok_or_else(|| Error::Precondition("span has no multiplicative generator".into()))?;
    let mut exp = Vec::with_capacity(m as usize);
    let mut log = vec![0u64; total as usize];
    let mut acc = Mat::identity(b, p);
    for i in 0..m {
        let pt = acc.apply(unit);
        exp.push(pt);
        log[pt as usize] = i;
        acc = acc.mul(gen);
    }
    // tau must be bijective on nonzero points
    {
        let mut sorted = exp.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != m as usize {
            return Err(Error::Precondition(
                "Singer action is not regular on nonzero points".into(),
            ));
        }
    }
    let nonsingular: Vec<Mat> = span
        .iter()
        .filter(|s| s.inverse().is_some())
        .cloned()
        .collect();
    Ok(FieldSpan {
        field: FieldOnV {
            p,
            dim: b,
            unit,
            exp,
            log,
        },
        span_matrices: nonsingular,
    })
}

/// True iff every given zero-fixing permutation acts as x -> c * x^(p^j)
/// for some nonzero c and some j, i.e. the group lies in the semilinear
/// group of the field structure.
pub fn is_semilinear<'a>(
    perms: impl IntoIterator<Item = &'a Perm>,
    field: &FieldOnV,
) -> bool {
    let n = field.order();
    'elem: for h in perms {
        debug_assert_eq!(h.degree() as u64, n);
        if h.apply(0) != 0 {
            return false;
        }
        let c = h.apply(field.unit as usize) as u64;
        if c == 0 {
            return false;
        }
        // the prime-field degree of the field is dim (V over GF(p))
        for j in 0..field.dim as u32 {
            if (0..n).all(|x| h.apply(x as usize) as u64 == field.mul(c, field.frobenius(x, j))) {
                continue 'elem;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gl23() -> Vec<Mat> {
        enumerate_gl(2, 3).unwrap()
    }

    #[test]
    fn gl_orders_match_formula() {
        assert_eq!(gl_order(2, 2), 6);
        assert_eq!(gl_order(2, 3), 48);
        assert_eq!(gl_order(3, 2), 168);
        assert_eq!(enumerate_gl(2, 2).unwrap().len(), 6);
        assert_eq!(gl23().len(), 48);
        assert_eq!(enumerate_gl(3, 2).unwrap().len(), 168);
    }

    #[test]
    fn inverse_roundtrip() {
        let id = Mat::identity(2, 3);
        for m in gl23() {
            let inv = m.inverse().expect("invertible");
            assert_eq!(m.mul(&inv), id);
            assert_eq!(inv.mul(&m), id);
        }
        let singular = Mat::from_rows(3, &[vec![1, 2], vec![2, 4]]);
        assert!(singular.inverse().is_none());
    }

    #[test]
    fn apply_is_linear_permutation() {
        for m in gl23() {
            let perm = m.to_perm().unwrap();
            assert_eq!(perm.apply(0), 0);
            // additivity on point encodings: (u+v)^m = u^m + v^m
            for u in 0..9u64 {
                for v in 0..9u64 {
                    let sum = |x: u64, y: u64| (x % 3 + y % 3) % 3 + (x / 3 + y / 3) % 3 * 3;
                    assert_eq!(
                        m.apply(sum(u, v)),
                        sum(m.apply(u), m.apply(v))
                    );
                }
            }
        }
    }

    #[test]
    fn generate_closes() {
        // <diag(2,1), swap> in GL(2,3) is dihedral of order 8
        let a = Mat::from_rows(3, &[vec![2, 0], vec![0, 1]]);
        let b = Mat::from_rows(3, &[vec![0, 1], vec![1, 0]]);
        let g = MatrixGroup::generate(2, 3, &[a, b]);
        assert_eq!(g.order(), 8);
        assert!(MatrixGroup::from_elements(2, 3, g.elements.clone()).is_ok());
    }

    #[test]
    fn from_elements_rejects_non_closed() {
        // the unipotent shear has order 3; {I, shear} misses its square
        let bad = vec![
            Mat::identity(2, 3),
            Mat::from_rows(3, &[vec![1, 1], vec![0, 1]]),
        ];
        assert!(matches!(
            MatrixGroup::from_elements(2, 3, bad),
            Err(Error::NotSubgroup)
        ));
    }

    #[test]
    fn closure_of_scalars_is_scalars() {
        // {+-I} in GL(2,3): orbits on V are {0} and the four lines' +- pairs;
        // its closure is again {+-I}
        let minus = Mat::from_rows(3, &[vec![2, 0], vec![0, 2]]);
        let g = MatrixGroup::generate(2, 3, &[minus]);
        assert_eq!(g.order(), 2);
        let c = g.linear_closure().unwrap();
        assert_eq!(c.order(), 2);
        assert_eq!(c.elements, g.elements);
    }

    fn singer_gl23() -> MatrixGroup {
        // companion matrix of t^2 + 2t + 1... need order 8: use t^2 - t - 1
        // i.e. x -> [[0,1],[1,1]] which has order 8 in GL(2,3)
        let s = Mat::from_rows(3, &[vec![0, 1], vec![1, 1]]);
        MatrixGroup::generate(2, 3, &[s])
    }

    #[test]
    fn closure_of_singer_is_full_gl() {
        // a Singer cycle is transitive on the 8 nonzero points, so any
        // invertible matrix preserves its single nontrivial orbit
        let g = singer_gl23();
        assert_eq!(g.order(), 8);
        let c = g.linear_closure().unwrap();
        assert_eq!(c.order(), 48);
    }

    #[test]
    fn closure_matches_gl_scan() {
        // oracle: filter all of GL by the definition directly
        for gens in [
            vec![Mat::from_rows(3, &[vec![2, 0], vec![0, 2]])],
            vec![Mat::from_rows(3, &[vec![0, 1], vec![1, 1]])],
            vec![Mat::from_rows(3, &[vec![1, 1], vec![0, 1]])],
            vec![
                Mat::from_rows(3, &[vec![2, 0], vec![0, 1]]),
                Mat::from_rows(3, &[vec![0, 1], vec![1, 0]]),
            ],
        ] {
            let g = MatrixGroup::generate(2, 3, &gens);
            let labels = g.orbit_labels();
            let mut expected: Vec<Mat> = gl23()
                .into_iter()
                .filter(|h| (0..9u64).all(|v| labels[h.apply(v) as usize] == labels[v as usize]))
                .collect();
            expected.sort_unstable();
            let c = g.linear_closure().unwrap();
            assert_eq!(c.elements, expected, "gens={gens:?}");
        }
    }

    #[test]
    fn closure_is_extensive_and_idempotent() {
        let g = MatrixGroup::generate(2, 3, &[Mat::from_rows(3, &[vec![1, 1], vec![0, 1]])]);
        let c = g.linear_closure().unwrap();
        assert!(g.elements.iter().all(|m| c.contains(m)));
        let cc = c.linear_closure().unwrap();
        assert_eq!(cc.elements, c.elements);
    }

    #[test]
    fn irreducibility() {
        // upper triangular unipotent fixes the line spanned by e_1
        let u = MatrixGroup::generate(2, 3, &[Mat::from_rows(3, &[vec![1, 1], vec![0, 1]])]);
        assert!(!u.is_irreducible());
        assert!(singer_gl23().is_irreducible());
        let gl = MatrixGroup::from_elements(2, 3, gl23()).unwrap();
        assert!(gl.is_irreducible());
    }

    #[test]
    fn conjugator_found_for_conjugate_groups() {
        let a = MatrixGroup::generate(2, 3, &[Mat::from_rows(3, &[vec![1, 1], vec![0, 1]])]);
        let t = Mat::from_rows(3, &[vec![0, 1], vec![1, 0]]);
        let tinv = t.inverse().unwrap();
        let conj: Vec<Mat> = a.elements.iter().map(|m| tinv.mul(m).mul(&t)).collect();
        let b = MatrixGroup::from_elements(2, 3, conj).unwrap();
        let g = find_conjugator(&a, &b).unwrap().expect("conjugate");
        let ginv = g.inverse().unwrap();
        assert!(a.elements.iter().all(|m| b.contains(&ginv.mul(m).mul(&g))));
        // order mismatch short-circuits
        let singer = singer_gl23();
        assert!(find_conjugator(&a, &singer).unwrap().is_none());
    }

    #[test]
    fn span_of_singer_is_field() {
        let fs = span_field(&singer_gl23()).unwrap();
        let f = &fs.field;
        assert_eq!(f.order(), 9);
        assert_eq!(f.unit, 1);
        assert_eq!(fs.span_matrices.len(), 8);
        // field axioms on the transported multiplication
        for x in 0..9u64 {
            assert_eq!(f.mul(x, f.unit), x);
            assert_eq!(f.mul(f.unit, x), x);
            for y in 0..9 {
                assert_eq!(f.mul(x, y), f.mul(y, x));
                for z in 0..9 {
                    assert_eq!(f.mul(f.mul(x, y), z), f.mul(x, f.mul(y, z)));
                }
            }
        }
        // frobenius is a field automorphism of order dividing 2
        for x in 0..9u64 {
            assert_eq!(f.frobenius(f.frobenius(x, 1), 1), x);
            for y in 0..9 {
                assert_eq!(f.frobenius(f.mul(x, y), 1), f.mul(f.frobenius(x, 1), f.frobenius(y, 1)));
            }
        }
    }

    #[test]
    fn span_of_unipotent_is_not_field() {
        let u = MatrixGroup::generate(2, 3, &[Mat::from_rows(3, &[vec![1, 1], vec![0, 1]])]);
        assert!(span_field(&u).is_err());
    }

    #[test]
    fn semilinear_detection() {
        let fs = span_field(&singer_gl23()).unwrap();
        // every scalar multiplication and the Frobenius are semilinear
        let mut perms: Vec<Perm> = fs
            .span_matrices
            .iter()
            .map(|m| m.to_perm().unwrap())
            .collect();
        perms.push(
            Perm::new((0..9).map(|x| fs.field.frobenius(x, 1) as u32).collect()).unwrap(),
        );
        assert!(is_semilinear(&perms, &fs.field));
        // |GammaL_1(9)| = 16 < 48, so GL(2,3) cannot be semilinear
        let gl_perms: Vec<Perm> = gl23().iter().map(|m| m.to_perm().unwrap()).collect();
        assert!(!is_semilinear(&gl_perms, &fs.field));
    }
}
