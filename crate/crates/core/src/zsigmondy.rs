//! Zsigmondy primes and cyclotomic-polynomial helpers, plus the
//! hypothesis/conclusion predicates tying them to scheme automorphisms.

use crate::arith;
use crate::error::{Error, Result};
use crate::matrix::{self, MatrixGroup};
use crate::perm::Perm;
use crate::scheme::{self, AutGroup, CyclotomicScheme};

/// Z_k(q, n): primes r > k dividing q^n - 1 but no q^i - 1 for 1 <= i < n.
pub fn zsigmondy_primes(q: u64, n: u32, k: u64) -> Result<Vec<u64>> {
    assert!(q >= 2 && n >= 1);
    let m = (q as u128)
        .checked_pow(n)
        .ok_or(Error::Overflow("q^n"))?
        - 1;
    let m = u64::try_from(m).map_err(|_| Error::Overflow("q^n - 1"))?;
    let out: Vec<u64> = arith::distinct_prime_factors(m)
        .into_iter()
        .filter(|&r| r > k && q % r != 0 && arith::mult_order(q % r, r) == n as u64)
        .collect();
    // every Zsigmondy prime is of the form an + 1
    debug_assert!(out.iter().all(|&r| r % n as u64 == 1 % n as u64));
    Ok(out)
}

/// Coefficients of the n-th cyclotomic polynomial, low degree first.
/// Computed as (x^n - 1) / prod of the proper-divisor cyclotomics.
fn cyclotomic_coeffs(n: u32) -> Vec<i128> {
    let mut num = vec![0i128; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in arith::divisors(n as u64) {
        if d == n as u64 {
            continue;
        }
        let phi_d = cyclotomic_coeffs(d as u32);
        // exact polynomial division, leading coefficient 1
        let deg = num.len() - 1 - (phi_d.len() - 1);
        let mut quot = vec![0i128; deg + 1];
        for i in (0..=deg).rev() {
            let c = num[i + phi_d.len() - 1];
            quot[i] = c;
            for (j, &pc) in phi_d.iter().enumerate() {
                num[i + j] -= c * pc;
            }
        }
        debug_assert!(num.iter().all(|&c| c == 0));
        num = quot;
    }
    num
}

/// The homogenized value Phi_n(alpha, beta) = beta^phi(n) * Phi_n(alpha/beta).
pub fn cyclotomic_poly_value(n: u32, alpha: i128, beta: i128) -> Result<i128> {
    assert!(n >= 1);
    let coeffs = cyclotomic_coeffs(n);
    let deg = coeffs.len() - 1;
    let mut acc: i128 = 0;
    for (i, &c) in coeffs.iter().enumerate() {
        let term = alpha
            .checked_pow(i as u32)
            .and_then(|a| beta.checked_pow((deg - i) as u32).and_then(|b| a.checked_mul(b)))
            .and_then(|ab| ab.checked_mul(c))
            .ok_or(Error::Overflow("cyclotomic value"))?;
        acc = acc.checked_add(term).ok_or(Error::Overflow("cyclotomic value"))?;
    }
    Ok(acc)
}

/// P[m]: the greatest prime factor; None for |m| < 2.
pub fn greatest_prime_factor(m: i128) -> Option<u64> {
    let m = m.unsigned_abs();
    if m < 2 || m > u64::MAX as u128 {
        return None;
    }
    arith::distinct_prime_factors(m as u64).last().copied()
}

/// D(m): the number of distinct prime factors.
pub fn distinct_prime_count(m: u64) -> usize {
    arith::distinct_prime_factors(m).len()
}

/// The smallest prime divisor r of the valency with r in Z_{2dn+1}(p, dn),
/// for a nontrivial scheme over a near-field with parameters (p, d, n).
pub fn thm14_hypothesis(c: &CyclotomicScheme) -> Result<Option<u64>> {
    let pair = &c.nearfield.pair;
    let m = c.valency;
    if m >= c.nearfield.order() - 1 {
        // trivial scheme: the statement assumes valency < q^n - 1
        return Ok(None);
    }
    let dn = pair.prime_degree();
    let zs = zsigmondy_primes(pair.p, dn, 2 * dn as u64 + 1)?;
    Ok(arith::distinct_prime_factors(m)
        .into_iter()
        .find(|r| zs.contains(r)))
}

/// Given the hypothesis prime, verifies the conclusion: the scheme is
/// primitive and the stabilizer of 0 in Aut(C) lies in the semilinear group
/// of the field spanned by a cyclic order-r subgroup of the base group.
/// Vacuously true when the hypothesis fails.
pub fn thm14_conclusion_check(c: &CyclotomicScheme) -> Result<bool> {
    let r = match thm14_hypothesis(c)? {
        Some(r) => r,
        None => return Ok(true),
    };
    if !c.scheme.is_primitive() {
        return Ok(false);
    }
    let g = scheme::base_group(&c.nearfield, &c.k)?;
    let cyclic_r = order_r_subgroup(&g, r)?;
    let span = matrix::span_field(&cyclic_r)?;
    if span.field.order() != c.nearfield.order() {
        return Err(Error::Precondition(format!(
            "span of the order-{r} subgroup is not a field on all of V"
        )));
    }
    let aut = match scheme::aut_group(c)? {
        AutGroup::Group(g) => g,
        AutGroup::Symmetric(_) => unreachable!("scheme is nontrivial"),
    };
    let stab = aut.point_stabilizer(0)?;
    let perms: Vec<Perm> = stab
        .elements()
        .ok_or(Error::Precondition("stabilizer too large to enumerate".into()))?
        .to_vec();
    Ok(matrix::is_semilinear(&perms, &span.field))
}

/// A cyclic subgroup of prime order r inside a matrix group.
fn order_r_subgroup(g: &MatrixGroup, r: u64) -> Result<MatrixGroup> {
    let id = matrix::Mat::identity(g.dim, g.p);
    for m in &g.elements {
        // order of m by iteration (group is small)
        let mut acc = m.clone();
        let mut ord = 1u64;
        while acc != id {
            acc = acc.mul(m);
            ord += 1;
        }
        if ord % r == 0 {
            let mut h = m.clone();
            for _ in 1..ord / r {
                h = h.mul(m);
            }
            return Ok(MatrixGroup::generate(g.dim, g.p, &[h]));
        }
    }
    Err(Error::Precondition(format!(
        "base group has no element of order divisible by {r}"
    )))
}
