//! Acceptance suite: twelve exact criteria checked against independent
//! oracles, with pinned wall-clock budgets. Each criterion prints a single
//! pass/fail line (visible with `cargo test --test acceptance -- --nocapture`).

use nearcyc_core::arith;
use nearcyc_core::census::{run_census, CensusOptions};
use nearcyc_core::matrix::{self, MatrixGroup};
use nearcyc_core::nearfield::{
    classify_variants, count_dickson_nearfields, verify_nearfield_axioms, DicksonNearField,
    DicksonPair,
};
use nearcyc_core::perm::{Perm, PermGroup};
use nearcyc_core::scheme::{self, AutGroup, CyclotomicScheme, SchemeCheck};
use nearcyc_core::zsigmondy;
use nearcyc_core::Elt;
use rayon::prelude::*;
use std::time::{Duration, Instant};

// ---------------------------------------------------------------------------
// reporting

fn report(id: u32, name: &str, start: Instant, budget: Duration, ok: bool) {
    let elapsed = start.elapsed();
    let in_budget = elapsed <= budget;
    println!(
        "criterion {id:2} ({name}): {} [{elapsed:.2?}, budget {budget:?}]",
        if ok && in_budget { "pass" } else { "FAIL" }
    );
    assert!(ok, "criterion {id} ({name}): check failed");
    assert!(
        in_budget,
        "criterion {id} ({name}): over budget ({elapsed:?} > {budget:?})"
    );
}

// ---------------------------------------------------------------------------
// shared enumeration helpers

/// All Dickson pairs (q, n) with q^n <= max_order, ascending in (q^n, q).
fn dickson_pairs(max_order: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for q in 2..=max_order {
        if arith::prime_power(q).is_none() {
            continue;
        }
        let mut n = 1u32;
        while q.checked_pow(n).is_some_and(|o| o <= max_order) {
            if DicksonPair::is_valid(q, n).unwrap() {
                out.push((q, n));
            }
            n += 1;
        }
    }
    out.sort_by_key(|&(q, n)| (q.pow(n), q));
    out
}

/// Every multiplicative subgroup of the near-field, as sorted element lists.
fn subgroups_of(nf: &DicksonNearField) -> Vec<Vec<Elt>> {
    let mg = nf.mult_group().unwrap();
    mg.subgroups()
        .into_iter()
        .map(|s| s.iter().map(|&i| mg.elements[i]).collect())
        .collect()
}

/// All schemes Cyc(K, NF) with q^n <= max_order, over every pair, variant
/// and subgroup, in the deterministic census order.
fn all_schemes(max_order: u64) -> Vec<CyclotomicScheme> {
    let mut out = Vec::new();
    for (q, n) in dickson_pairs(max_order) {
        for variant in 0..count_dickson_nearfields(q, n).unwrap() as usize {
            let nf = DicksonNearField::new(q, n, variant).unwrap();
            for k in subgroups_of(&nf) {
                out.push(scheme::build_cyclotomic(&nf, &k).unwrap());
            }
        }
    }
    out
}

fn schemes_at_order(order: u64) -> Vec<CyclotomicScheme> {
    all_schemes(order)
        .into_iter()
        .filter(|c| c.scheme.n as u64 == order)
        .collect()
}

/// True iff the zero-fixing permutation is additive on the underlying field
/// (equivalently GF(p)-linear, since prime-field scalars are repeated sums).
fn is_additive(g: &Perm, c: &CyclotomicScheme) -> bool {
    let f = &c.nearfield.field;
    let n = c.scheme.n as u64;
    (0..n).all(|x| {
        (x..n).all(|y| g.apply(f.add(x, y) as usize) as u64
            == f.add(g.apply(x as usize) as u64, g.apply(y as usize) as u64))
    })
}

fn aut_perm_group(c: &CyclotomicScheme) -> PermGroup {
    match scheme::aut_group(c).unwrap() {
        AutGroup::Group(g) => g,
        AutGroup::Symmetric(_) => panic!("expected a nontrivial scheme"),
    }
}

// ---------------------------------------------------------------------------
// criteria

/// Near-field axioms hold exhaustively for every pair with q^n <= 343 and
/// every variant.
#[test]
fn criterion_01_nearfield_axioms() {
    let start = Instant::now();
    let tasks: Vec<(u64, u32, usize)> = dickson_pairs(343)
        .into_iter()
        .flat_map(|(q, n)| {
            (0..count_dickson_nearfields(q, n).unwrap() as usize).map(move |v| (q, n, v))
        })
        .collect();
    assert!(tasks.iter().any(|&(q, n, _)| (q, n) == (7, 3)), "343 included");
    let ok = tasks.par_iter().all(|&(q, n, v)| {
        let nf = DicksonNearField::new(q, n, v).unwrap();
        verify_nearfield_axioms(&nf).unwrap().all_pass()
    });
    report(1, "near-field axioms to order 343", start, Duration::from_secs(10), ok);
}

/// Brute-force isomorphism classification of the variants matches the
/// counting formula at orders 9, 25, 49, 121 and 625.
#[test]
fn criterion_02_isomorphism_class_count() {
    let start = Instant::now();
    let orders = [9u64, 25, 49, 121, 625];
    let pairs: Vec<(u64, u32)> = dickson_pairs(625)
        .into_iter()
        .filter(|&(q, n)| orders.contains(&q.pow(n)))
        .collect();
    // the interesting case: two variants at (5, 4), genuinely nonisomorphic
    assert!(pairs.contains(&(5, 4)));
    let ok = pairs.par_iter().all(|&(q, n)| {
        let classes = classify_variants(q, n).unwrap();
        classes.len() as u64 == count_dickson_nearfields(q, n).unwrap()
    });
    report(2, "variant classification 9..625", start, Duration::from_secs(60), ok);
}

/// The multiplicative group of the order-9 near-field is the quaternion
/// group Q8: nonabelian, one involution, six elements of order 4.
#[test]
fn criterion_03_order_9_is_q8() {
    let start = Instant::now();
    let nf = DicksonNearField::new(3, 2, 0).unwrap();
    let mg = nf.mult_group().unwrap();
    let orders: Vec<u64> = (0..mg.order()).map(|i| mg.element_order(i)).collect();
    let count = |o: u64| orders.iter().filter(|&&x| x == o).count();
    let ok = !mg.is_abelian()
        && mg.order() == 8
        && count(1) == 1
        && count(2) == 1
        && count(4) == 6;
    report(3, "order-9 mult group is Q8", start, Duration::from_secs(1), ok);
}

/// Every Cyc(K, NF) with q^n <= 121 passes the full intersection-number scan.
#[test]
fn criterion_04_scheme_axioms() {
    let start = Instant::now();
    let ok = all_schemes(121).par_iter().all(|c| {
        matches!(c.scheme.verify_scheme_axioms().unwrap(), SchemeCheck::Valid(_))
    });
    report(4, "scheme axioms to order 121", start, Duration::from_secs(30), ok);
}

/// Primitivity of the scheme is equivalent to irreducibility of its base
/// group, on every instance up to order 121.
#[test]
fn criterion_05_primitivity_iff_irreducible() {
    let start = Instant::now();
    let ok = all_schemes(121).par_iter().all(|c| {
        let g = scheme::base_group(&c.nearfield, &c.k).unwrap();
        c.scheme.is_primitive() == g.is_irreducible()
    });
    report(5, "primitive <=> irreducible to 121", start, Duration::from_secs(60), ok);
}

/// Every automorphism fixing 0 is GF(p)-linear: full 9!-scan at order 9,
/// backtracking oracle at orders 25, 49, 121, 169. Nontrivial schemes only
/// (the trivial scheme has Aut = Sym(V)).
#[test]
fn criterion_06_aut_inside_agl() {
    let start = Instant::now();

    // order 9: enumerate all of Sym(9) with Heap's algorithm
    let small: Vec<CyclotomicScheme> = schemes_at_order(9)
        .into_iter()
        .filter(|c| !c.scheme.is_trivial())
        .collect();
    let mut counts = vec![0u64; small.len()];
    let mut ok = true;
    let scan = |a: &[usize], counts: &mut [u64], ok: &mut bool| {
        let perm = Perm::new(a.iter().map(|&x| x as u32).collect()).unwrap();
        for (ci, c) in small.iter().enumerate() {
            let preserves = (0..9).all(|x| {
                (0..9).all(|y| {
                    c.scheme.color(perm.apply(x), perm.apply(y)) == c.scheme.color(x, y)
                })
            });
            if preserves {
                counts[ci] += 1;
                if perm.apply(0) == 0 && !is_additive(&perm, c) {
                    *ok = false;
                }
            }
        }
    };
    // Heap's algorithm: emit each of the 9! arrangements exactly once
    let mut a: Vec<usize> = (0..9).collect();
    let mut stack = [0usize; 9];
    scan(&a, &mut counts, &mut ok);
    let mut i = 0;
    while i < 9 {
        if stack[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(stack[i], i);
            }
            scan(&a, &mut counts, &mut ok);
            stack[i] += 1;
            i = 0;
        } else {
            stack[i] = 0;
            i += 1;
        }
    }
    // the scan must find exactly the group the backtracking oracle reports
    for (ci, c) in small.iter().enumerate() {
        ok &= counts[ci] == scheme::aut_bruteforce(&c.scheme).unwrap().order();
    }

    // orders 25, 49, 121, 169: backtracking oracle, all elements inspected
    let big: Vec<CyclotomicScheme> = [25u64, 49, 121, 169]
        .into_iter()
        .flat_map(schemes_at_order)
        .filter(|c| !c.scheme.is_trivial())
        .collect();
    let big_ok = big.par_iter().all(|c| {
        let aut = scheme::aut_bruteforce(&c.scheme).unwrap();
        let elements = aut.elements().expect("oracle group within element bound");
        elements
            .iter()
            .filter(|g| g.apply(0) == 0)
            .all(|g| is_additive(g, c))
    });
    report(6, "Aut <= AGL at 9..169", start, Duration::from_secs(600), ok && big_ok);
}

/// The theorem-path group T.Gbar equals the brute-force color-automorphism
/// group elementwise for every nontrivial scheme up to order 121.
#[test]
fn criterion_07_aut_equals_t_gbar() {
    let start = Instant::now();
    let ok = all_schemes(121)
        .into_par_iter()
        .filter(|c| !c.scheme.is_trivial())
        .all(|c| {
            let theorem_path = aut_perm_group(&c);
            let oracle = scheme::aut_bruteforce(&c.scheme).unwrap();
            theorem_path.same_group(&oracle)
        });
    report(7, "Aut = T.Gbar to order 121", start, Duration::from_secs(600), ok);
}

/// Imprimitive schemes: Aut is Frobenius with kernel the translation group T
/// and |Aut| = N * |K|. Primitive schemes: T is the unique minimal normal
/// subgroup (the socle) wherever |Aut| <= 10^6.
#[test]
fn criterion_08_frobenius_and_socle() {
    let start = Instant::now();
    let ok = all_schemes(121)
        .into_par_iter()
        .filter(|c| !c.scheme.is_trivial())
        .all(|c| {
            let aut = aut_perm_group(&c);
            let n = c.scheme.n;
            let f = &c.nearfield.field;
            let t = PermGroup::from_generators_degree(
                (0..c.nearfield.pair.prime_degree())
                    .map(|j| {
                        let e = c.nearfield.pair.p.pow(j);
                        Perm::new((0..n).map(|x| f.add(x as u64, e) as u32).collect()).unwrap()
                    })
                    .collect(),
                Some(n),
            )
            .unwrap();
            if c.scheme.is_primitive() {
                if aut.order() > 1_000_000 {
                    return true; // outside the pinned socle bound
                }
                let minimals = aut.minimal_normal_subgroups().unwrap();
                minimals.len() == 1
                    && minimals[0].same_group(&t)
                    && aut.socle().unwrap().same_group(&t)
            } else {
                let (frob, kernel) = aut.is_frobenius().unwrap();
                frob
                    && kernel.map(|ker| ker.same_group(&t)).unwrap_or(false)
                    && aut.order() == n as u64 * c.valency
            }
        });
    report(8, "Frobenius kernel / socle to 121", start, Duration::from_secs(600), ok);
}

/// Every primitive scheme with abelian base group at q^n <= 121 is a
/// cyclotomic scheme over a field with an identical color matrix.
#[test]
fn criterion_09_field_reduction() {
    let start = Instant::now();
    let ok = all_schemes(121)
        .into_par_iter()
        .filter(|c| {
            !c.scheme.is_trivial()
                && c.scheme.is_primitive()
                && scheme::base_group(&c.nearfield, &c.k).unwrap().is_abelian()
        })
        .all(|c| {
            let red = scheme::abelian_field_reduction(&c).unwrap();
            red.scheme.colors == c.scheme.colors && red.k_image.len() == c.k.len()
        });
    report(9, "field reduction to order 121", start, Duration::from_secs(120), ok);
}

/// At the order-169 near-field (q = 13, n = 2): for every subgroup K with
/// 7 | |K| and |K| < 168, the scheme is primitive and the stabilizer of 0 in
/// Aut(C) is semilinear over the field spanned by the order-7 subgroup of
/// the base group.
#[test]
fn criterion_10_semilinear_stabilizers_at_169() {
    let start = Instant::now();
    let nf = DicksonNearField::new(13, 2, 0).unwrap();
    let subs: Vec<Vec<Elt>> = subgroups_of(&nf)
        .into_iter()
        .filter(|k| k.len() % 7 == 0 && k.len() < 168)
        .collect();
    assert!(!subs.is_empty(), "(13,2) has subgroups of order divisible by 7");
    let ok = subs.par_iter().all(|k| {
        let c = scheme::build_cyclotomic(&nf, k).unwrap();
        if !c.scheme.is_primitive() {
            return false;
        }
        let base = scheme::base_group(&c.nearfield, &c.k).unwrap();
        // the cyclic order-7 subgroup of the base group spans a field on V
        let gen7 = base
            .elements
            .iter()
            .find(|m| {
                let mut pw = (*m).clone();
                let mut o = 1u32;
                while pw != matrix::Mat::identity(base.dim, base.p) {
                    pw = pw.mul(m);
                    o += 1;
                }
                o == 7
            })
            .expect("element of order 7 in the base group");
        let cyclic7 = MatrixGroup::generate(base.dim, base.p, &[gen7.clone()]);
        let span = matrix::span_field(&cyclic7).unwrap();
        let stab = aut_perm_group(&c).point_stabilizer(0).unwrap();
        let elements = stab.elements().expect("stabilizer within element bound");
        matrix::is_semilinear(elements.iter(), &span.field)
            && zsigmondy::thm14_conclusion_check(&c).unwrap()
    });
    report(10, "semilinear stabilizers at (13,2)", start, Duration::from_secs(900), ok);
}

/// Zsigmondy primes exist for every q^n <= 2^16 with n >= 2 except (2,6) and
/// n = 2 with q + 1 a power of two; every Zsigmondy prime is 1 mod n.
#[test]
fn criterion_11_zsigmondy_suite() {
    let start = Instant::now();
    let mut tasks: Vec<(u64, u32)> = Vec::new();
    for q in 2u64..=65536 {
        if arith::prime_power(q).is_none() {
            continue;
        }
        let mut n = 2u32;
        while q.checked_pow(n).is_some_and(|o| o <= 65536) {
            tasks.push((q, n));
            n += 1;
        }
    }
    let ok = tasks.par_iter().all(|&(q, n)| {
        let primes = zsigmondy::zsigmondy_primes(q, n, 0).unwrap();
        let exceptional = (q, n) == (2, 6) || (n == 2 && (q + 1).is_power_of_two());
        primes.is_empty() == exceptional && primes.iter().all(|&r| r % n as u64 == 1)
    });
    report(11, "Zsigmondy suite to 2^16", start, Duration::from_secs(60), ok);
}

/// Two full census runs at max_order 121 produce byte-identical reports with
/// zero failures.
#[test]
fn criterion_12_census_determinism() {
    let start = Instant::now();
    let opts = CensusOptions::new(121);
    let a = run_census(&opts).unwrap();
    let b = run_census(&opts).unwrap();
    let ok = a.to_json() == b.to_json()
        && a.to_csv() == b.to_csv()
        && a.summary.failures == 0
        && a.summary.errors == 0
        && a.summary.records > 0;
    report(12, "census determinism at 121", start, Duration::from_secs(1200), ok);
}
