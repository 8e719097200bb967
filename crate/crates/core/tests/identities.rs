use covbound_core::combinatorics::{
    alpha4_binary, alpha4_qary, alpha_nonbinary_scaled, beta_binary, binomial, eta_binary, eta_qary, for_each_alpha4,
    for_each_eta, index_set, intersection_number, krawtchouk, lambda_weighted, lambda_weights,
};
use covbound_core::inequalities::{plain_lower_bound, sphere_covering, van_wee};
use covbound_core::lpbound::{build_lp, solve_lp_exact};
use covbound_core::{BigInt, BigRational, BigUint, OrbitIndex};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn upow(base: u64, exp: u64) -> BigUint {
    BigUint::from(base).pow(exp as u32)
}

fn sphere(q: usize, n: usize, d: usize) -> BigUint {
    binomial(n as u64, d as i64) * upow(q as u64 - 1, d as u64)
}

#[test]
fn beta_column_sums() {
    for n in 0..=8usize {
        for k in 0..=n / 2 {
            for i in 0..=n {
                for j in 0..=n {
                    let total: BigInt = (0..=n).map(|t| beta_binary(n, i, j, k, t)).sum();
                    let expected = if k == 0 {
                        BigInt::from(binomial(n as u64, i as i64) * binomial(n as u64, j as i64))
                    } else {
                        BigInt::zero()
                    };
                    assert_eq!(total, expected, "n={n} i={i} j={j} k={k}");
                }
            }
        }
    }
}

#[test]
fn alpha_column_sums() {
    for q in [3usize, 4] {
        for n in 1..=5usize {
            for k in 0..=n {
                for a in 0..=k {
                    if k > n + a - k {
                        continue;
                    }
                    for i in 0..=n {
                        for j in 0..=n {
                            let mut total = BigInt::zero();
                            for t in 0..=i.min(j) {
                                if i + j > n + t {
                                    continue;
                                }
                                for p in 0..=t {
                                    total += alpha_nonbinary_scaled(q, n, i, j, t, p, a, k);
                                }
                            }
                            let expected = if a == 0 && k == 0 {
                                BigInt::from(sphere(q, n, i) * sphere(q, n, j))
                            } else {
                                BigInt::zero()
                            };
                            assert_eq!(total, expected, "q={q} n={n} i={i} j={j} a={a} k={k}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn eta_partitions_spheres() {
    for (q, nmax) in [(2usize, 5usize), (3, 4), (4, 3)] {
        for n in 1..=nmax {
            for src in index_set(q, n) {
                let mut totals = vec![BigUint::zero(); n + 1];
                for_each_eta(q, n, src, n, |dst, d, count| {
                    assert!(dst.is_member(q, n));
                    assert_eq!(dst.distance(), src.distance());
                    totals[d] += count;
                });
                for (d, total) in totals.iter().enumerate() {
                    assert_eq!(*total, sphere(q, n, d), "q={q} n={n} src={src} d={d}");
                }
            }
        }
    }
}

#[test]
fn alpha4_partitions_spheres() {
    for (q, nmax) in [(2usize, 5usize), (3, 4), (4, 3)] {
        for n in 1..=nmax {
            for src in index_set(q, n) {
                let mut totals = vec![BigUint::zero(); n + 1];
                for_each_alpha4(q, n, src, |dst, d, count| {
                    assert!(dst.is_member(q, n));
                    assert_eq!(dst.i, src.i);
                    totals[d] += count;
                });
                for (d, total) in totals.iter().enumerate() {
                    assert_eq!(*total, sphere(q, n, d), "q={q} n={n} src={src} d={d}");
                }
            }
        }
    }
}

#[test]
fn eta_identity_at_zero_shift() {
    for n in 1..=6 {
        for src in index_set(2, n) {
            assert_eq!(eta_binary(n, src, src, 0), BigUint::one());
        }
    }
    for src in index_set(3, 3) {
        assert_eq!(eta_qary(3, 3, src, src, 0), BigUint::one());
    }
    assert_eq!(eta_binary(5, OrbitIndex::zero(), OrbitIndex::binary(5, 5, 5), 5), BigUint::one());
}

/// Counting `w` two ways: by its class relative to `u` and its distance to
/// `v`, or as a shift of the pair `(u, v)`.
#[test]
fn alpha4_matches_shifted_eta() {
    for n in 1..=5usize {
        for src in index_set(2, n) {
            let (i, j, t) = (src.i as i64, src.j as i64, src.t as i64);
            for j2 in 0..=n as i64 {
                for t2 in 0..=j2.min(i) {
                    for d in 0..=n as i64 {
                        let lhs = alpha4_binary(n, src, j2 as usize, t2 as usize, d as usize);
                        let twice = 2 * (t - t2) + j2 - j + d;
                        let rhs = if twice < 0 || twice % 2 != 0 {
                            BigUint::zero()
                        } else {
                            let dst = OrbitIndex::binary((i + j2 - 2 * t2) as usize, d as usize, (twice / 2) as usize);
                            if dst.is_member(2, n) {
                                eta_binary(n, src, dst, j2 as usize)
                            } else {
                                BigUint::zero()
                            }
                        };
                        assert_eq!(lhs, rhs, "n={n} src={src} j'={j2} t'={t2} d={d}");
                    }
                }
            }
        }
    }
}

#[test]
fn alpha4_contains_u() {
    for n in 1..=5 {
        for src in index_set(2, n) {
            assert!(alpha4_binary(n, src, src.i, src.i, src.distance()) >= BigUint::one());
        }
    }
    for n in 1..=3 {
        for src in index_set(3, n) {
            assert!(alpha4_qary(3, n, src, src.i, src.i, src.i, src.distance()) >= BigUint::one());
        }
    }
}

#[test]
fn lambda_weight_totals() {
    let n = 4;
    let full = sphere_covering(2, n, n).unwrap();
    for src in index_set(2, n) {
        let total: BigRational = lambda_weights(2, n, &full, src).values().cloned().sum();
        assert_eq!(total, BigRational::from_integer(16.into()));
    }
    let s = sphere_covering(2, 3, 1).unwrap();
    assert_eq!(lambda_weighted(2, 3, &s, OrbitIndex::zero(), 0, 0, 0), BigRational::one());
}

#[test]
fn krawtchouk_orthogonality() {
    // Σ_i C(n,i)(q-1)^i P_k(i) P_l(i) = q^n C(n,k)(q-1)^k δ_{kl}
    for q in 2..=4u64 {
        for n in 1..=6u64 {
            for k in 0..=n {
                for l in 0..=n {
                    let total: BigInt = (0..=n)
                        .map(|i| BigInt::from(sphere(q as usize, n as usize, i as usize)) * krawtchouk(q, n, k, i) * krawtchouk(q, n, l, i))
                        .sum();
                    let expected = if k == l {
                        BigInt::from(upow(q, n) * sphere(q as usize, n as usize, k as usize))
                    } else {
                        BigInt::zero()
                    };
                    assert_eq!(total, expected);
                }
            }
        }
    }
}

#[test]
fn intersection_rows_sum_to_spheres() {
    for q in 2..=4u64 {
        for n in 1..=6u64 {
            for k in 0..=n {
                for i in 0..=n {
                    let total: BigUint = (0..=n).map(|j| intersection_number(q, n, k, i, j)).sum();
                    assert_eq!(total, sphere(q as usize, n as usize, i as usize));
                }
            }
        }
    }
}

#[test]
fn sphere_bound_closed_form() {
    for q in 2..=5usize {
        for n in 1..=10usize {
            for r in 0..=n {
                let value = plain_lower_bound(q, n, &sphere_covering(q, n, r).unwrap()).unwrap();
                let ball: BigUint = (0..=r).map(|i| sphere(q, n, i)).sum();
                let expected = BigRational::new(BigInt::from(upow(q as u64, n as u64)), BigInt::from(ball));
                assert_eq!(value, expected);
            }
        }
    }
}

#[test]
fn lp_dominates_plain_bound() {
    for q in 2..=3usize {
        for n in 1..=8usize {
            for r in 1..=3usize.min(n) {
                let mut families = vec![sphere_covering(q, n, r).unwrap()];
                if q == 2 && r < n {
                    families.push(van_wee(n, r).unwrap());
                }
                for ineq in families {
                    let plain = plain_lower_bound(q, n, &ineq).unwrap();
                    let lp = solve_lp_exact(&build_lp(q, n, &ineq).unwrap()).unwrap();
                    assert!(lp.optimum >= plain, "q={q} n={n} r={r}");
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn lp_invariant_under_row_scaling(n in 2usize..6, r in 1usize..3, scale in 1i64..50) {
        let r = r.min(n - 1);
        let ineq = sphere_covering(2, n, r).unwrap();
        let lp = build_lp(2, n, &ineq).unwrap();
        let base = solve_lp_exact(&lp).unwrap().optimum;
        let mut scaled = lp.clone();
        let factor = BigRational::new(scale.into(), 7.into());
        for c in scaled.constraints.iter_mut() {
            c.form = c.form.scaled(&factor);
            c.rhs = &c.rhs * &factor;
        }
        prop_assert_eq!(solve_lp_exact(&scaled).unwrap().optimum, base);
    }

    #[test]
    fn lambda_weights_nonnegative(n in 1usize..6, seed in proptest::collection::vec(0i64..5, 7), beta in 1i64..4) {
        let lambdas: Vec<BigRational> = seed.iter().take(n + 1).map(|&v| BigRational::from_integer(v.into())).collect();
        prop_assume!(lambdas.len() == n + 1);
        let ineq = covbound_core::InequalitySet::new(lambdas, BigRational::from_integer(beta.into()), covbound_core::Provenance::Custom).unwrap();
        for src in index_set(2, n) {
            for w in lambda_weights(2, n, &ineq, src).values() {
                prop_assert!(*w > BigRational::zero());
            }
        }
    }

    #[test]
    fn eta_zero_off_distance(n in 1usize..6, a in 0usize..64, b in 0usize..64, d in 0usize..6) {
        let set = index_set(2, n);
        let src = set[a % set.len()];
        let dst = set[b % set.len()];
        if src.distance() != dst.distance() {
            prop_assert_eq!(eta_binary(n, src, dst, d.min(n)), BigUint::zero());
        }
    }
}
