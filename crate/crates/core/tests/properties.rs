//! Property suites for the ring, function and analysis invariants.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use polycong::analysis::{
    discrepancy, frequency_table, neighborhood, DiscrepancyMode, DEFAULT_TABLE_CELLS,
};
use polycong::functions::{transform_affine, IntMatrix};
use polycong::mring::{arith, substr_int, ArithKind, Residue, RingSpec};
use polycong::pointset::{EnumerationLimits, EnumerationMode, Point, SuffixCondition};
use polycong::{Collection, IntPolynomial};

fn arb_base() -> impl Strategy<Value = u64> {
    prop_oneof![Just(2u64), Just(3), Just(10), Just(16)]
}

fn arb_spec(max_n: usize) -> impl Strategy<Value = RingSpec> {
    (arb_base(), 1..=max_n).prop_map(|(m, n)| RingSpec::new(m, n).unwrap())
}

fn arb_value() -> impl Strategy<Value = BigUint> {
    prop::collection::vec(any::<u32>(), 1..=8).prop_map(BigUint::new)
}

fn arb_kind() -> impl Strategy<Value = ArithKind> {
    prop_oneof![Just(ArithKind::Add), Just(ArithKind::Sub), Just(ArithKind::Mul)]
}

fn oracle_arith(kind: ArithKind, a: &BigUint, b: &BigUint, spec: RingSpec) -> Residue {
    let (a, b) = (BigInt::from(a.clone()), BigInt::from(b.clone()));
    let v = match kind {
        ArithKind::Add => a + b,
        ArithKind::Sub => a - b,
        ArithKind::Mul => a * b,
    };
    spec.reduce(&v)
}

proptest! {
    #[test]
    fn column_arith_agrees_with_integer_oracle(
        spec in arb_spec(64),
        kind in arb_kind(),
        a in arb_value(),
        b in arb_value(),
    ) {
        let ra = spec.reduce_biguint(&a);
        let rb = spec.reduce_biguint(&b);
        let got = arith(kind, &ra, &rb).unwrap();
        prop_assert_eq!(got, oracle_arith(kind, &ra.to_biguint(), &rb.to_biguint(), spec));
    }

    #[test]
    fn substr_composes(spec in arb_spec(48), v in arb_value(), split in any::<u64>()) {
        let x = spec.reduce_biguint(&v);
        let n = spec.n();
        let m = BigUint::from(spec.m());
        prop_assert_eq!(x.substr(n, 0).unwrap(), x.to_biguint());
        for i in 1..=n {
            let j = (split as usize) % i;
            if j >= 1 {
                let rebuilt =
                    x.substr(i, j).unwrap() * m.pow(j as u32) + x.substr(j, 0).unwrap();
                prop_assert_eq!(rebuilt, x.substr(i, 0).unwrap());
            }
        }
    }

    #[test]
    fn carry_and_borrow_stay_small(
        spec in arb_spec(48),
        a in arb_value(),
        b in arb_value(),
        kk in any::<u64>(),
    ) {
        let k = (kk as usize) % spec.n() + 1;
        let n = spec.n();
        let x1 = spec.reduce_biguint(&a);
        let x2 = spec.reduce_biguint(&b);
        let mk = BigInt::from(spec.base_pow(k));

        let y1 = BigInt::from(x1.substr(n, n - k).unwrap());
        let y2 = BigInt::from(x2.substr(n, n - k).unwrap());

        let sum_window = BigInt::from(x1.add(&x2).unwrap().substr(n, n - k).unwrap());
        let carry = (sum_window - (&y1 + &y2)).mod_floor(&mk);
        prop_assert!(carry.is_zero() || carry.is_one(), "carry residue {carry}");

        let diff_window = BigInt::from(x1.sub(&x2).unwrap().substr(n, n - k).unwrap());
        let borrow = (diff_window - (&y1 - &y2)).mod_floor(&mk);
        prop_assert!(
            borrow.is_zero() || borrow == &mk - BigInt::one(),
            "borrow residue {borrow}"
        );
    }

    #[test]
    fn reduce_is_additive(spec in arb_spec(32), u in any::<i128>(), v in any::<i128>()) {
        let sum = spec.reduce(&(BigInt::from(u) + BigInt::from(v)));
        let via_ring = spec.reduce_int(u).add(&spec.reduce_int(v)).unwrap();
        prop_assert_eq!(sum, via_ring);
    }

    #[test]
    fn substr_int_agrees_with_residue_substr(
        spec in arb_spec(32),
        v in arb_value(),
        ij in (any::<u64>(), any::<u64>()),
    ) {
        let x = spec.reduce_biguint(&v);
        let n = spec.n();
        let i = (ij.0 as usize) % n + 1;
        let j = (ij.1 as usize) % i;
        prop_assert_eq!(
            x.substr(i, j).unwrap(),
            substr_int(&x.to_biguint(), spec.m(), i, j).unwrap()
        );
    }
}

fn arb_poly() -> impl Strategy<Value = IntPolynomial> {
    prop::collection::vec(-50i64..=50, 1..=5).prop_map(|cs| IntPolynomial::from_i64s(&cs))
}

proptest! {
    #[test]
    fn horner_matches_unbounded_oracle(
        spec in arb_spec(24),
        f in arb_poly(),
        v in arb_value(),
    ) {
        let x = spec.reduce_biguint(&v);
        let direct = spec.reduce(&f.eval_big(&BigInt::from(x.to_biguint())));
        prop_assert_eq!(f.eval_mod(&x), direct);
    }

    #[test]
    fn evaluation_is_one_lipschitz(
        spec in arb_spec(24),
        f in arb_poly(),
        v in arb_value(),
        cut in any::<u64>(),
    ) {
        // n junior digits of the input determine n junior digits of the output
        let x = spec.reduce_biguint(&v);
        let n_short = (cut as usize) % spec.n() + 1;
        let full_then_cut = f.eval_mod(&x).truncate(n_short).unwrap();
        let cut_then_eval = f.eval_mod(&x.truncate(n_short).unwrap());
        prop_assert_eq!(full_then_cut, cut_then_eval);
    }

    #[test]
    fn iteration_composes(
        f in arb_poly(),
        v in arb_value(),
        i in 0usize..5,
        j in 0usize..5,
    ) {
        let spec = RingSpec::new(2, 16).unwrap();
        let x = spec.reduce_biguint(&v);
        let joined = f.iterate_mod(&x, i + j);
        let split = f.iterate_mod(&f.iterate_mod(&x, i), j);
        prop_assert_eq!(joined, split);
    }

    #[test]
    fn affine_transform_evaluates_pointwise(
        entries in prop::collection::vec(-3i64..=3, 4),
        shift in prop::collection::vec(-5i64..=5, 2),
        v in arb_value(),
    ) {
        let spec = RingSpec::new(3, 8).unwrap();
        let a = IntMatrix::new(2, entries.iter().map(|&e| BigInt::from(e)).collect()).unwrap();
        let shift: Vec<BigInt> = shift.into_iter().map(BigInt::from).collect();
        let c = Collection::monomials(2).unwrap();
        let transformed = transform_affine(&a, &shift, &c).unwrap();

        let x = spec.reduce_biguint(&v);
        let base: Vec<BigInt> = c
            .prepare(spec)
            .eval(&x)
            .iter()
            .map(|r| BigInt::from(r.to_biguint()))
            .collect();
        let expect: Vec<Residue> = a
            .mul_vec(&base)
            .unwrap()
            .iter()
            .zip(&shift)
            .map(|(acc, z)| spec.reduce(&(acc + z)))
            .collect();
        prop_assert_eq!(transformed.prepare(spec).eval(&x), expect);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn frequencies_sum_to_one_with_any_suffix(
        m in prop_oneof![Just(2u64), Just(3)],
        f in arb_poly(),
        k in 1usize..=2,
        d in 0usize..=2,
        beta_pick in any::<u64>(),
    ) {
        let n = k + d + 2;
        let spec = RingSpec::new(m, n).unwrap();
        let c = Collection::iterations(f, 2).unwrap();
        let cond = if d == 0 {
            None
        } else {
            let md = spec.base_pow(d);
            let beta = BigUint::from(beta_pick) % md;
            Some(SuffixCondition::new(d, beta).unwrap())
        };
        let table = frequency_table(
            spec,
            &c,
            k,
            cond,
            EnumerationMode::Exhaustive,
            EnumerationLimits::default(),
            DEFAULT_TABLE_CELLS,
            1,
        )
        .unwrap();
        let sum = table
            .reports()
            .map(|r| r.frequency)
            .fold(BigRational::zero(), |a, b| a + b);
        prop_assert_eq!(sum, BigRational::one());
    }

    #[test]
    fn identity_first_coordinate_marginal_is_exact(
        m in prop_oneof![Just(2u64), Just(3)],
        f in arb_poly(),
        k in 1usize..=2,
        extra in 0usize..=2,
        a1 in any::<u64>(),
    ) {
        // a collection whose first entry is x has exact m^(−k) marginals
        let n = k + extra + 1;
        let spec = RingSpec::new(m, n).unwrap();
        let c = Collection::iterations(f, 2).unwrap(); // first entry is x
        let table = frequency_table(
            spec,
            &c,
            k,
            None,
            EnumerationMode::Exhaustive,
            EnumerationLimits::default(),
            DEFAULT_TABLE_CELLS,
            1,
        )
        .unwrap();
        let g = spec
            .base_pow_u128(k)
            .expect("small k");
        let a1 = (a1 as u128) % g;
        let marginal: u64 = table
            .reports()
            .filter(|r| r.cube.corner()[0] == a1)
            .map(|r| r.hits)
            .sum();
        let freq = BigRational::new(BigInt::from(marginal), BigInt::from(table.total()));
        prop_assert_eq!(freq, BigRational::new(BigInt::one(), BigInt::from(g)));
    }

    #[test]
    fn neighborhood_membership_is_symmetric(
        m in prop_oneof![Just(2u64), Just(3), Just(5)],
        big_k in 1usize..=3,
        picks in prop::collection::vec(any::<u64>(), 2),
    ) {
        let g = (m as u128).pow(big_k as u32);
        let b = vec![picks[0] as u128 % g];
        let c = vec![picks[1] as u128 % g];
        let b_in_c = neighborhood(&c, big_k, m).unwrap().contains(&b);
        let c_in_b = neighborhood(&b, big_k, m).unwrap().contains(&c);
        prop_assert_eq!(b_in_c, c_in_b);
    }

    #[test]
    fn window_sums_land_in_the_window_neighborhood(
        spec in arb_spec(24),
        a in arb_value(),
        b in arb_value(),
        kk in any::<u64>(),
    ) {
        // the one-dimensional carry corollary
        let k = (kk as usize) % spec.n().min(8) + 1;
        let n = spec.n();
        let x1 = spec.reduce_biguint(&a);
        let x2 = spec.reduce_biguint(&b);
        let mk = spec.base_pow(k);
        let y_sum = (x1.substr(n, n - k).unwrap() + x2.substr(n, n - k).unwrap()) % &mk;
        let w = x1.add(&x2).unwrap().substr(n, n - k).unwrap();
        let w: u128 = u128::try_from(&w).unwrap();
        let y: u128 = u128::try_from(&y_sum).unwrap();
        let hood = neighborhood(&[w], k, spec.m()).unwrap();
        prop_assert!(hood.contains(&vec![y]));
    }

    #[test]
    fn weyl_magnitude_is_normalized(
        m in prop_oneof![Just(2u64), Just(3)],
        f in arb_poly(),
        h in prop::collection::vec(-20i64..=20, 2),
    ) {
        let spec = RingSpec::new(m, 6).unwrap();
        let c = Collection::iterations(f, 2).unwrap();
        let h: Vec<BigInt> = h.into_iter().map(BigInt::from).collect();
        let r = polycong::analysis::weyl_sum(
            spec,
            &c,
            &h,
            None,
            EnumerationMode::Exhaustive,
            EnumerationLimits::default(),
            1,
        )
        .unwrap();
        prop_assert!(r.magnitude <= 1.0 + 1e-9, "magnitude {}", r.magnitude);
    }

    #[test]
    fn exact_discrepancy_matches_grid_on_grid_points(
        numerators in prop::collection::vec((any::<u64>(), any::<u64>()), 1..=12),
        n in 1usize..=4,
    ) {
        // any multiset with denominator m^n: corner-exact equals grid at k=n
        let spec = RingSpec::new(2, n).unwrap();
        let modulus = 1u64 << n;
        let pts: Vec<Point> = numerators
            .iter()
            .map(|&(a, b)| {
                Point::new(vec![
                    spec.reduce_int((a % modulus) as i128),
                    spec.reduce_int((b % modulus) as i128),
                ])
                .unwrap()
            })
            .collect();
        let exact = discrepancy(&pts, DiscrepancyMode::Exact, DEFAULT_TABLE_CELLS).unwrap();
        let grid = discrepancy(&pts, DiscrepancyMode::Grid { k: n }, DEFAULT_TABLE_CELLS).unwrap();
        prop_assert_eq!(exact.value, grid.value);
    }
}
