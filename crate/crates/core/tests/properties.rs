use hatlab_core::bounds::lower_envelope;
use hatlab_core::exact::rational::rational_from_ratio as q;
use hatlab_core::exact::{
    parse_rational, rational_to_string, BigRational, IntPolynomial, RationalFunction,
};
use hatlab_core::game::{
    canonical_form, dual_finite, evaluate_pair, relabel_pair, swap_players, win_polynomial,
    FinitePair, FiniteStrategy, Permutation,
};
use hatlab_core::machine::{
    builtin_machine, derive_closed_form, dual_machine, BlockAction, BlockMachine, Builtin,
    MachineFile, MachinePair,
};
use num_traits::One;
use proptest::prelude::*;

fn poly_strategy() -> impl Strategy<Value = IntPolynomial> {
    prop::collection::vec(-20i64..20, 0..6).prop_map(|c| IntPolynomial::from_i64s(&c))
}

fn nonzero_poly() -> impl Strategy<Value = IntPolynomial> {
    poly_strategy().prop_filter("nonzero", |p| !p.is_zero())
}

fn ratfunc() -> impl Strategy<Value = RationalFunction> {
    (poly_strategy(), nonzero_poly()).prop_map(|(n, d)| RationalFunction::normalize(n, d).unwrap())
}

fn probability() -> impl Strategy<Value = BigRational> {
    (2i64..40).prop_flat_map(|b| (1..b).prop_map(move |a| q(a, b)))
}

fn finite_pair(max_hats: usize) -> impl Strategy<Value = FinitePair> {
    (1..=max_hats).prop_flat_map(|n| {
        let table = prop::collection::vec(1..=n as u8, 1 << n);
        (table.clone(), table).prop_map(move |(a, b)| {
            FinitePair::new(
                FiniteStrategy::new(n, a).unwrap(),
                FiniteStrategy::new(n, b).unwrap(),
            )
            .unwrap()
        })
    })
}

fn machine(m: usize, o: usize) -> impl Strategy<Value = BlockMachine> {
    let action = prop_oneof![
        1 => Just(BlockAction::Recurse),
        3 => (1..=m as u8).prop_map(BlockAction::Commit),
    ];
    prop::collection::vec(action, 1 << m)
        .prop_filter_map("needs a commit", move |t| BlockMachine::new(m, o, t).ok())
}

fn machine_pair() -> impl Strategy<Value = MachinePair> {
    (1usize..=3, 0usize..=1)
        .prop_filter("overlap below block size", |(m, o)| o < m)
        .prop_flat_map(|(m, o)| (machine(m, o), machine(m, o)))
        .prop_map(|(a, b)| MachinePair::new(a, b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalized_functions_evaluate_like_their_quotient(
        n in poly_strategy(), d in nonzero_poly(), x in probability()
    ) {
        let f = RationalFunction::normalize(n.clone(), d.clone()).unwrap();
        let dx = d.eval(&x);
        prop_assume!(dx != BigRational::from_integer(0.into()));
        prop_assert_eq!(f.eval(&x).unwrap(), n.eval(&x) / dx);
    }

    #[test]
    fn field_identities(a in ratfunc(), b in ratfunc(), c in ratfunc()) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        if !b.is_zero() {
            prop_assert_eq!(&(&a / &b) * &b, a.clone());
        }
        prop_assert_eq!(a.reflect().reflect(), a.clone());
        prop_assert_eq!(RationalFunction::parse_exact(&a.to_exact_string()).unwrap(), a);
    }

    #[test]
    fn rationals_round_trip(x in probability()) {
        prop_assert_eq!(parse_rational(&rational_to_string(&x)).unwrap(), x);
    }

    #[test]
    fn win_counts_match_the_polynomial(pair in finite_pair(4), p in probability()) {
        let counts = evaluate_pair(&pair);
        prop_assert_eq!(counts.value_at(&p), win_polynomial(&pair).eval(&p));
        let n = pair.hats() as u32;
        let bounded = counts
            .counts()
            .iter()
            .enumerate()
            .all(|(w, &c)| c <= num_integer::binomial(2 * n as u64, w as u64));
        prop_assert!(bounded);
    }

    #[test]
    fn relabelling_and_swapping_preserve_counts(pair in finite_pair(3), seed in any::<u64>()) {
        let n = pair.hats();
        let perms = Permutation::all(n);
        let s1 = &perms[seed as usize % perms.len()];
        let s2 = &perms[(seed >> 32) as usize % perms.len()];
        let counts = evaluate_pair(&pair);
        prop_assert_eq!(&evaluate_pair(&relabel_pair(&pair, s1, s2).unwrap()), &counts);
        prop_assert_eq!(&evaluate_pair(&swap_players(&pair)), &counts);
        let canon = canonical_form(&pair).unwrap();
        prop_assert_eq!(canonical_form(&relabel_pair(&pair, s1, s2).unwrap()).unwrap(), canon);
    }

    #[test]
    fn finite_dual_identity(pair in finite_pair(4), p in probability()) {
        let dual = FinitePair::new(dual_finite(pair.player1()), dual_finite(pair.player2())).unwrap();
        let one = BigRational::one();
        let want = &p + &p - &one + evaluate_pair(&pair).value_at(&(&one - &p));
        prop_assert_eq!(evaluate_pair(&dual).value_at(&p), want);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn machine_dual_identity(mp in machine_pair()) {
        let v = derive_closed_form(&mp).unwrap().value;
        let d = derive_closed_form(&dual_machine(&mp)).unwrap().value;
        let shift = RationalFunction::from_poly(IntPolynomial::from_i64s(&[-1, 2]));
        prop_assert_eq!(d, &shift + &v.reflect());
        prop_assert_eq!(dual_machine(&dual_machine(&mp)), mp);
    }

    #[test]
    fn machine_files_round_trip(mp in machine_pair()) {
        let text = MachineFile::render(&mp);
        prop_assert_eq!(MachineFile::parse(&text).unwrap(), mp);
    }

    #[test]
    fn closed_forms_are_probabilities(mp in machine_pair(), p in probability()) {
        let v = derive_closed_form(&mp).unwrap().value.eval(&p).unwrap();
        prop_assert!(v >= q(0, 1) && v <= p);
    }
}

#[test]
fn envelope_witnesses_are_duals() {
    let s1 = derive_closed_form(&builtin_machine(Builtin::S1))
        .unwrap()
        .value;
    let s3 = derive_closed_form(&builtin_machine(Builtin::S3))
        .unwrap()
        .value;
    let shift = RationalFunction::from_poly(IntPolynomial::from_i64s(&[1, -2]));
    assert_eq!(&s1 + &shift, s3.reflect());
    for k in 1..50 {
        let p = q(k, 100);
        let one = BigRational::one();
        let mirrored = lower_envelope(&(&one - &p)).unwrap();
        assert_eq!(mirrored.witness, Builtin::S3);
        assert_eq!(
            lower_envelope(&p).unwrap().value + &one - &p - &p,
            mirrored.value
        );
    }
}
