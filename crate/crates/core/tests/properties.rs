use aqecc::aqecc::{build_ptc, PrivateAqecc, PtcConstruction, RssScheme, TieBreak};
use aqecc::classical::{berlekamp_welch, gao_decode, grs_build, GrsSpec};
use aqecc::css::quantum_grs;
use aqecc::gf::Field;
use aqecc::pauli::{symplectic_form, PauliFrame};
use aqecc::sim::{run_private_trials, wilson_interval, AdversaryModel, Z95};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FIELDS: [(u32, u32); 6] = [(2, 1), (2, 3), (3, 2), (5, 1), (7, 1), (2, 4)];

fn field(i: usize) -> Field {
    let (p, m) = FIELDS[i % FIELDS.len()];
    Field::new(p, m).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(i in 0usize..6, a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let f = field(i);
        let (a, b, c) = (a % f.q(), b % f.q(), c % f.q());
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), 0);
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv_nz(a)), 1);
        } else {
            prop_assert!(f.inv(a).is_none());
        }
        prop_assert_eq!(f.pow(a, f.q() as u64), a);
    }

    #[test]
    fn gao_agrees_with_berlekamp_welch(seed in any::<u64>(), i in 3usize..6, flips in 0usize..6) {
        let f = field(i);
        let n = (f.q() as usize - 1).min(8);
        let k = 2;
        let code = grs_build(&GrsSpec::rs(&f, n, k)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let msg: Vec<u32> = (0..k).map(|_| rand::Rng::gen_range(&mut rng, 0..f.q())).collect();
        let mut w = code.encode(&msg);
        for _ in 0..flips {
            let p = rand::Rng::gen_range(&mut rng, 0..n);
            w[p] = rand::Rng::gen_range(&mut rng, 0..f.q());
        }
        let t = (n - k) / 2;
        prop_assert_eq!(gao_decode(&code, &w, t).unwrap(), berlekamp_welch(&code, &w, t).unwrap());
    }

    #[test]
    fn syndrome_is_linear_and_generators_commute(seed in any::<u64>()) {
        let f = Field::prime(7).unwrap();
        let css = quantum_grs(&f, 6, 4).unwrap();
        let stab = css.stab();
        for g in stab.generators() {
            for h in stab.generators() {
                prop_assert_eq!(symplectic_form(&f, g, h), 0);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut random = || {
            let x = (0..6).map(|_| rand::Rng::gen_range(&mut rng, 0..7)).collect();
            let z = (0..6).map(|_| rand::Rng::gen_range(&mut rng, 0..7)).collect();
            PauliFrame::new(x, z, 1).unwrap()
        };
        let (a, b) = (random(), random());
        let sum: Vec<u32> = stab.syndrome_fq(&a).iter().zip(stab.syndrome_fq(&b)).map(|(&u, v)| f.add(u, v)).collect();
        prop_assert_eq!(stab.syndrome_fq(&a.mul(&f, &b)), sum);
        prop_assert!(stab.syndrome_fq(&PauliFrame::identity(1, 6)).iter().all(|&s| s == 0));
    }

    #[test]
    fn sampled_errors_respect_the_budget(seed in any::<u64>(), budget in 0usize..7) {
        let adv = AdversaryModel::random(budget);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (support, e) = adv.sample_error(7, 1, 6, &mut rng);
        prop_assert_eq!(support.len(), budget.min(6));
        prop_assert!(e.weight() <= budget);
        prop_assert!(e.support().iter().all(|p| support.contains(p)));
    }

    #[test]
    fn wilson_interval_contains_the_rate(trials in 1u64..5000, frac in 0.0f64..=1.0) {
        let failures = (frac * trials as f64).round() as u64;
        let (lo, hi) = wilson_interval(failures, trials, Z95);
        let p = failures as f64 / trials as f64;
        prop_assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0);
    }

    #[test]
    fn rss_honest_shares_reconstruct(seed in any::<u64>(), s in 1usize..4, d in 1usize..3) {
        let f = Field::new(2, 3).unwrap();
        let n = 2 * d + 2;
        let scheme = RssScheme::new(&f, n, s, d).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let secret: Vec<u32> = (0..s).map(|_| rand::Rng::gen_range(&mut rng, 0..8)).collect();
        let shares = scheme.share(&secret, &mut rng).unwrap();
        prop_assert_eq!(scheme.accepted(&shares).len(), n);
        prop_assert_eq!(scheme.reconstruct(&shares).unwrap().ok(), Some(secret));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn trials_are_deterministic_and_classified(master in any::<u64>()) {
        let f = Field::prime(7).unwrap();
        let pa = PrivateAqecc::new(quantum_grs(&f, 6, 5).unwrap(), build_ptc(&f, 2, 4, PtcConstruction::Explicit).unwrap(), 1).unwrap();
        let adv = AdversaryModel::random(1);
        let a = run_private_trials(&pa, &adv, 40, master, TieBreak::LowestIndex).unwrap();
        let b = run_private_trials(&pa, &adv, 40, master, TieBreak::LowestIndex).unwrap();
        prop_assert_eq!(&a, &b);
        let s = &a.summary;
        prop_assert_eq!(s.success + s.miscorrect + s.reject, s.trials);
        prop_assert_eq!(a.failures(), s.miscorrect + s.reject);
    }
}
