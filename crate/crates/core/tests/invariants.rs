//! Property tests over randomly generated observables, states and problems.

mod common;

use nalgebra::DVector;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use povm_order::catalog::{parse_catalog_str, Catalog};
use povm_order::constructors::{
    binomial_efficiency_kernel, covariance_residual, covariant_rank_one, cyclic_convolve,
    localization_structure_report, make_cyclic_position, make_number_observable, make_photon_counting,
    make_yes_no, smear_cyclic, yes_no_dominating_effect, yes_no_is_fuzzy_optimal,
};
use povm_order::determination::{
    default_probes, is_determined, Certification, DeterminationStatus,
};
use povm_order::lp::{compose_kernels, encode_fuzzy_instance, solve_feasibility, LpProblem, LpStatus};
use povm_order::operator::affinity_check;
use povm_order::relations::{
    check_hierarchy, is_trivial, leq_fuzzy, leq_informational, Certificate, Comparator, RelationKind,
};
use povm_order::{
    sample, statistics_map, DensityState, DiscreteObservable, Effect, HermitianOperator, ProbabilityVector, C64,
};

use common::{is_stochastic, is_valid_state, kernel_residual, linf, naive_stats};

const LP: f64 = 1e-8;
const PROB: f64 = 1e-9;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn observable(r: &mut ChaCha8Rng, d: usize) -> DiscreteObservable {
    let n = r.random_range(d..=d + 3);
    let rank = r.random_range(1..=d);
    sample::observable_with_rank(r, d, n, rank)
}

/// Projection-valued observable from a random orthonormal basis grouped into
/// consecutive blocks of the given sizes.
fn sharp(r: &mut ChaCha8Rng, blocks: &[usize]) -> (DiscreteObservable, Vec<DVector<C64>>) {
    let d: usize = blocks.iter().sum();
    let u = sample::unitary(r, d);
    let cols: Vec<DVector<C64>> = (0..d).map(|i| u.column(i).into_owned()).collect();
    let mut start = 0;
    let mut effects = Vec::new();
    for &b in blocks {
        let p = (start..start + b).fold(HermitianOperator::zero(d), |acc, i| acc.add(&HermitianOperator::outer(&cols[i])));
        effects.push(Effect::new(p).unwrap());
        start += b;
    }
    (DiscreteObservable::new(effects).unwrap(), cols)
}

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(cfg(48))]

    #[test]
    fn statistics_are_probabilities(seed in any::<u64>(), d in 1usize..=4) {
        let mut r = rng(seed);
        let e = observable(&mut r, d);
        let t = sample::mixed_state(&mut r, d);
        let p = statistics_map(&e, &t).unwrap();
        prop_assert!((p.as_slice().iter().sum::<f64>() - 1.0).abs() <= PROB);
        prop_assert!(p.as_slice().iter().all(|&x| x >= -PROB));
        prop_assert!(linf(p.as_slice(), &naive_stats(&e, &t)) <= 1e-12);
    }

    #[test]
    fn statistics_are_affine(seed in any::<u64>(), d in 1usize..=4, lambda in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let e = observable(&mut r, d);
        let (t1, t2) = (sample::mixed_state(&mut r, d), sample::pure_state(&mut r, d));
        prop_assert!(affinity_check(&e, &t1, &t2, lambda).unwrap());
    }

    #[test]
    fn unnormalized_observables_rejected(seed in any::<u64>(), d in 1usize..=4, c in 0.5f64..0.98) {
        let mut r = rng(seed);
        let e = observable(&mut r, d);
        let scaled: Vec<Effect> = e.effects().iter().map(|x| Effect::new(x.op().scale(c)).unwrap()).collect();
        prop_assert!(DiscreteObservable::new(scaled).is_err());
    }

    #[test]
    fn effect_norms_bounded(seed in any::<u64>(), d in 1usize..=5) {
        let mut r = rng(seed);
        let a = sample::effect(&mut r, d);
        prop_assert!(a.op().operator_norm() <= 1.0 + 1e-9);
        prop_assert!(a.complement().op().operator_norm() <= 1.0 + 1e-9);
    }

    #[test]
    fn lp_witnesses_satisfy_constraints(seed in any::<u64>(), n in 1usize..8, m in 1usize..8, plant in any::<bool>()) {
        let mut r = rng(seed);
        let bounds: Vec<(f64, f64)> = (0..n).map(|_| { let lo = r.random_range(-2.0..1.0); (lo, lo + r.random_range(0.0..3.0)) }).collect();
        let x0: Vec<f64> = bounds.iter().map(|&(lo, hi)| r.random_range(lo..=hi)).collect();
        let constraints = (0..m).map(|_| {
            let a: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
            let b = if plant { a.iter().zip(&x0).map(|(x, y)| x * y).sum() } else { r.random_range(-2.0..2.0) };
            (a, b)
        }).collect();
        let p = LpProblem::new(n, constraints, bounds).unwrap();
        let out = solve_feasibility(&p).unwrap();
        if plant {
            prop_assert_eq!(out.status, LpStatus::Feasible);
        }
        match out.status {
            LpStatus::Feasible => {
                prop_assert!(p.max_violation(out.witness.as_ref().unwrap()) <= LP);
                prop_assert!(out.phase_one_objective <= LP);
            }
            LpStatus::Infeasible => {
                prop_assert!(out.witness.is_none());
                prop_assert!(out.phase_one_objective > LP);
            }
        }
    }

    #[test]
    fn fuzzy_relabeling_symmetry(seed in any::<u64>(), d in 2usize..=3) {
        let mut r = rng(seed);
        let e = observable(&mut r, d);
        let m = r.random_range(2..=4);
        let f = sample::stochastic_kernel(&mut r, e.outcomes(), m).apply(&e).unwrap();
        let mut perm: Vec<usize> = (0..m).collect();
        for i in (1..m).rev() { perm.swap(i, r.random_range(0..=i)); }
        let g = f.permuted(&perm).unwrap();
        let vf = leq_fuzzy(&f, &e).unwrap();
        let vg = leq_fuzzy(&g, &e).unwrap();
        prop_assert_eq!(vf.holds, vg.holds);
        let nu = vf.kernel().unwrap().to_rows();
        let mapped: Vec<Vec<f64>> = nu.iter().map(|row| perm.iter().map(|&p| row[p]).collect()).collect();
        prop_assert!(kernel_residual(&mapped, &g, &e) <= LP);
        // Independent random pair: status still invariant under relabeling.
        let h = observable(&mut r, d);
        let hp = h.permuted(&(0..h.outcomes()).rev().collect::<Vec<_>>()).unwrap();
        prop_assert_eq!(leq_fuzzy(&h, &e).unwrap().holds, leq_fuzzy(&hp, &e).unwrap().holds);
        prop_assert_eq!(encode_fuzzy_instance(&h, &e).unwrap().num_vars, encode_fuzzy_instance(&hp, &e).unwrap().num_vars);
    }

    #[test]
    fn kernel_composition(seed in any::<u64>(), a in 1usize..5, b in 1usize..5, c in 1usize..5, dd in 1usize..5) {
        let mut r = rng(seed);
        let k1 = sample::stochastic_kernel(&mut r, b, a);
        let k2 = sample::stochastic_kernel(&mut r, c, b);
        let k3 = sample::stochastic_kernel(&mut r, dd, c);
        let k12 = compose_kernels(&k1, &k2).unwrap();
        prop_assert!(is_stochastic(&k12.to_rows(), 2.0 * LP));
        let left = compose_kernels(&k12, &k3).unwrap();
        let right = compose_kernels(&k1, &compose_kernels(&k2, &k3).unwrap()).unwrap();
        prop_assert!(left.max_abs_diff(&right) <= 4.0 * LP);
    }
}

proptest! {
    #![proptest_config(cfg(24))]

    #[test]
    fn relations_are_reflexive(seed in any::<u64>(), d in 1usize..=3) {
        let mut r = rng(seed);
        let e = observable(&mut r, d);
        let probes = default_probes(std::slice::from_ref(&e)).unwrap();
        for kind in RelationKind::ALL {
            prop_assert!(Comparator::default().leq(&e, &e, kind, Some(&probes)).unwrap().holds, "{:?}", kind);
        }
    }

    #[test]
    fn hierarchy_and_certificates(seed in any::<u64>(), d in 2usize..=3, fuzzy_pair in any::<bool>()) {
        let mut r = rng(seed);
        let e = observable(&mut r, d);
        let f = if fuzzy_pair {
            let m = r.random_range(1..=4);
            sample::stochastic_kernel(&mut r, e.outcomes(), m).apply(&e).unwrap()
        } else {
            observable(&mut r, d)
        };
        let mut probes = default_probes(&[f.clone(), e.clone()]).unwrap();
        probes.push(sample::mixed_state(&mut r, d));
        let h = check_hierarchy(&f, &e, &probes).unwrap();
        prop_assert!(!h.violation);
        prop_assert!(!h.fuzzy || h.coarse);
        prop_assert!(!h.coarse || h.informational);
        prop_assert!(!h.informational || h.determination);
        if fuzzy_pair { prop_assert!(h.fuzzy); }

        let vf = leq_fuzzy(&f, &e).unwrap();
        if let Some(k) = vf.kernel() {
            prop_assert!(is_stochastic(&k.to_rows(), LP));
            prop_assert!(kernel_residual(&k.to_rows(), &f, &e) <= LP);
        }
        let vi = leq_informational(&f, &e).unwrap();
        if let Some(Certificate::Witness(w)) = &vi.certificate {
            prop_assert!(!vi.holds);
            prop_assert!(is_valid_state(w.t1.op(), 1e-9) && is_valid_state(w.t2.op(), 1e-9));
            let (pf1, pf2) = (naive_stats(&f, &w.t1), naive_stats(&f, &w.t2));
            let k = w.distinguishing_outcome;
            prop_assert!((pf1[k] - pf2[k]).abs() > PROB);
            prop_assert!(linf(&naive_stats(&e, &w.t1), &naive_stats(&e, &w.t2)) <= PROB);
        }
    }

    #[test]
    fn trivial_observable_laws(seed in any::<u64>(), d in 2usize..=3) {
        let mut r = rng(seed);
        let e = observable(&mut r, d);
        let n = r.random_range(1..=3);
        let m = sample::probability(&mut r, n);
        let t = povm_order::constructors::make_trivial(&m, d).unwrap();
        prop_assert!(leq_informational(&t, &e).unwrap().holds);
        prop_assert!(is_trivial(&e).is_none());
        prop_assert!(!leq_fuzzy(&e, &t).unwrap().holds);
    }

    #[test]
    fn poset_reachability_matches_relation(seed in any::<u64>(), d in 2usize..=3, k in 1usize..=5) {
        let mut r = rng(seed);
        let mut catalog = Vec::new();
        for i in 0..k {
            let obs = if i > 0 && r.random::<bool>() {
                let base: &DiscreteObservable = &catalog[r.random_range(0..i)];
                let m = r.random_range(1..=3);
                sample::stochastic_kernel(&mut r, base.outcomes(), m).apply(base).unwrap()
            } else {
                observable(&mut r, d)
            };
            catalog.push(obs);
        }
        let labels: Vec<String> = (0..k).map(|i| format!("o{i}")).collect();
        for kind in [RelationKind::Fuzzy, RelationKind::Informational] {
            let rep = Comparator::default().build_poset(&catalog, &labels, kind, None).unwrap();
            let nc = rep.classes.len();
            for a in 0..nc {
                for b in 0..nc {
                    let (ra, rb) = (rep.classes[a][0], rep.classes[b][0]);
                    if a != b {
                        prop_assert!(!(rep.reachable(a, b) && rep.reachable(b, a)), "cycle between classes");
                        prop_assert_eq!(rep.reachable(a, b), rep.leq[ra][rb]);
                    }
                }
            }
            for c in 0..nc {
                prop_assert_eq!(rep.maximal[c], !rep.edges.iter().any(|e| e.0 == c));
            }
        }
    }

    #[test]
    fn catalog_round_trip(seed in any::<u64>(), d in 1usize..=4, k in 1usize..=4) {
        let mut r = rng(seed);
        let mut c = Catalog::new(d);
        for i in 0..k {
            c.upsert(&format!("obs-{i}"), observable(&mut r, d)).unwrap();
        }
        c.upsert("photon", make_photon_counting(r.random(), d).unwrap().observable).unwrap();
        let text = c.to_json_string();
        let back = parse_catalog_str(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.to_json_string(), text);
    }
}

proptest! {
    #![proptest_config(cfg(32))]

    #[test]
    fn photon_family_identities(d in 1usize..=16, a in 0.001f64..=1.0, b in 0.001f64..=1.0, c in 0.001f64..=1.0) {
        let mut eps = [a, b, c];
        eps.sort_by(f64::total_cmp);
        let [e1, e2, e3] = eps;
        prop_assert_eq!(make_photon_counting(1.0, d).unwrap().observable, make_number_observable(d).unwrap());
        let zero = make_photon_counting(0.0, d).unwrap().observable;
        let m = is_trivial(&zero).unwrap();
        prop_assert!(m.as_slice()[0] == 1.0 && m.as_slice()[1..].iter().all(|&x| x == 0.0));
        let k12 = binomial_efficiency_kernel(e1, e2, d).unwrap();
        let f1 = make_photon_counting(e1, d).unwrap().observable;
        let f2 = make_photon_counting(e2, d).unwrap().observable;
        prop_assert!(kernel_residual(&k12.to_rows(), &f1, &f2) <= 1e-10);
        let k23 = binomial_efficiency_kernel(e2, e3, d).unwrap();
        let k13 = binomial_efficiency_kernel(e1, e3, d).unwrap();
        prop_assert!(compose_kernels(&k12, &k23).unwrap().max_abs_diff(&k13) <= 1e-10);
    }

    #[test]
    fn dominating_effect_structure(seed in any::<u64>(), d in 1usize..=4) {
        let mut r = rng(seed);
        let a = sample::effect(&mut r, d);
        prop_assume!(!yes_no_is_fuzzy_optimal(&a));
        let ev = a.op().eigenvalues();
        prop_assume!(ev[d - 1] - ev[0] > 1e-6);
        let b = yes_no_dominating_effect(&a).unwrap();
        let (ea, eb) = (make_yes_no(&a).unwrap().observable, make_yes_no(&b).unwrap().observable);
        prop_assert!(leq_fuzzy(&ea, &eb).unwrap().holds);
        prop_assert!(!leq_fuzzy(&eb, &ea).unwrap().holds);
        prop_assert!(yes_no_is_fuzzy_optimal(&b));
    }

    #[test]
    fn cyclic_smearing(seed in any::<u64>(), l in 2usize..=7) {
        let mut r = rng(seed);
        let q = make_cyclic_position(l).unwrap();
        let rho1 = sample::probability(&mut r, l);
        let rho2 = sample::probability(&mut r, l);
        let once = smear_cyclic(&q, &rho1).unwrap();
        prop_assert!(once.covariant && covariance_residual(&once.observable) <= 1e-9);
        let twice = smear_cyclic(&once, &rho2).unwrap();
        let direct = smear_cyclic(&q, &cyclic_convolve(&rho1, &rho2).unwrap()).unwrap();
        for x in 0..l {
            prop_assert!(twice.observable.effect(x).op().max_abs_diff(direct.observable.effect(x).op()) <= 1e-9);
        }
        prop_assert!(localization_structure_report(&twice).unwrap().consistent);
        let phases: Vec<f64> = (0..l).map(|_| r.random_range(0.0..std::f64::consts::TAU)).collect();
        prop_assert!(localization_structure_report(&covariant_rank_one(l, &phases).unwrap()).unwrap().consistent);
    }

    #[test]
    fn determination_witnesses_are_sound(seed in any::<u64>(), d in 2usize..=4) {
        let mut r = rng(seed);
        let e = observable(&mut r, d);
        let mut probes = default_probes(std::slice::from_ref(&e)).unwrap();
        probes.push(sample::mixed_state(&mut r, d));
        probes.push(sample::pure_state(&mut r, d));
        for t in &probes {
            let v = is_determined(t, &e).unwrap();
            if v.status == DeterminationStatus::NotDetermined {
                let w = v.witness.as_ref().unwrap();
                prop_assert!(is_valid_state(w.op(), 1e-9));
                prop_assert!(linf(&naive_stats(&e, w), &naive_stats(&e, t)) <= PROB);
                prop_assert!(w.op().sub(t.op()).operator_norm() > 1e-7);
            }
        }
    }

    #[test]
    fn full_rank_states_not_determined(seed in any::<u64>(), d in 2usize..=4) {
        let mut r = rng(seed);
        let e = observable(&mut r, d);
        prop_assume!(!Comparator::default().is_informationally_complete(&e));
        let t = sample::mixed_state(&mut r, d);
        prop_assume!(t.op().min_eigenvalue() > 1e-6);
        let v = is_determined(&t, &e).unwrap();
        prop_assert_eq!(v.status, DeterminationStatus::NotDetermined);
    }

    #[test]
    fn determination_respects_informational_order(seed in any::<u64>(), d in 2usize..=3) {
        let mut r = rng(seed);
        let e = observable(&mut r, d);
        let m = r.random_range(1..=4);
        let f = sample::stochastic_kernel(&mut r, e.outcomes(), m).apply(&e).unwrap();
        prop_assert!(leq_informational(&f, &e).unwrap().holds);
        let mut probes = default_probes(&[f.clone(), e.clone()]).unwrap();
        probes.push(sample::pure_state(&mut r, d));
        for t in &probes {
            let vf = is_determined(t, &f).unwrap();
            if vf.status == DeterminationStatus::Determined && vf.certification == Certification::Exact {
                prop_assert_ne!(is_determined(t, &e).unwrap().status, DeterminationStatus::NotDetermined);
            }
        }
    }

    #[test]
    fn sharp_observables_determine_rank_one_atoms(seed in any::<u64>(), split in 0usize..4) {
        let mut r = rng(seed);
        let blocks: &[usize] = [&[1, 1, 1][..], &[1, 2], &[2, 1, 1], &[1, 1]][split];
        let (e, basis) = sharp(&mut r, blocks);
        let d = e.dim();
        let mut start = 0;
        for &b in blocks {
            for v in &basis[start..start + b] {
                let t = DensityState::pure(v).unwrap();
                let st = is_determined(&t, &e).unwrap().status;
                let expected = if b == 1 { DeterminationStatus::Determined } else { DeterminationStatus::NotDetermined };
                prop_assert_eq!(st, expected);
            }
            start += b;
        }
        let psi = sample::pure_state(&mut r, d);
        prop_assert_eq!(is_determined(&psi, &e).unwrap().status, DeterminationStatus::NotDetermined);
        let full = sample::mixed_state(&mut r, d);
        prop_assert_eq!(is_determined(&full, &e).unwrap().status, DeterminationStatus::NotDetermined);
        let mm = DensityState::maximally_mixed(d);
        prop_assert_eq!(is_determined(&mm, &e).unwrap().status, DeterminationStatus::NotDetermined);
        let _ = ProbabilityVector::new(vec![1.0]).unwrap();
    }
}
