//! Cross-module invariant sweeps over randomized inputs. Each sweep checks a
//! library decision path against an independently implemented oracle or
//! against an equivalent decision route.

mod common;

use std::collections::BTreeMap;

use common::*;
use metzler_sign::applications::{
    delay_ct_structural, impulsive_common_vector, impulsive_structural,
};
use metzler_sign::blocks::{
    block_hurwitz, validate_multipliers_real, BlockSystem, Coupling,
};
use metzler_sign::cli::{format_matrix_file, parse_matrix_file};
use metzler_sign::graph::{bipartite_cycle_free, Digraph};
use metzler_sign::mixed::{m_phi, MixedSystem};
use metzler_sign::numeric::{
    hurwitz_metzler, is_hurwitz_metzler, real_inverse_with_residual, schur_split_hurwitz,
    spectral_abscissa_metzler,
};
use metzler_sign::signs::{MixedEntry, MixedMatrix, QualMatrix, RealMatrix, SignValue};
use metzler_sign::stability::{
    potentially_sign_stable, schur_sign_stable_checked, sign_stable_checked,
};

#[test]
fn acyclicity_three_routes_agree_on_random_graphs() {
    let mut rng = TestRng::new(0x5eed_0001);
    for trial in 0..400 {
        let n = 2 + rng.below(11); // up to 12 nodes
        let mut edges = Vec::new();
        for f in 0..n {
            for t in 0..n {
                if f != t && rng.chance(0.18) {
                    edges.push((f, t));
                }
            }
        }
        let g = Digraph::from_edges(n, edges).unwrap();
        let cycle = g.find_cycle();
        let by_cycle = cycle.is_none();
        let by_perm = g.topo_permutation().is_ok();
        let reach = g.reachability();
        let by_reach = (0..n).all(|v| !reach[v][v]);
        assert_eq!(by_cycle, by_perm, "trial {trial}");
        assert_eq!(by_cycle, by_reach, "trial {trial}");
        if let Some(w) = cycle {
            assert!(w.validate(&g), "trial {trial}: witness must verify");
        }
    }
}

#[test]
fn reachability_matches_boolean_closure() {
    let mut rng = TestRng::new(0x5eed_0002);
    for _ in 0..300 {
        let n = 1 + rng.below(10);
        let mut adj = vec![vec![false; n]; n];
        let mut edges = Vec::new();
        for f in 0..n {
            for t in 0..n {
                if f != t && rng.chance(0.2) {
                    adj[f][t] = true;
                    edges.push((f, t));
                }
            }
        }
        let g = Digraph::from_edges(n, edges).unwrap();
        assert_eq!(g.reachability(), boolean_closure(&adj));
    }
}

#[test]
fn bipartite_cycle_test_matches_pattern_nilpotency() {
    let mut rng = TestRng::new(0x5eed_0003);
    for trial in 0..300 {
        let n = 1 + rng.below(6);
        let m1 = random_nonneg_pattern(&mut rng, n, 0.3);
        let m2 = random_nonneg_pattern(&mut rng, n, 0.3);
        let (cycle_free, witness) = bipartite_cycle_free(&m1, &m2).unwrap();
        // oracle: the boolean product pattern must be nilpotent
        let prod_adj: Vec<Vec<bool>> = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| {
                        (0..n).any(|k| {
                            m1.get(r, k) == SignValue::Pos && m2.get(k, c) == SignValue::Pos
                        })
                    })
                    .collect()
            })
            .collect();
        assert_eq!(
            cycle_free,
            boolean_nilpotent(&prod_adj),
            "trial {trial}"
        );
        assert_eq!(cycle_free, witness.is_none());
    }
}

#[test]
fn class_product_containment() {
    // members of Q(A) times members of Q(B) land in Q(A B) for nonnegative
    // definite patterns
    let mut rng = TestRng::new(0x5eed_0004);
    for trial in 0..200 {
        let (n, k, m) = (1 + rng.below(4), 1 + rng.below(4), 1 + rng.below(4));
        let a = random_nonneg_pattern_rect(&mut rng, n, k, 0.5);
        let b = random_nonneg_pattern_rect(&mut rng, k, m, 0.5);
        let prod_pattern = a.mul(&b).unwrap();
        for s in 0..5u64 {
            let ma = a.sample(trial as u64 * 31 + s, 1.0).unwrap();
            let mb = b.sample(trial as u64 * 57 + s, 1.0).unwrap();
            let prod = ma.matmul(&mb).unwrap();
            assert!(prod_pattern.contains(&prod).unwrap(), "trial {trial}");
        }
    }
}

fn random_nonneg_pattern_rect(rng: &mut TestRng, rows: usize, cols: usize, density: f64) -> QualMatrix {
    let grid = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| {
                    if rng.chance(density) {
                        SignValue::Pos
                    } else {
                        SignValue::Zero
                    }
                })
                .collect()
        })
        .collect();
    QualMatrix::from_rows(grid).unwrap()
}

#[test]
fn hurwitz_routes_agree_on_2000_random_metzler() {
    let mut rng = TestRng::new(0x5eed_0005);
    let mut hurwitz = 0usize;
    for trial in 0..2000 {
        let n = 1 + rng.below(8);
        let a = random_real_metzler(&mut rng, n, trial % 2 == 0);
        // the report itself errors if the LP route, the inverse route, or
        // the abscissa sign disagree
        let rep = hurwitz_metzler(&a).unwrap_or_else(|e| panic!("trial {trial}: {e}"));
        if rep.verdict {
            hurwitz += 1;
        }
        let abscissa = rep.abscissa_estimate.unwrap();
        let oracle = oracle_abscissa(&a);
        assert!(
            (abscissa - oracle).abs() <= 1e-7 * (1.0 + oracle.abs()),
            "trial {trial}: {abscissa} vs oracle {oracle}"
        );
    }
    // the sweep must exercise both verdicts
    assert!(hurwitz > 200 && hurwitz < 1800, "got {hurwitz}");
}

#[test]
fn abscissa_monotone_under_entrywise_growth() {
    let mut rng = TestRng::new(0x5eed_0006);
    for _ in 0..300 {
        let n = 1 + rng.below(6);
        let a = random_real_metzler(&mut rng, n, false);
        let mut b = a.clone();
        for r in 0..n {
            for c in 0..n {
                if rng.chance(0.4) {
                    b.set(r, c, b.get(r, c) + rng.range(0.0, 0.5));
                }
            }
        }
        let va = spectral_abscissa_metzler(&a).unwrap();
        let vb = spectral_abscissa_metzler(&b).unwrap();
        assert!(va <= vb + 1e-7, "{va} vs {vb}");
    }
}

#[test]
fn schur_split_equals_direct_hurwitz_both_sides() {
    let mut rng = TestRng::new(0x5eed_0007);
    let mut checked = 0usize;
    for _ in 0..400 {
        let n = 2 + rng.below(5);
        let a = random_real_metzler(&mut rng, n, true);
        let direct = is_hurwitz_metzler(&a).unwrap();
        for n1 in 1..n {
            match schur_split_hurwitz(&a, n1) {
                Ok(v) => {
                    assert_eq!(v, direct, "split {n1} of\n{a}");
                    checked += 1;
                }
                // leading block not Hurwitz: the split is inapplicable and
                // the matrix itself cannot be Hurwitz
                Err(_) => assert!(!direct),
            }
        }
    }
    assert!(checked > 200);
}

#[test]
fn block_lp_matches_assembled_hurwitz_on_500_systems() {
    let mut rng = TestRng::new(0x5eed_0008);
    let mut feasible = 0usize;
    for trial in 0..500 {
        let blocks = 1 + rng.below(4);
        let sizes: Vec<usize> = (0..blocks).map(|_| 1 + rng.below(4)).collect();
        let diag: Vec<RealMatrix> = sizes
            .iter()
            .map(|&n| random_real_metzler(&mut rng, n, true))
            .collect();
        let mut couplings = BTreeMap::new();
        for i in 0..blocks {
            for j in 0..blocks {
                if i != j && rng.chance(0.4) {
                    let rank = 1 + rng.below(3);
                    let b = random_nonneg_real(&mut rng, sizes[i], rank, 0.6, 0.4);
                    let c = random_nonneg_real(&mut rng, rank, sizes[j], 0.6, 0.4);
                    couplings.insert((i, j), Coupling { b, c });
                }
            }
        }
        let sys = BlockSystem::<RealMatrix>::new(diag, couplings).unwrap();
        let lp = block_hurwitz(&sys).unwrap_or_else(|e| panic!("trial {trial}: {e}"));
        let direct = hurwitz_metzler(&sys.assemble().unwrap()).unwrap();
        assert_eq!(lp.is_feasible(), direct.verdict, "trial {trial}");
        if let Some(cert) = lp.certificate() {
            feasible += 1;
            let margin = validate_multipliers_real(cert, &sys).unwrap();
            assert!(margin > 0.0);
        }
    }
    assert!(feasible > 100, "only {feasible} feasible systems drawn");
}

fn random_nonneg_real(
    rng: &mut TestRng,
    rows: usize,
    cols: usize,
    density: f64,
    max: f64,
) -> RealMatrix {
    let grid = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| {
                    if rng.chance(density) {
                        rng.range(0.05, max.max(0.1))
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    RealMatrix::from_rows(grid).unwrap()
}

#[test]
fn checked_sign_stability_never_disagrees() {
    let mut rng = TestRng::new(0x5eed_0009);
    for trial in 0..500 {
        let n = 1 + rng.below(8);
        let a = random_metzler_pattern(&mut rng, n);
        let v = sign_stable_checked(&a).unwrap_or_else(|e| panic!("trial {trial}: {e}"));
        assert_eq!(v.graph_path, Some(v.verdict));
        assert_eq!(v.lp_path, Some(v.verdict));
        assert_eq!(v.permutation_path, Some(v.verdict));
    }
}

#[test]
fn inverse_residuals_stay_small() {
    let mut rng = TestRng::new(0x5eed_000a);
    for _ in 0..200 {
        let n = 1 + rng.below(7);
        let a = random_real_metzler(&mut rng, n, true);
        if is_hurwitz_metzler(&a).unwrap() {
            let (_, residual) = real_inverse_with_residual(&a).unwrap();
            assert!(residual <= 1e-8 * n as f64, "residual {residual}");
        }
    }
}

#[test]
fn potential_stability_equals_diagonal_negativity() {
    let mut rng = TestRng::new(0x5eed_000c);
    for _ in 0..300 {
        let n = 1 + rng.below(7);
        let a = random_metzler_pattern(&mut rng, n);
        let all_negative = (0..n).all(|i| a.get(i, i) == SignValue::Neg);
        let (yes, witness) = potentially_sign_stable(&a).unwrap();
        assert_eq!(yes, all_negative);
        if let Some(w) = witness {
            assert!(a.contains(&w).unwrap());
            assert!(is_hurwitz_metzler(&w).unwrap());
        }
    }
}

#[test]
fn schur_verdict_equals_dressed_metzler_and_nilpotency() {
    let mut rng = TestRng::new(0x5eed_000d);
    for trial in 0..300 {
        let n = 1 + rng.below(6);
        let a = random_nonneg_pattern(&mut rng, n, 0.3);
        let schur = schur_sign_stable_checked(&a).unwrap().verdict;

        // route 2: replace a verified all-zero diagonal by negatives and
        // run the Metzler test
        let zero_diag = (0..n).all(|i| a.get(i, i) == SignValue::Zero);
        let dressed_verdict = if zero_diag {
            let mut dressed = a.clone();
            for i in 0..n {
                dressed.set(i, i, SignValue::Neg);
            }
            sign_stable_checked(&dressed).unwrap().verdict
        } else {
            false
        };
        assert_eq!(schur, dressed_verdict, "trial {trial}");

        // route 3: the unit representative must be nilpotent
        let adj: Vec<Vec<bool>> = (0..n)
            .map(|r| (0..n).map(|c| a.get(r, c) == SignValue::Pos).collect())
            .collect();
        assert_eq!(schur, boolean_nilpotent(&adj), "trial {trial}");
    }
}

#[test]
fn coupling_response_is_nonpositive() {
    let mut rng = TestRng::new(0x5eed_000e);
    let mut produced = 0usize;
    for _ in 0..200 {
        let n_sigma = 1 + rng.below(4);
        let n_phi = 1 + rng.below(4);
        let a_phi = random_real_metzler(&mut rng, n_phi, true);
        if !is_hurwitz_metzler(&a_phi).unwrap() {
            continue;
        }
        let dense = |rng: &mut TestRng, rows: usize, cols: usize| {
            let grid = (0..rows)
                .map(|_| {
                    (0..cols)
                        .map(|_| if rng.chance(0.5) { rng.range(0.0, 2.0) } else { 0.0 })
                        .collect()
                })
                .collect();
            RealMatrix::from_rows(grid).unwrap()
        };
        let sys = MixedSystem::new(
            random_sign_stable_pattern(&mut rng, n_sigma, 0.4),
            a_phi,
            dense(&mut rng, n_phi, n_sigma),
            dense(&mut rng, n_sigma, n_phi),
        )
        .unwrap();
        let mp = m_phi(&sys).unwrap();
        let tol = 1e-12 * (1.0 + mp.inf_norm());
        for r in 0..mp.rows() {
            for c in 0..mp.cols() {
                assert!(mp.get(r, c) <= tol, "entry ({r},{c}) = {}", mp.get(r, c));
            }
        }
        produced += 1;
    }
    assert!(produced > 100);
}

#[test]
fn application_verdicts_hold_on_sampled_realizations() {
    // delayed flow: a positive verdict means every sampled sum is Hurwitz
    let flow: QualMatrix = "- + 0 ; 0 - + ; 0 0 -".parse().unwrap();
    let delay: QualMatrix = "0 + 0 ; 0 0 0 ; 0 0 0".parse().unwrap();
    let report = delay_ct_structural(&flow, std::slice::from_ref(&delay)).unwrap();
    assert!(report.verdict.holds());
    for seed in 0..100u64 {
        let f = flow.sample(seed, 1.0).unwrap();
        let d = delay.sample(seed ^ 0xabcd, 1.0).unwrap();
        assert!(is_hurwitz_metzler(&f.add(&d).unwrap()).unwrap(), "seed {seed}");
    }

    // impulsive pair: one sampled vector serves the flow and the jump
    let jump: QualMatrix = "0 + 0 ; 0 0 + ; 0 0 0".parse().unwrap();
    let report = impulsive_structural(&flow, &jump).unwrap();
    assert!(report.verdict.holds());
    for seed in 0..100u64 {
        let lambda = impulsive_common_vector(&flow, &jump, seed).unwrap();
        let a = flow.sample(seed, 1.0).unwrap();
        let j = jump.sample(seed ^ 0x9e37_79b9, 1.0).unwrap();
        let va = a.vecmat(&lambda).unwrap();
        assert!(va.iter().all(|&x| x < 0.0), "seed {seed}");
        let mut j_minus_i = j;
        for i in 0..3 {
            j_minus_i.set(i, i, j_minus_i.get(i, i) - 1.0);
        }
        let vj = j_minus_i.vecmat(&lambda).unwrap();
        assert!(vj.iter().all(|&x| x < 0.0), "seed {seed}");
    }
}

#[test]
fn matrix_file_round_trip_on_500_random_matrices() {
    let mut rng = TestRng::new(0x5eed_000b);
    for trial in 0..500 {
        let rows = 1 + rng.below(5);
        let cols = 1 + rng.below(5);
        let grid: Vec<Vec<MixedEntry>> = (0..rows)
            .map(|_| {
                (0..cols)
                    .map(|_| match rng.below(6) {
                        0 => MixedEntry::Sign(SignValue::Neg),
                        1 => MixedEntry::Sign(SignValue::Zero),
                        2 => MixedEntry::Sign(SignValue::Pos),
                        3 => MixedEntry::Sign(SignValue::Indef),
                        4 => MixedEntry::Real(0.0),
                        _ => {
                            let mag = 10f64.powf(rng.range(-6.0, 6.0));
                            MixedEntry::Real(if rng.chance(0.5) { mag } else { -mag })
                        }
                    })
                    .collect()
            })
            .collect();
        let m = MixedMatrix::from_rows(grid).unwrap();
        let named = vec![(format!("T{trial}"), m)];
        let text = format_matrix_file(&named);
        let reparsed = parse_matrix_file(&text).unwrap();
        assert_eq!(named, reparsed, "trial {trial}:\n{text}");
    }
}
