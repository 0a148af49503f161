//! Encode, reconstruct and repair round trips for single codes and stacks.

use mldr_core::mldr::{plan_layout, MldrConfig};
use mldr_core::{Fe, Field, MbrCode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n).filter(|m| m.count_ones() as usize == k).map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect()).collect()
}

#[test]
fn every_small_code_round_trips() {
    let field = Field::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 2..=5 {
        for d in 1..n {
            for k in 1..=d {
                let code = MbrCode::new(n, k, d, field).unwrap();
                for _ in 0..5 {
                    let msg: Vec<Fe> = (0..code.params().block).map(|_| Fe(rng.gen_range(0..257))).collect();
                    let shares = code.encode(&msg).unwrap();
                    for s in subsets(n, k) {
                        let picked: Vec<_> = s.iter().map(|&i| shares[i].clone()).collect();
                        assert_eq!(code.reconstruct(&picked).unwrap(), msg, "({n},{k},{d}) {s:?}");
                    }
                    for target in 1..=n {
                        let others: Vec<usize> = (0..n).filter(|&i| i + 1 != target).collect();
                        for helpers in subsets(others.len(), d) {
                            let syms: Vec<_> = helpers
                                .iter()
                                .map(|&h| code.helper_symbol(&shares[others[h]], target).unwrap())
                                .collect();
                            assert_eq!(code.regenerate(target, &syms).unwrap(), shares[target - 1]);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn stacked_system_round_trips_with_padding() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for sizes in [vec![3, 0, 7], vec![1, 1, 1], vec![0, 0, 5], vec![4, 9, 2]] {
        let system = plan_layout(MldrConfig::new(5, 3, sizes.clone(), Field::default())).unwrap();
        let msgs: Vec<Vec<Fe>> = sizes.iter().map(|&b| (0..b).map(|_| Fe(rng.gen_range(0..257))).collect()).collect();
        let shares = system.encode(&msgs).unwrap();
        for k in 1..=3 {
            for s in subsets(5, k) {
                let picked: Vec<_> = s.iter().map(|&i| shares[i].clone()).collect();
                let out = system.reconstruct(&picked).unwrap();
                assert_eq!(out[..k], msgs[..k], "{sizes:?} {s:?}");
            }
        }
        for target in 1..=5 {
            let helpers: Vec<_> = shares.iter().filter(|s| s.node != target).take(3).cloned().collect();
            assert_eq!(system.regenerate_node(target, &helpers).unwrap(), shares[target - 1]);
        }
    }
}
