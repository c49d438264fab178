mod common;

use common::*;
use seqdec_core::decouple::{
    include_users, pinv_decoupler, sequential_decoupler, svd_decoupler, InclusionOptions,
};
use seqdec_core::flops::{
    count_matmul, estimate_flops, measure, Algorithm, CostModel, SystemDescriptor,
};

fn measured(alg: Algorithm, desc: &SystemDescriptor, seed: u64) -> u64 {
    let model = CostModel::default();
    let sys = random_system(seed, desc.n_r, &desc.user_dims);
    match alg {
        Algorithm::Sd => measure(&model, || sequential_decoupler(&sys).unwrap()).1,
        Algorithm::Svd => measure(&model, || svd_decoupler(&sys).unwrap()).1,
        Algorithm::Pinv => measure(&model, || pinv_decoupler(&sys).unwrap()).1,
        Algorithm::SdUi => {
            let set = sequential_decoupler(&sys).unwrap();
            let extra: Vec<_> = desc
                .new_users
                .iter()
                .enumerate()
                .map(|(i, &m)| randn(seed + 1000 + i as u64, desc.n_r, m))
                .collect();
            measure(&model, || {
                include_users(&sys, &set, &extra, &InclusionOptions::default()).unwrap()
            })
            .1
        }
    }
}

#[test]
fn instrumented_matmul_matches_formula() {
    let a = randn(1, 7, 5);
    let b = randn(2, 5, 3);
    let model = CostModel::default();
    let (_, used) = measure(&model, || a.matmul(&b).unwrap());
    assert_eq!(used, count_matmul(7, 5, 3, &model));
}

#[test]
fn estimates_match_instrumentation() {
    let cases = [
        SystemDescriptor::uniform(32, 8, 2),
        SystemDescriptor::uniform(12, 5, 2),
        SystemDescriptor {
            n_r: 40,
            user_dims: vec![2, 3, 2, 3, 2, 3, 2, 3, 2, 3, 2, 3],
            new_users: vec![2, 3],
        },
        SystemDescriptor::uniform(4, 1, 2).with_new_users(vec![1]),
        SystemDescriptor::uniform(70, 30, 2).with_new_users(vec![2, 2, 2]),
    ];
    let model = CostModel::default();
    for desc in &cases {
        for alg in [
            Algorithm::Sd,
            Algorithm::Svd,
            Algorithm::Pinv,
            Algorithm::SdUi,
        ] {
            if alg == Algorithm::Pinv && desc.total_streams() > desc.n_r {
                continue;
            }
            let est = estimate_flops(alg, desc, &model).unwrap().total;
            let got = measured(alg, desc, 3);
            let rel = (est as f64 - got as f64).abs() / (got.max(1) as f64);
            assert!(
                rel <= 0.01,
                "{alg} {desc:?}: estimate {est}, measured {got}"
            );
        }
    }
}

#[test]
fn sd_grows_with_users_and_streams() {
    let model = CostModel::default();
    let sd = |k: usize, m: usize| {
        estimate_flops(
            Algorithm::Sd,
            &SystemDescriptor::uniform(k * m + 10, k, m),
            &model,
        )
        .unwrap()
        .total
    };
    for k in 2..40 {
        assert!(sd(k + 1, 2) > sd(k, 2), "K = {k}");
    }
    for m in 1..8 {
        assert!(sd(50, m + 1) > sd(50, m), "M_i = {m}");
    }
}

#[test]
fn sd_to_svd_ratio_does_not_increase() {
    let model = CostModel::default();
    let mut last = f64::INFINITY;
    for k in 30..=80 {
        let desc = SystemDescriptor::uniform(2 * k + 10, k, 2);
        let sd = estimate_flops(Algorithm::Sd, &desc, &model).unwrap().total as f64;
        let svd = estimate_flops(Algorithm::Svd, &desc, &model).unwrap().total as f64;
        assert!(sd / svd <= last, "K = {k}");
        last = sd / svd;
    }
}

#[test]
fn inclusion_is_cheaper_than_recomputing() {
    let model = CostModel::default();
    for p in 1..=5 {
        let desc = SystemDescriptor::uniform(130, 60, 2).with_new_users(vec![2; p]);
        let ui = estimate_flops(Algorithm::SdUi, &desc, &model)
            .unwrap()
            .total;
        let aug = desc.augmented();
        let fresh = estimate_flops(Algorithm::Sd, &aug, &model).unwrap().total;
        let pinv = estimate_flops(Algorithm::Pinv, &aug, &model).unwrap().total;
        assert!(ui < fresh && fresh < pinv, "P = {p}: {ui} {fresh} {pinv}");
    }
}
