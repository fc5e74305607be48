#![allow(dead_code)]

use std::collections::BTreeMap;

use dyngibbs::inference::config_index;
use dyngibbs::oracle::{chi_square_two_sample, ChiSquare};
use dyngibbs::{Chain, ChainParams, ChainRng, MrfInstance, PowerLaw, Spin, UpdatePlan, VertexId};
use rayon::prelude::*;

pub fn v(i: u64) -> VertexId {
    VertexId(i)
}

pub fn params(seed: u64, t: usize) -> ChainParams {
    ChainParams::new(0.5, PowerLaw::constant(0.1).unwrap(), seed)
        .unwrap()
        .with_length(t)
}

pub fn index_of(inst: &MrfInstance, s: &BTreeMap<VertexId, Spin>) -> usize {
    let spins: Vec<Spin> = inst.vertex_ids().iter().map(|v| s[v]).collect();
    config_index(&spins, inst.q())
}

/// Updates `reps` chains of length `t` from `old` to `new` and compares their
/// final samples with fresh chains on `new` from the same initial state.
pub fn law_test(old: &MrfInstance, new: &MrfInstance, t: usize, reps: usize, seed: u64) -> ChiSquare {
    let p = params(seed, t);
    let plan = UpdatePlan::between(old, new).unwrap();
    let k = new.q().pow(new.num_vertices() as u32);
    let pairs: Vec<(usize, usize)> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut chain = Chain::generate(old, &p, r).unwrap();
            plan.apply(&mut chain, &p).unwrap();
            assert!(chain.sample_is_consistent());
            assert_eq!(chain.log().len(), t);
            let y0 = chain.log().initial_state();
            let rng = ChainRng::new(seed.wrapping_add(0x5eed), r);
            let fresh = Chain::from_initial(new, &y0, t, rng, r).unwrap();
            (index_of(new, chain.sample()), index_of(new, fresh.sample()))
        })
        .collect();
    let mut a = vec![0u64; k];
    let mut b = vec![0u64; k];
    for (x, y) in pairs {
        a[x] += 1;
        b[y] += 1;
    }
    chi_square_two_sample(&a, &b)
}
