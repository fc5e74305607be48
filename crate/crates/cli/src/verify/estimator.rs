//! Incremental estimator updates against recounting from scratch.

use dyngibbs::inference::{sample_diff, EstimatorState, Query, Sample};
use dyngibbs::{ChainRng, VertexId};

use super::{verdict, Outcome, VerifyOptions};

const Q: usize = 3;
const VERTS: usize = 6;
const STEPS: usize = 5;

fn random_sample(rng: &mut ChainRng) -> Sample {
    let mut s = Sample::new();
    for i in 0..VERTS {
        if rng.below(8) != 0 {
            s.insert(VertexId(i as u64), rng.below(Q));
        }
    }
    s
}

/// Random edits: spin changes, vertices appearing or vanishing, chains
/// added or removed.
fn evolve(rng: &mut ChainRng, old: &[Sample]) -> Vec<Sample> {
    let mut new = old.to_vec();
    for s in &mut new {
        for _ in 0..rng.below(3) {
            let u = VertexId(rng.below(VERTS) as u64);
            if rng.below(4) == 0 {
                s.remove(&u);
            } else {
                s.insert(u, rng.below(Q));
            }
        }
    }
    match rng.below(3) {
        0 => {
            let keep = rng.below(new.len() + 1);
            new.truncate(keep);
        }
        1 => {
            for _ in 0..rng.below(3) {
                new.push(random_sample(rng));
            }
        }
        _ => {}
    }
    new
}

fn random_query(rng: &mut ChainRng) -> Query {
    let mut ids: Vec<VertexId> = (0..VERTS as u64).map(VertexId).collect();
    for i in (1..ids.len()).rev() {
        ids.swap(i, rng.below(i + 1));
    }
    let (na, nb) = (1 + rng.below(2), 1 + rng.below(2));
    let a = ids[..na].to_vec();
    let b = ids[na..na + nb].to_vec();
    match rng.below(3) {
        0 => Query::marginal(a),
        1 => Query::posterior(a, b.into_iter().map(|u| (u, rng.below(Q))).collect()),
        _ => Query::map(a, b),
    }
}

pub fn check(opts: &VerifyOptions) -> Outcome {
    let streams = if opts.quick { 200 } else { 1_000 };
    let mut rng = ChainRng::new(opts.seed, 8);
    let (mut mismatches, mut entries) = (0usize, 0usize);
    for _ in 0..streams {
        let query = random_query(&mut rng);
        let count = rng.below(8);
        let mut samples: Vec<Sample> = (0..count).map(|_| random_sample(&mut rng)).collect();
        let mut st = EstimatorState::rebuild(&query, Q, &samples)?;
        for _ in 0..STEPS {
            let next = evolve(&mut rng, &samples);
            let diff = sample_diff(&samples, &next);
            entries += diff.size();
            st.incremental_apply(&diff)?;
            mismatches += usize::from(st != EstimatorState::rebuild(&query, Q, &next)?);
            samples = next;
        }
    }
    Ok((
        verdict(mismatches == 0),
        format!("{streams} streams x {STEPS} diffs ({entries} entries), {mismatches} mismatches"),
    ))
}
