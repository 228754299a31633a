use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `ceil(rate · |positives| · per_positive)` non-edges: positives are cycled
/// in a seeded random order and each lends its user to a uniformly drawn
/// item the user has no positive with.
pub fn negative_sample(
    positives: &[(usize, usize)],
    num_items: usize,
    rate: f64,
    per_positive: usize,
    seed: u64,
) -> Vec<(usize, usize)> {
    let want = (rate * positives.len() as f64 * per_positive as f64).ceil() as usize;
    if want == 0 {
        return Vec::new();
    }
    let mut seen: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for &(u, i) in positives {
        seen.entry(u).or_default().insert(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..positives.len()).collect();
    order.shuffle(&mut rng);
    let mut warned = BTreeSet::new();
    let mut out = Vec::with_capacity(want);
    let mut idle = 0;
    let mut k = 0;
    while out.len() < want && idle < order.len() {
        let (u, _) = positives[order[k % order.len()]];
        k += 1;
        let taken = &seen[&u];
        if taken.len() >= num_items {
            if warned.insert(u) {
                log::warn!("user {u} interacted with every item; no negatives drawn");
            }
            idle += 1;
            continue;
        }
        idle = 0;
        loop {
            let i = rng.gen_range(0..num_items);
            if !taken.contains(&i) {
                out.push((u, i));
                break;
            }
        }
    }
    out
}
