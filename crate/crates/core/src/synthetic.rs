//! Small generators with known structure, used for smoke tests and demos.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{InteractionNetwork, InteractionRecord};

#[derive(Clone, Debug)]
pub struct PlantedConfig {
    pub users: usize,
    pub items: usize,
    pub communities: usize,
    pub interactions: usize,
    /// Favourite items per user.
    pub favourites: usize,
    /// Probability of revisiting a favourite.
    pub p_favourite: f64,
    /// Probability of a uniformly random item.
    pub p_noise: f64,
    pub time_span: f64,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        PlantedConfig {
            users: 200,
            items: 100,
            communities: 3,
            interactions: 5000,
            favourites: 3,
            p_favourite: 0.6,
            p_noise: 0.1,
            time_span: 1000.0,
        }
    }
}

fn zipf_weights(n: usize) -> Vec<f64> {
    (1..=n).map(|r| 1.0 / r as f64).collect()
}

fn timestamps(rng: &mut ChaCha8Rng, n: usize, span: f64) -> Vec<f64> {
    let mut t: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * span).collect();
    t.sort_by(f64::total_cmp);
    t
}

/// Users and items split into communities; users mostly revisit a few
/// favourites and otherwise pick popular items of their own community.
pub fn planted_communities(cfg: &PlantedConfig, seed: u64) -> InteractionNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = cfg.communities.max(1);
    let members: Vec<Vec<usize>> = (0..c)
        .map(|k| (0..cfg.items).filter(|i| i % c == k).collect())
        .collect();
    let zipf: Vec<WeightedIndex<f64>> = members
        .iter()
        .map(|m| WeightedIndex::new(zipf_weights(m.len())).expect("non-empty community"))
        .collect();
    let favs: Vec<Vec<usize>> = (0..cfg.users)
        .map(|u| {
            let k = u % c;
            (0..cfg.favourites)
                .map(|_| members[k][zipf[k].sample(&mut rng)])
                .collect()
        })
        .collect();
    let times = timestamps(&mut rng, cfg.interactions, cfg.time_span);
    let records = times
        .into_iter()
        .map(|t| {
            let u = rng.gen_range(0..cfg.users);
            let k = u % c;
            let roll: f64 = rng.gen();
            let item = if roll < cfg.p_favourite {
                favs[u][rng.gen_range(0..favs[u].len())]
            } else if roll < 1.0 - cfg.p_noise {
                members[k][zipf[k].sample(&mut rng)]
            } else {
                rng.gen_range(0..cfg.items)
            };
            InteractionRecord::new(u, item, t)
        })
        .collect();
    InteractionNetwork::from_records(cfg.users, cfg.items, records).expect("generated ids are in range")
}

/// Two top-level groups, each split into `branching` subgroups. Items are
/// picked within the user's subgroup by preferential attachment, with some
/// traffic spilling to the sibling subgroups and rarely across groups, so
/// the item graph is tree-like with heavy-tailed degrees.
pub fn preferential_hierarchy(cfg: &PlantedConfig, branching: usize, seed: u64) -> InteractionNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let leaves = 2 * branching.max(1);
    let members: Vec<Vec<usize>> = (0..leaves)
        .map(|k| (0..cfg.items).filter(|i| i % leaves == k).collect())
        .collect();
    let mut degree = vec![0usize; cfg.items];
    let times = timestamps(&mut rng, cfg.interactions, cfg.time_span);
    let mut records = Vec::with_capacity(times.len());
    for t in times {
        let u = rng.gen_range(0..cfg.users);
        let home = u % leaves;
        let roll: f64 = rng.gen();
        let leaf = if roll < 0.75 {
            home
        } else if roll < 0.95 {
            let group = home / branching.max(1);
            group * branching.max(1) + rng.gen_range(0..branching.max(1))
        } else {
            rng.gen_range(0..leaves)
        };
        let pool = &members[leaf];
        let w: Vec<f64> = pool.iter().map(|&i| degree[i] as f64 + 1.0).collect();
        let item = pool[WeightedIndex::new(&w).expect("positive weights").sample(&mut rng)];
        degree[item] += 1;
        records.push(InteractionRecord::new(u, item, t));
    }
    InteractionNetwork::from_records(cfg.users, cfg.items, records).expect("generated ids are in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_is_deterministic_and_sized() {
        let cfg = PlantedConfig::default();
        let a = planted_communities(&cfg, 3);
        let b = planted_communities(&cfg, 3);
        assert_eq!(a.records, b.records);
        assert_eq!(a.len(), 5000);
        let within = a.records.iter().filter(|r| r.user % 3 == r.item % 3).count();
        assert!(within as f64 > 0.85 * a.len() as f64);
    }

    #[test]
    fn hierarchy_has_heavy_tail() {
        let cfg = PlantedConfig::default();
        let net = preferential_hierarchy(&cfg, 3, 1);
        let mut deg = vec![0usize; cfg.items];
        for r in &net.records {
            deg[r.item] += 1;
        }
        deg.sort_unstable();
        let max = *deg.last().unwrap() as f64;
        let median = deg[deg.len() / 2] as f64;
        assert!(max > 3.0 * median, "max {max} median {median}");
    }
}
