use proptest::prelude::*;

use super::ingest::ingest_reader;
use super::*;

fn net_from(pairs: &[(usize, usize, f64)]) -> InteractionNetwork {
    let nu = pairs.iter().map(|p| p.0).max().map_or(0, |m| m + 1);
    let ni = pairs.iter().map(|p| p.1).max().map_or(0, |m| m + 1);
    let recs = pairs
        .iter()
        .map(|&(u, i, t)| InteractionRecord::new(u, i, t))
        .collect();
    InteractionNetwork::from_records(nu, ni, recs).unwrap()
}

fn times(b: &IntervalBatch) -> Vec<f64> {
    b.records.iter().map(|r| r.timestamp).collect()
}

#[test]
fn ingest_two_lines() {
    let text = "user_id,item_id,timestamp\nalice,x,1.0\nbob,x,2.5\n";
    let (net, rep) = ingest_reader(text.as_bytes()).unwrap();
    assert_eq!((net.num_users, net.num_items, net.len()), (2, 1, 2));
    assert_eq!(rep.reordered, 0);
    assert_eq!(net.user_names, vec!["alice", "bob"]);
    assert_eq!((rep.t_min, rep.t_max), (1.0, 2.5));
}

#[test]
fn ingest_empty_file() {
    assert!(matches!(
        ingest_reader("user_id,item_id,timestamp\n".as_bytes()),
        Err(GraphError::NoRecords)
    ));
    assert!(matches!(ingest_reader("".as_bytes()), Err(GraphError::Malformed { .. })));
}

#[test]
fn ingest_sorts_and_counts_reordered() {
    let text = "user_id,item_id,timestamp\n1,a,3\n2,b,1\n3,c,2\n";
    let (net, rep) = ingest_reader(text.as_bytes()).unwrap();
    let ts: Vec<f64> = net.records.iter().map(|r| r.timestamp).collect();
    assert_eq!(ts, vec![1.0, 2.0, 3.0]);
    assert_eq!(rep.reordered, 3);
    assert_eq!(net.user_names, vec!["2", "3", "1"]);
    let again = ingest_reader(text.as_bytes()).unwrap();
    assert_eq!(again.0, net);
}

#[test]
fn ingest_label_and_features() {
    let text = "user_id,item_id,timestamp,state_label,comma_separated_list_of_features\n\
                0,0,0.0,0,0.1,0.2\n1,0,1.0,1,0.3,0.4\n";
    let (net, rep) = ingest_reader(text.as_bytes()).unwrap();
    assert!(rep.has_label);
    assert_eq!(net.feature_dim, 2);
    assert_eq!(net.records[1].label, Some(1.0));
    assert_eq!(net.records[1].features, vec![0.3, 0.4]);
}

#[test]
fn ingest_malformed_names_line() {
    let text = "user_id,item_id,timestamp\n0,0,1\n0,1,abc\n";
    match ingest_reader(text.as_bytes()) {
        Err(GraphError::Malformed { line, message }) => {
            assert_eq!(line, 3);
            assert!(message.contains("abc"));
        }
        other => panic!("{other:?}"),
    }
    let text = "user_id,item_id,timestamp,f\n0,0,1,0.5\n0,1,2\n";
    assert!(matches!(
        ingest_reader(text.as_bytes()),
        Err(GraphError::Malformed { line: 3, .. })
    ));
}

#[test]
fn csv_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let text = "user_id,item_id,timestamp,state_label,f\n5,a,0.5,0,1.5\n7,b,1.25,1,-2\n";
    let (net, _) = ingest_reader(text.as_bytes()).unwrap();
    let path = dir.path().join("out.csv");
    write_csv(&net, &path).unwrap();
    let (back, _) = ingest(&path).unwrap();
    assert_eq!(back.records, net.records);
}

#[test]
fn partition_examples() {
    let net = net_from(&[(0, 0, 0.0), (0, 1, 1.0), (1, 0, 2.0), (1, 1, 3.0)]);
    let b = partition_intervals(&net, 2).unwrap();
    assert_eq!(times(&b[0]), vec![0.0, 1.0]);
    assert_eq!(times(&b[1]), vec![2.0, 3.0]);
    let one = partition_intervals(&net, 1).unwrap();
    assert_eq!(one[0].records.len(), 4);

    let net = net_from(&[(0, 0, 0.0), (0, 0, 10.0)]);
    let b = partition_intervals(&net, 10).unwrap();
    assert_eq!(times(&b[0]), vec![0.0]);
    assert_eq!(times(&b[9]), vec![10.0]);
    assert!(b[1..9].iter().all(IntervalBatch::is_empty));
    assert!(partition_intervals(&net, 0).is_err());
}

#[test]
fn boundary_goes_to_later_window() {
    // 0.3 is not exactly representable; 3 windows over [0, 0.9] put
    // the inner boundaries at 0.3 and 0.6 up to rounding.
    let net = net_from(&[(0, 0, 0.0), (0, 0, 0.3), (0, 0, 0.6), (0, 0, 0.9)]);
    let b = partition_intervals(&net, 3).unwrap();
    for batch in &b {
        for t in times(batch) {
            assert!(t >= batch.start);
            assert!(t < batch.end || batch.index == 2);
        }
    }
    assert_eq!(times(&b[2]), vec![0.6, 0.9]);
}

#[test]
fn batch_adjacency() {
    let net = net_from(&[(0, 0, 0.0), (0, 1, 0.0), (1, 1, 0.0)]);
    let b = &partition_intervals(&net, 1).unwrap()[0];
    assert_eq!(b.by_user[&0], vec![0, 1]);
    assert_eq!(b.by_item[&1], vec![1, 2]);
}

#[test]
fn split_examples() {
    let pairs: Vec<_> = (0..10).map(|k| (k % 3, k % 2, k as f64)).collect();
    let net = net_from(&pairs);
    let (tr, va, te) = chronological_split(&net, [0.8, 0.1, 0.1]).unwrap();
    assert_eq!((tr.len(), va.len(), te.len()), (8, 1, 1));
    assert_eq!(te.records[0].timestamp, 9.0);
    assert_eq!(tr.num_users, net.num_users);

    let net3 = net_from(&[(0, 0, 0.0), (1, 0, 1.0), (2, 0, 2.0)]);
    let (a, b, c) = chronological_split(&net3, [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]).unwrap();
    assert_eq!((a.len(), b.len(), c.len()), (1, 1, 1));

    let two = net_from(&[(0, 0, 0.0), (1, 0, 1.0)]);
    assert!(matches!(
        chronological_split(&two, [0.8, 0.1, 0.1]),
        Err(GraphError::TooFewRecords(2))
    ));
    assert!(chronological_split(&net, [0.5, 0.5, 0.0]).is_err());
    assert!(chronological_split(&net, [0.5, 0.3, 0.3]).is_err());
}

#[test]
fn split_equal_timestamps_keeps_input_order() {
    let pairs: Vec<_> = (0..6).map(|k| (k, 0, 1.0)).collect();
    let net = net_from(&pairs);
    let (tr, va, te) = chronological_split(&net, [0.5, 0.25, 0.25]).unwrap();
    let users = |n: &InteractionNetwork| n.records.iter().map(|r| r.user).collect::<Vec<_>>();
    assert_eq!(users(&tr), vec![0, 1, 2]);
    assert_eq!(users(&va), vec![3, 4]);
    assert_eq!(users(&te), vec![5]);
    let again = chronological_split(&net, [0.5, 0.25, 0.25]).unwrap();
    assert_eq!(again.0, tr);
}

#[test]
fn projection_examples() {
    let net = net_from(&[(0, 0, 0.0), (1, 0, 0.0)]);
    let b = &partition_intervals(&net, 1).unwrap()[0];
    let p = project_bipartite(b, Side::User, 1.0, 1).unwrap();
    assert_eq!(p.graph.edges(), vec![(0, 1)]);
    assert_eq!(p.side, Side::User);

    let pairs: Vec<_> = (0..6).map(|u| (u, 0, u as f64)).collect();
    let net = net_from(&pairs);
    let b = &partition_intervals(&net, 1).unwrap()[0];
    let p = project_bipartite(b, Side::User, 1.0, 1).unwrap();
    assert_eq!(p.graph.num_edges(), 15);

    let items = project_bipartite(b, Side::Item, 1.0, 1).unwrap();
    assert_eq!(items.graph.len(), 1);
    assert_eq!(items.graph.num_edges(), 0);

    let empty = IntervalBatch::new(0, 0.0, 1.0, Vec::new());
    assert!(project_bipartite(&empty, Side::User, 0.5, 0).unwrap().graph.is_empty());
    assert!(project_bipartite(b, Side::User, 0.0, 0).is_err());
}

#[test]
fn sampled_projection_is_seeded() {
    let pairs: Vec<_> = (0..40).map(|u| (u, u % 3, u as f64)).collect();
    let net = net_from(&pairs);
    let b = &partition_intervals(&net, 1).unwrap()[0];
    let p1 = project_bipartite(b, Side::User, 0.15, 9).unwrap();
    let p2 = project_bipartite(b, Side::User, 0.15, 9).unwrap();
    assert_eq!(p1, p2);
    // 40 users in 3 cliques of sizes 14, 13, 13; every node keeps ≥ 2 links
    assert!(p1.graph.num_edges() < 40 * 13 / 2);
    assert!((0..p1.graph.len()).all(|v| p1.graph.degree(v) >= 2));
}

#[test]
fn degree_examples() {
    let net = net_from(&[(0, 0, 0.0)]);
    assert_eq!(degree_distribution(&net, Side::User), [(1, 1)].into());
    let net = net_from(&[(0, 0, 0.0), (0, 1, 1.0), (0, 2, 2.0)]);
    assert_eq!(degree_distribution(&net, Side::User), [(3, 1)].into());
    assert_eq!(degree_distribution(&net, Side::Item), [(1, 3)].into());
    let empty = InteractionNetwork::from_records(4, 2, Vec::new()).unwrap();
    assert_eq!(degree_distribution(&empty, Side::User), [(0, 4)].into());
}

#[test]
fn simple_graph_basics() {
    let mut g = SimpleGraph::new(3);
    assert!(g.add_edge(0, 1));
    assert!(!g.add_edge(1, 0));
    assert!(!g.add_edge(2, 2));
    assert_eq!(g.bfs(0), vec![0, 1, u32::MAX]);
    assert_eq!(g.components(), vec![vec![0, 1], vec![2]]);
    assert_eq!(SimpleGraph::cycle(4).num_edges(), 4);
    assert_eq!(SimpleGraph::star(4).degree(0), 4);
}

fn records_strategy() -> impl Strategy<Value = Vec<(usize, usize, f64)>> {
    prop::collection::vec((0usize..8, 0usize..6, 0u32..50), 1..60)
        .prop_map(|v| v.into_iter().map(|(u, i, t)| (u, i, t as f64 * 0.37)).collect())
}

proptest! {
    #[test]
    fn batches_partition_records(pairs in records_strategy(), n in 1usize..12) {
        let net = net_from(&pairs);
        let batches = partition_intervals(&net, n).unwrap();
        prop_assert_eq!(batches.len(), n);
        let mut all: Vec<InteractionRecord> =
            batches.iter().flat_map(|b| b.records.clone()).collect();
        prop_assert_eq!(all.len(), net.len());
        all.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp));
        prop_assert_eq!(all, net.records.clone());
        for w in batches.windows(2) {
            if let (Some(a), Some(b)) = (w[0].records.last(), w[1].records.first()) {
                prop_assert!(a.timestamp <= b.timestamp);
            }
        }
    }

    #[test]
    fn projection_ignores_record_order(
        pairs in records_strategy(),
        ratio in 0.05f64..1.0,
        seed in any::<u64>(),
        rot in 0usize..60,
    ) {
        let recs: Vec<InteractionRecord> =
            pairs.iter().map(|&(u, i, t)| InteractionRecord::new(u, i, t)).collect();
        let mut shuffled = recs.clone();
        shuffled.reverse();
        let k = rot % shuffled.len();
        shuffled.rotate_left(k);
        for side in Side::BOTH {
            let a = project_records(&recs, side, ratio, seed).unwrap();
            let b = project_records(&shuffled, side, ratio, seed).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn split_preserves_time_order(n in 3usize..80) {
        let pairs: Vec<_> = (0..n).map(|k| (k % 5, k % 4, k as f64)).collect();
        let net = net_from(&pairs);
        let (tr, va, te) = chronological_split(&net, [0.8, 0.1, 0.1]).unwrap();
        prop_assert_eq!(tr.len() + va.len() + te.len(), n);
        let last_train = tr.records.last().unwrap().timestamp;
        prop_assert!(last_train < va.records[0].timestamp);
        prop_assert!(va.records.last().unwrap().timestamp < te.records[0].timestamp);
    }
}

#[test]
fn induced_and_largest_component() {
    let mut g = SimpleGraph::with_nodes(vec![10, 11, 12, 13, 14]);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    g.add_edge(3, 4);
    let big = g.largest_component();
    assert_eq!(big.nodes, vec![10, 11, 12]);
    assert_eq!(big.num_edges(), 2);
    let sub = g.induced(&[0, 2]);
    assert_eq!(sub.num_edges(), 0);
    assert_eq!(SimpleGraph::default().largest_component().len(), 0);
}
