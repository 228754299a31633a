use super::CurvatureError;

const EPS: f64 = 1e-15;
const IMPROVE: f64 = 1e-12;

struct Edge {
    to: usize,
    cap: f64,
    cost: f64,
}

/// Exact optimal transport between supplies `a` (len m) and demands `b`
/// (len n) under the row-major m×n `cost`, by successive shortest paths.
pub fn transport_cost(a: &[f64], b: &[f64], cost: &[f64]) -> Result<f64, CurvatureError> {
    let (m, n) = (a.len(), b.len());
    assert_eq!(cost.len(), m * n, "cost matrix shape");
    let sa: f64 = a.iter().sum();
    let sb: f64 = b.iter().sum();
    if a.iter().chain(b).any(|x| !(*x >= 0.0)) || (sa - sb).abs() > 1e-9 {
        return Err(CurvatureError::InvalidMass);
    }
    let (src, sink) = (m + n, m + n + 1);
    let mut edges: Vec<Edge> = Vec::new();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); m + n + 2];
    let mut add = |edges: &mut Vec<Edge>, u: usize, v: usize, cap: f64, cost: f64| {
        adj[u].push(edges.len());
        edges.push(Edge { to: v, cap, cost });
        adj[v].push(edges.len());
        edges.push(Edge {
            to: u,
            cap: 0.0,
            cost: -cost,
        });
    };
    for (i, &ai) in a.iter().enumerate() {
        if ai > 0.0 {
            add(&mut edges, src, i, ai, 0.0);
        }
    }
    for (j, &bj) in b.iter().enumerate() {
        if bj > 0.0 {
            add(&mut edges, m + j, sink, bj, 0.0);
        }
    }
    for i in 0..m {
        for j in 0..n {
            let c = cost[i * n + j];
            if a[i] > 0.0 && b[j] > 0.0 && c.is_finite() {
                add(&mut edges, i, m + j, f64::INFINITY, c);
            }
        }
    }

    let nodes = m + n + 2;
    let mut remaining = sa;
    let mut total = 0.0;
    while remaining > 1e-12 {
        // Bellman-Ford over the residual graph.
        let mut dist = vec![f64::INFINITY; nodes];
        let mut via = vec![usize::MAX; nodes];
        dist[src] = 0.0;
        for _ in 0..nodes {
            let mut changed = false;
            for u in 0..nodes {
                if dist[u] == f64::INFINITY {
                    continue;
                }
                for &e in &adj[u] {
                    let ed = &edges[e];
                    if ed.cap > EPS && dist[u] + ed.cost < dist[ed.to] - IMPROVE {
                        dist[ed.to] = dist[u] + ed.cost;
                        via[ed.to] = e;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if dist[sink] == f64::INFINITY {
            return Err(CurvatureError::Disconnected);
        }
        let mut push = remaining;
        let mut v = sink;
        while v != src {
            let e = via[v];
            push = push.min(edges[e].cap);
            v = edges[e ^ 1].to;
        }
        let mut v = sink;
        while v != src {
            let e = via[v];
            edges[e].cap -= push;
            edges[e ^ 1].cap += push;
            total += push * edges[e].cost;
            v = edges[e ^ 1].to;
        }
        remaining -= push;
    }
    Ok(total.max(0.0))
}

/// Wasserstein-1 distance between two node distributions under `cost`.
pub fn wasserstein_exact(
    mu: &super::MassDistribution,
    nu: &super::MassDistribution,
    cost: impl Fn(usize, usize) -> f64,
) -> Result<f64, CurvatureError> {
    for d in [mu, nu] {
        let s: f64 = d.mass.iter().sum();
        if (s - 1.0).abs() > 1e-9 || d.mass.iter().any(|m| *m < 0.0) {
            return Err(CurvatureError::InvalidMass);
        }
    }
    let mut c = Vec::with_capacity(mu.support.len() * nu.support.len());
    for &x in &mu.support {
        for &y in &nu.support {
            let v = cost(x, y);
            if !v.is_finite() {
                return Err(CurvatureError::Disconnected);
            }
            c.push(v);
        }
    }
    transport_cost(&mu.mass, &nu.mass, &c)
}
