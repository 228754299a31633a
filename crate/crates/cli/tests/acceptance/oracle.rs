//! Independent reference computations. Nothing here calls into the library
//! code under test.

/// Exact transport cost by enumerating every basic solution of the
/// transportation polytope: each choice of m+n-1 cells is solved as a square
/// linear system, kept if feasible, and the cheapest vertex wins.
pub fn transport_by_bases(a: &[f64], b: &[f64], cost: &[f64]) -> f64 {
    let (m, n) = (a.len(), b.len());
    let cells = m * n;
    let k = m + n - 1;
    let mut best = f64::INFINITY;
    let mut pick = Vec::with_capacity(k);
    subsets(cells, k, 0, &mut pick, &mut |chosen| {
        if let Some(x) = solve_basis(a, b, chosen, n) {
            let c: f64 = chosen.iter().zip(&x).map(|(&cell, &v)| cost[cell] * v).sum();
            best = best.min(c);
        }
    });
    best
}

fn subsets(n: usize, k: usize, from: usize, pick: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    if pick.len() == k {
        visit(pick);
        return;
    }
    for c in from..n {
        if n - c < k - pick.len() {
            break;
        }
        pick.push(c);
        subsets(n, k, c + 1, pick, visit);
        pick.pop();
    }
}

/// Row and column constraints restricted to `chosen`, last column constraint
/// dropped (it is implied by equal totals). `None` if singular or infeasible.
fn solve_basis(a: &[f64], b: &[f64], chosen: &[usize], n: usize) -> Option<Vec<f64>> {
    let m = a.len();
    let k = chosen.len();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(k);
    for i in 0..m {
        let mut r: Vec<f64> = chosen.iter().map(|&c| f64::from(c / n == i)).collect();
        r.push(a[i]);
        rows.push(r);
    }
    for j in 0..n - 1 {
        let mut r: Vec<f64> = chosen.iter().map(|&c| f64::from(c % n == j)).collect();
        r.push(b[j]);
        rows.push(r);
    }
    for col in 0..k {
        let piv = (col..k).max_by(|&p, &q| rows[p][col].abs().total_cmp(&rows[q][col].abs()))?;
        if rows[piv][col].abs() < 1e-12 {
            return None;
        }
        rows.swap(col, piv);
        for r in 0..k {
            if r != col {
                let f = rows[r][col] / rows[col][col];
                if f != 0.0 {
                    for c in col..=k {
                        rows[r][c] -= f * rows[col][c];
                    }
                }
            }
        }
    }
    let x: Vec<f64> = (0..k).map(|r| rows[r][k] / rows[r][r]).collect();
    if x.iter().any(|&v| v < -1e-12) {
        return None;
    }
    let last: f64 = chosen.iter().zip(&x).filter(|(&c, _)| c % n == n - 1).map(|(_, v)| v).sum();
    if (last - b[n - 1]).abs() > 1e-9 {
        return None;
    }
    Some(x)
}

/// Hop distances from every node by breadth-first search over an edge list.
pub fn hop_distances(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    (0..n)
        .map(|s| {
            let mut d = vec![usize::MAX; n];
            d[s] = 0;
            let mut queue = std::collections::VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    if d[v] == usize::MAX {
                        d[v] = d[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
            d
        })
        .collect()
}

/// Smallest δ with (x|z)_w ≥ min((x|y)_w, (y|z)_w) − δ for all x, y, z, w.
pub fn gromov_delta(d: &[Vec<usize>]) -> f64 {
    let n = d.len();
    let gp = |x: usize, y: usize, w: usize| (d[x][w] + d[y][w]) as f64 / 2.0 - d[x][y] as f64 / 2.0;
    let mut delta: f64 = 0.0;
    for w in 0..n {
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    delta = delta.max(gp(x, y, w).min(gp(y, z, w)) - gp(x, z, w));
                }
            }
        }
    }
    delta
}

/// Parallelogram defect at `m` for the pair `b, c` seen from `a`.
pub fn defect(d: &[Vec<usize>], m: usize, b: usize, c: usize, a: usize) -> f64 {
    let f = |x: usize, y: usize| d[x][y] as f64;
    (f(a, m).powi(2) + f(b, c).powi(2) / 4.0 - (f(a, b).powi(2) + f(a, c).powi(2)) / 2.0) / (2.0 * f(a, m))
}

pub fn matvec(m: &[f64], x: &[f64]) -> Vec<f64> {
    let cols = x.len();
    m.chunks(cols).map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
}

/// Weights of a plain softmax over `Σ_d a_d q_d n_d`.
pub fn softmax_attention(q: &[f64], neighbors: &[Vec<f64>], a: &[f64]) -> Vec<f64> {
    if neighbors.len() == 1 {
        return vec![1.0];
    }
    let logits: Vec<f64> = neighbors
        .iter()
        .map(|nb| (0..q.len()).map(|k| a[k] * q[k] * nb[k]).sum())
        .collect();
    let top = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = logits.iter().map(|l| (l - top).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

pub struct FlatLayer<'a> {
    pub m: [&'a [f64]; 3],
    pub attn: &'a [f64],
    pub fuse_w: &'a [f64],
    pub fuse_b: &'a [f64],
    pub late: bool,
    pub max_pool: bool,
}

fn pool(xs: &[Vec<f64>], max: bool) -> Vec<f64> {
    let d = xs[0].len();
    (0..d)
        .map(|k| {
            if max {
                xs.iter().map(|x| x[k]).fold(f64::NEG_INFINITY, f64::max)
            } else {
                xs.iter().map(|x| x[k]).sum::<f64>() / xs.len() as f64
            }
        })
        .collect()
}

/// `M1 h + M2 fuse(e) + M3 Σ α_k n_k / Σ α_k` with ordinary linear algebra.
pub fn flat_aggregate(l: &FlatLayer, h: &[f64], edges: &[Vec<f64>], neighbors: &[Vec<f64>]) -> Vec<f64> {
    let mlp = |x: &[f64]| -> Vec<f64> {
        matvec(l.fuse_w, x).iter().zip(l.fuse_b).map(|(a, b)| (a + b).tanh()).collect()
    };
    let mut out = matvec(l.m[0], h);
    if !edges.is_empty() {
        let fused = if l.late {
            let mapped: Vec<Vec<f64>> = edges.iter().map(|e| mlp(e)).collect();
            pool(&mapped, l.max_pool)
        } else {
            mlp(&pool(edges, l.max_pool))
        };
        for (o, v) in out.iter_mut().zip(matvec(l.m[1], &fused)) {
            *o += v;
        }
    }
    if !neighbors.is_empty() {
        let alpha = softmax_attention(h, neighbors, l.attn);
        let total: f64 = alpha.iter().sum();
        let mut mean = vec![0.0; h.len()];
        for (w, nb) in alpha.iter().zip(neighbors) {
            for (m, v) in mean.iter_mut().zip(nb) {
                *m += w * v / total;
            }
        }
        for (o, v) in out.iter_mut().zip(matvec(l.m[2], &mean)) {
            *o += v;
        }
    }
    out
}
