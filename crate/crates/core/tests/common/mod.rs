//! Reference implementations used as oracles by the integration tests.
//! Written naively on purpose; none of them share code with the library.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use rand::Rng;

pub fn fixture_manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/coronavirus/manifest.json")
}

/// Rank by counting: 1 + #smaller + (#equal - 1) / 2.
pub fn counting_ranks(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|x| {
            let less = v.iter().filter(|y| *y < x).count() as f64;
            let equal = v.iter().filter(|y| *y == x).count() as f64;
            1.0 + less + (equal - 1.0) / 2.0
        })
        .collect()
}

/// Textbook Pearson with explicit means.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

pub fn brute_spearman(x: &[f64], y: &[f64]) -> f64 {
    pearson(&counting_ranks(x), &counting_ranks(y))
}

/// 1 - 6 Σd² / (n(n² - 1)); only valid without ties.
pub fn closed_form_spearman(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (counting_ranks(x), counting_ranks(y));
    let n = x.len() as f64;
    let d2: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - b).powi(2)).sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}

fn non_constant(v: &[f64]) -> bool {
    v.iter().any(|x| *x != v[0])
}

/// A random pair of equal length in 3..=200. With `ties`, values are drawn
/// from a handful of levels so repeats are common.
pub fn random_pair(rng: &mut impl Rng, ties: bool) -> (Vec<f64>, Vec<f64>) {
    let n = rng.gen_range(3..=200);
    loop {
        let mut draw = || -> Vec<f64> {
            if ties {
                let levels = rng.gen_range(2..=6);
                (0..n)
                    .map(|_| rng.gen_range(0..levels) as f64 * 12.5)
                    .collect()
            } else {
                // distinct by construction: shuffled 0..n plus a small jitter
                let mut v: Vec<f64> = (0..n).map(|i| i as f64 + rng.gen_range(0.0..0.5)).collect();
                for i in (1..n).rev() {
                    v.swap(i, rng.gen_range(0..=i));
                }
                v
            }
        };
        let (x, y) = (draw(), draw());
        if non_constant(&x) && non_constant(&y) {
            return (x, y);
        }
    }
}

pub type EdgeSet = BTreeSet<(usize, usize)>;

/// Decode a Prüfer sequence over nodes 0..n into an edge set.
pub fn prufer_decode(seq: &[usize], n: usize) -> EdgeSet {
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = EdgeSet::new();
    for &s in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
        edges.insert((leaf.min(s), leaf.max(s)));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.insert((rest[0], rest[1]));
    edges
}

/// Every labelled tree on `n >= 2` nodes, one per Prüfer sequence.
pub fn all_trees(n: usize) -> Vec<EdgeSet> {
    let len = n - 2;
    let total = n.pow(len as u32);
    (0..total)
        .map(|mut code| {
            let seq: Vec<usize> = (0..len)
                .map(|_| {
                    let d = code % n;
                    code /= n;
                    d
                })
                .collect();
            prufer_decode(&seq, n)
        })
        .collect()
}

/// Heaviest tree by exhaustive search; weights indexed `w[i][j]`.
pub fn brute_max_tree(trees: &[EdgeSet], w: &[Vec<f64>]) -> EdgeSet {
    trees
        .iter()
        .max_by(|a, b| {
            let sa: f64 = a.iter().map(|&(i, j)| w[i][j]).sum();
            let sb: f64 = b.iter().map(|&(i, j)| w[i][j]).sum();
            sa.total_cmp(&sb)
        })
        .unwrap()
        .clone()
}

/// Symmetric weights in [-1, 1] with every off-diagonal value distinct.
pub fn distinct_weights(rng: &mut impl Rng, n: usize) -> Vec<Vec<f64>> {
    let m = n * (n - 1) / 2;
    // distinct grid points, shuffled, then spread over [-1, 1]
    let mut pool: Vec<f64> = (0..m)
        .map(|k| -1.0 + 2.0 * (k as f64 + 0.5) / m as f64)
        .collect();
    for i in (1..m).rev() {
        pool.swap(i, rng.gen_range(0..=i));
    }
    let mut w = vec![vec![1.0; n]; n];
    let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
    for ((i, j), v) in pairs.zip(pool) {
        w[i][j] = v;
        w[j][i] = v;
    }
    w
}

/// Count `needle` occurrences in an SVG document.
pub fn count(svg: &str, needle: &str) -> usize {
    svg.matches(needle).count()
}

/// Vertex count of the first `<polyline>` in an SVG document.
pub fn polyline_vertices(svg: &str) -> usize {
    let start = svg.find("<polyline").expect("has a polyline");
    let rest = &svg[start..];
    let p = rest.find("points=\"").unwrap() + 8;
    let end = rest[p..].find('"').unwrap();
    rest[p..p + end].split_whitespace().count()
}
