//! Reference computations written against plain edge lists, sharing no code
//! with the library paths they check.

#![allow(dead_code)]

/// Cut weight by scanning raw `(u, v, w)` tuples.
pub fn brute_cut(edges: &[(usize, usize, f64)], side: &[bool]) -> f64 {
    let mut total = 0.0;
    for &(u, v, w) in edges {
        if side[u] ^ side[v] {
            total += w;
        }
    }
    total
}

/// Maximum cut by enumerating every subset.
pub fn brute_max_cut(n: usize, edges: &[(usize, usize, f64)]) -> f64 {
    let mut best = 0.0f64;
    let mut side = vec![false; n];
    for mask in 0u64..(1u64 << n) {
        for (u, s) in side.iter_mut().enumerate() {
            *s = mask >> u & 1 == 1;
        }
        best = best.max(brute_cut(edges, &side));
    }
    best
}

/// Effective resistances by grounding one node per component and inverting
/// the reduced Laplacian with Gauss–Jordan elimination.
pub fn grounded_resistances(n: usize, edges: &[(usize, usize, f64)]) -> Vec<f64> {
    // Component labels by repeated relaxation.
    let mut comp: Vec<usize> = (0..n).collect();
    loop {
        let mut changed = false;
        for &(u, v, _) in edges {
            let m = comp[u].min(comp[v]);
            if comp[u] != m || comp[v] != m {
                comp[u] = m;
                comp[v] = m;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    // Every node whose label equals itself is a component root; ground it.
    let mut index = vec![usize::MAX; n];
    let mut k = 0;
    for x in 0..n {
        if comp[x] != x {
            index[x] = k;
            k += 1;
        }
    }
    let mut l = vec![vec![0.0f64; k]; k];
    for &(u, v, w) in edges {
        let (iu, iv) = (index[u], index[v]);
        if iu != usize::MAX {
            l[iu][iu] += w;
        }
        if iv != usize::MAX {
            l[iv][iv] += w;
        }
        if iu != usize::MAX && iv != usize::MAX {
            l[iu][iv] -= w;
            l[iv][iu] -= w;
        }
    }
    let inv = invert(l);
    let entry = |a: usize, b: usize| -> f64 {
        if index[a] == usize::MAX || index[b] == usize::MAX {
            0.0
        } else {
            inv[index[a]][index[b]]
        }
    };
    edges
        .iter()
        .map(|&(u, v, _)| entry(u, u) + entry(v, v) - 2.0 * entry(u, v))
        .collect()
}

fn invert(mut a: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let k = a.len();
    let mut inv: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        assert!(p.abs() > 1e-14, "singular grounded Laplacian");
        for j in 0..k {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for r in 0..k {
            if r != col && a[r][col] != 0.0 {
                let f = a[r][col];
                for j in 0..k {
                    a[r][j] -= f * a[col][j];
                    inv[r][j] -= f * inv[col][j];
                }
            }
        }
    }
    inv
}

/// Number of connected components counting isolated nodes.
pub fn component_count(n: usize, edges: &[(usize, usize, f64)]) -> usize {
    let mut seen = vec![false; n];
    let mut adj = vec![Vec::new(); n];
    for &(u, v, _) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut count = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    count
}
