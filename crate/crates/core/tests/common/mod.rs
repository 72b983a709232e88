//! Independent brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use schurprod::linkfn::LinkValue;
use schurprod::partitions::Partition;
use schurprod::{LinkFunction, Symbol, Word};

/// Calls `f` on every tuple of `[1,n]^k`.
pub fn for_each_tuple(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut idx = vec![1usize; k];
    loop {
        f(&idx);
        let mut u = k;
        loop {
            if u == 0 {
                return;
            }
            u -= 1;
            idx[u] += 1;
            if idx[u] <= n {
                break;
            }
            idx[u] = 1;
        }
    }
}

fn edge_values(link: &LinkFunction, w: &Word, idx: &[usize]) -> Vec<LinkValue> {
    let k = idx.len();
    (0..k)
        .map(|u| {
            let (a, b) = (idx[u], idx[(u + 1) % k]);
            match w.symbols()[u] {
                Symbol::Plain => link.eval(a, b),
                Symbol::Star => link.eval(b, a),
            }
        })
        .collect()
}

pub fn induced(link: &LinkFunction, w: &Word, idx: &[usize]) -> Partition {
    Partition::from_labels(&edge_values(link, w, idx))
}

/// Tally of `(induced X partition, induced Y partition)` over all of `[n]^k`.
pub fn naive_tally(lx: &LinkFunction, ly: &LinkFunction, w: &Word, n: usize) -> HashMap<(Partition, Partition), u128> {
    let mut tally = HashMap::new();
    for_each_tuple(n, w.len(), |idx| {
        *tally.entry((induced(lx, w, idx), induced(ly, w, idx))).or_insert(0) += 1;
    });
    tally
}

// `fine ≤ coarse` checked pairwise on labels
fn coarser_or_equal(fine: &Partition, coarse: &Partition) -> bool {
    let (lf, lc) = (fine.labels(), coarse.labels());
    (0..lf.len()).all(|u| (0..lf.len()).all(|v| lf[u] != lf[v] || lc[u] == lc[v]))
}

/// Tuples whose edge values satisfy the equalities of `pi_x` and `pi_y`.
pub fn naive_closure(lx: &LinkFunction, ly: &LinkFunction, w: &Word, pi_x: &Partition, pi_y: &Partition, n: usize) -> u128 {
    let mut count = 0;
    for_each_tuple(n, w.len(), |idx| {
        if coarser_or_equal(pi_x, &induced(lx, w, idx)) && coarser_or_equal(pi_y, &induced(ly, w, idx)) {
            count += 1;
        }
    });
    count
}

/// All pair partitions of `[k]` as lists of pairs, by pairing the smallest free element.
pub fn brute_pairings(k: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(free: Vec<usize>, acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if free.is_empty() {
            out.push(acc.clone());
            return;
        }
        let a = free[0];
        for t in 1..free.len() {
            let b = free[t];
            let rest: Vec<usize> = free.iter().copied().filter(|&x| x != a && x != b).collect();
            acc.push((a, b));
            rec(rest, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    if k.is_multiple_of(2) {
        rec((1..=k).collect(), &mut Vec::new(), &mut out);
    }
    out
}

/// Pairings with no `a < c < b < d` pattern.
pub fn brute_nc2(k: usize) -> Vec<Vec<(usize, usize)>> {
    brute_pairings(k)
        .into_iter()
        .filter(|p| {
            p.iter().all(|&(a, b)| p.iter().all(|&(c, d)| !(a < c && c < b && b < d)))
        })
        .collect()
}

/// Σ over NC₂ of Π (1 − δ_{ε_r, ε_s}).
pub fn brute_circular_moment(w: &Word) -> u64 {
    let s = w.symbols();
    brute_nc2(w.len())
        .iter()
        .filter(|p| p.iter().all(|&(a, b)| s[a - 1] != s[b - 1]))
        .count() as u64
}

pub fn p(s: &str) -> Partition {
    s.parse().unwrap()
}

pub fn w(s: &str) -> Word {
    s.parse().unwrap()
}
