//! Small enumeration helpers: subsets, permutations, set partitions.

use alloc::vec;
use alloc::vec::Vec;

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Complement of a sorted subset of `0..n`.
pub fn complement(n: usize, subset: &[usize]) -> Vec<usize> {
    let mut mark = vec![false; n];
    for &i in subset {
        mark[i] = true;
    }
    (0..n).filter(|&i| !mark[i]).collect()
}

/// All permutations of `0..n` (Heap's algorithm order is irrelevant to callers).
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    permute(&mut cur, 0, &mut out);
    out
}

fn permute(cur: &mut Vec<usize>, start: usize, out: &mut Vec<Vec<usize>>) {
    if start >= cur.len() {
        out.push(cur.clone());
        return;
    }
    for i in start..cur.len() {
        cur.swap(start, i);
        permute(cur, start + 1, out);
        cur.swap(start, i);
    }
}

/// Unordered set partitions of `0..n`, each given as blocks ordered by their
/// smallest element with ascending entries.
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
        return out;
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    partition_rec(0, n, &mut blocks, &mut out);
    out
}

fn partition_rec(i: usize, n: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
    if i == n {
        out.push(blocks.clone());
        return;
    }
    for b in 0..blocks.len() {
        blocks[b].push(i);
        partition_rec(i + 1, n, blocks, out);
        blocks[b].pop();
    }
    blocks.push(vec![i]);
    partition_rec(i + 1, n, blocks, out);
    blocks.pop();
}
