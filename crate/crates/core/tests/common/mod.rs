//! Random instances for the integration suites, drawn from a seed so that
//! proptest cases are reproducible from the printed seed.

#![allow(dead_code)]

use kgframes::harness::TrialRng;
use kgframes::{AdjOp, AlgElem, CMatrix, GFrameFamily, ModuleVec, C64};

pub fn rng(seed: u64) -> TrialRng {
    TrialRng::new(seed, 0)
}

pub fn alg(r: &mut TrialRng, d: usize) -> AlgElem {
    AlgElem::new(r.ginibre(d, d)).unwrap()
}

pub fn vector(r: &mut TrialRng, d: usize, n: usize) -> ModuleVec {
    ModuleVec::from_block_row(d, r.ginibre(d, n * d)).unwrap()
}

pub fn op(r: &mut TrialRng, d: usize, n: usize, m: usize) -> AdjOp {
    AdjOp::new(d, n, m, r.ginibre(n * d, m * d)).unwrap()
}

/// Operator whose representing matrix has rank at most `rank`.
pub fn low_rank(r: &mut TrialRng, d: usize, n: usize, m: usize, rank: usize) -> AdjOp {
    let left = r.ginibre(n * d, rank);
    let right = r.ginibre(rank, m * d);
    AdjOp::new(d, n, m, left.matmul(&right)).unwrap()
}

/// Full-rank or rank-deficient with equal odds.
pub fn maybe_deficient(r: &mut TrialRng, d: usize, n: usize, m: usize) -> AdjOp {
    if r.coin() {
        let full = (n * d).min(m * d);
        let rank = r.index(0, full.saturating_sub(1));
        low_rank(r, d, n, m, rank)
    } else {
        op(r, d, n, m)
    }
}

pub fn weights(r: &mut TrialRng, atoms: usize) -> Vec<f64> {
    (0..atoms).map(|_| r.uniform_in(0.25, 2.0)).collect()
}

pub fn family(r: &mut TrialRng, d: usize, n: usize, dst_lens: &[usize]) -> GFrameFamily {
    let w = weights(r, dst_lens.len());
    let members = dst_lens.iter().map(|&m| op(r, d, n, m)).collect();
    GFrameFamily::from_weights(w, members).unwrap()
}

/// Random destination lengths with `Σ m ≥ n`, so the frame operator is
/// generically invertible.
pub fn spanning_lens(r: &mut TrialRng, n: usize) -> Vec<usize> {
    let mut lens = Vec::new();
    while lens.iter().sum::<usize>() < n || lens.is_empty() {
        lens.push(r.index(1, 3));
    }
    lens
}

pub fn spanning_family(r: &mut TrialRng, d: usize, n: usize) -> GFrameFamily {
    let lens = spanning_lens(r, n);
    family(r, d, n, &lens)
}

/// Family whose frame operator has a nontrivial kernel with probability 1/2.
pub fn family_maybe_deficient(r: &mut TrialRng, d: usize, n: usize) -> GFrameFamily {
    let deficient = r.coin() && n > 1;
    let lens = if deficient {
        vec![1; r.index(1, n - 1)]
    } else {
        spanning_lens(r, n)
    };
    family(r, d, n, &lens)
}

/// `max_ij |a_ij - b_ij|`, relative to `max(1, max|b|)`.
pub fn rel_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.max_abs_diff(b) / b.max_abs().max(1.0)
}

pub fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}
