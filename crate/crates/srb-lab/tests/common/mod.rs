//! Definitional reimplementations used as oracles. Everything here scans
//! all index pairs directly from the definitions, with none of the stack
//! or frontier bookkeeping the library uses, so agreement is evidence.

#![allow(dead_code)]

use srb_lab::orbit::Segment;

/// Pliss times by the definition: i such that the drift S_i - rate * i
/// is at least the drift at every earlier index. Quadratic scan.
pub fn brute_pliss_times(sums: &[f64], rate: f64) -> Vec<usize> {
    let drift = |i: usize| sums[i] - rate * i as f64;
    (0..sums.len())
        .filter(|&i| (0..=i).all(|j| drift(i) >= drift(j)))
        .collect()
}

fn brute_is_neutral(sums: &[f64], t: usize, t_prime: usize, alpha: f64) -> bool {
    (t + 1..=t_prime).all(|i| sums[i] - sums[t] <= alpha * (i - t) as f64)
}

/// Maximal alpha-neutral segments by enumeration: list every neutral
/// [t, t'), drop any contained in a longer neutral one, sort by start.
pub fn brute_maximal_neutral(sums: &[f64], alpha: f64) -> Vec<Segment> {
    let n = sums.len() - 1;
    let mut neutral = Vec::new();
    for t in 0..n {
        for t_prime in t + 1..=n {
            if brute_is_neutral(sums, t, t_prime, alpha) {
                neutral.push((t, t_prime));
            }
        }
    }
    let mut out: Vec<Segment> = neutral
        .iter()
        .filter(|&&(a, b)| {
            !neutral.iter().any(|&(c, d)| (c, d) != (a, b) && c <= a && b <= d)
        })
        .map(|&(a, b)| Segment { start: a, end: b })
        .collect();
    out.sort_by_key(|s| s.start);
    out
}

/// The five observable values every synthetic sequence draws from.
pub const PHI_GRID: [f64; 5] = [-1.0, -0.25, 0.0, 0.25, 1.0];

/// Visit every length-`len` sequence over PHI_GRID, passing its partial
/// sums (S_0 = 0 included) to the callback.
pub fn for_each_grid_sequence(len: usize, mut visit: impl FnMut(&[f64])) {
    let mut digits = vec![0usize; len];
    let mut sums = vec![0.0f64; len + 1];
    loop {
        for i in 0..len {
            sums[i + 1] = sums[i] + PHI_GRID[digits[i]];
        }
        visit(&sums);
        let mut carry = 0;
        loop {
            if carry == len {
                return;
            }
            digits[carry] += 1;
            if digits[carry] < PHI_GRID.len() {
                break;
            }
            digits[carry] = 0;
            carry += 1;
        }
    }
}

/// Partial sums of a phi sequence, S_0 = 0 first.
pub fn sums_of(phi: &[f64]) -> Vec<f64> {
    let mut sums = Vec::with_capacity(phi.len() + 1);
    let mut acc = 0.0;
    sums.push(acc);
    for &p in phi {
        acc += p;
        sums.push(acc);
    }
    sums
}
