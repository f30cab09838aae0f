//! Multi-index enumeration and multinomial coefficients.

use num_bigint::BigUint;
use num_traits::One;

/// All `α ∈ ℕ₀^d` with `|α| = n`, in lexicographically decreasing order
/// (`(n,0,…,0)` first).
pub fn compositions(n: u32, d: usize) -> Compositions {
    Compositions { next: (d > 0).then(|| first(n, d)) }
}

fn first(n: u32, d: usize) -> Vec<u32> {
    let mut v = vec![0; d];
    v[0] = n;
    v
}

/// Iterator returned by [`compositions`].
pub struct Compositions {
    next: Option<Vec<u32>>,
}

impl Iterator for Compositions {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let cur = self.next.take()?;
        let d = cur.len();
        // Find the rightmost position (excluding the last) holding a positive
        // entry, move one unit right and sweep the tail into that slot.
        let mut succ = cur.clone();
        let mut k = d.saturating_sub(1);
        while k > 0 {
            k -= 1;
            if succ[k] > 0 {
                succ[k] -= 1;
                let tail: u32 = succ[k + 1..].iter().sum::<u32>() + 1;
                for x in succ[k + 1..].iter_mut() {
                    *x = 0;
                }
                succ[k + 1] = tail;
                self.next = Some(succ);
                return Some(cur);
            }
        }
        Some(cur)
    }
}

/// Number of compositions of `n` into `d` parts, `C(n+d−1, d−1)`.
pub fn composition_count(n: u32, d: usize) -> BigUint {
    if d == 0 {
        return if n == 0 { BigUint::one() } else { BigUint::default() };
    }
    binomial(n as u64 + d as u64 - 1, d as u64 - 1)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::default();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `n! / (α₁!⋯α_d!)` with `n = |α|`.
pub fn multinomial(alpha: &[u32]) -> BigUint {
    let mut acc = BigUint::one();
    let mut total = 0u64;
    for &a in alpha {
        for i in 1..=a as u64 {
            total += 1;
            acc = acc * BigUint::from(total) / BigUint::from(i);
        }
    }
    acc
}

/// `Σ_{|α|=n, α ∈ ℕ₀^d} C(n,α)²`, the `2n`-th moment of `|z₁+⋯+z_d|`.
///
/// Summed over partitions of `n` with at most `d` parts, each weighted by the
/// number of distinct arrangements, so the cost does not grow with `d`.
pub fn equal_moment(d: usize, n: u32) -> BigUint {
    let mut total = BigUint::default();
    let mut parts = Vec::new();
    partitions(n, n, d, &mut parts, &mut |lam| {
        let m = multinomial(lam);
        total += &m * &m * arrangements(lam, d);
    });
    total
}

/// Number of ways to place the multiset `lam` (plus `d − len` zeros) into `d`
/// ordered slots.
fn arrangements(lam: &[u32], d: usize) -> BigUint {
    let mut counts: Vec<u64> = Vec::new();
    let mut prev = None;
    for &x in lam {
        if prev == Some(x) {
            *counts.last_mut().unwrap() += 1;
        } else {
            counts.push(1);
            prev = Some(x);
        }
    }
    counts.push((d - lam.len()) as u64);
    let mut acc = BigUint::one();
    let mut placed = 0u64;
    for c in counts {
        acc *= binomial(placed + c, c);
        placed += c;
    }
    acc
}

fn partitions(n: u32, max: u32, slots: usize, parts: &mut Vec<u32>, visit: &mut impl FnMut(&[u32])) {
    if n == 0 {
        visit(parts);
        return;
    }
    if slots == 0 {
        return;
    }
    for k in (1..=max.min(n)).rev() {
        parts.push(k);
        partitions(n - k, k, slots - 1, parts, visit);
        parts.pop();
    }
}
