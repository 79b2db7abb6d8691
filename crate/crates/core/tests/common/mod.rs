//! Reference computations written against the textbook definitions only.
#![allow(dead_code)]

use std::collections::BTreeMap;

use fermifold::fock::{GenKind, Generator};
use fermifold::opalg::{scalar_to_c64, OperatorExpr};
use fermifold::Complex64;

/// Every mode-count vector with at most `per_sector` modes in each sector,
/// at most `max_total` overall and at least one mode.
pub fn all_configs(per_sector: usize, max_total: usize) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..=per_sector {
        for b in 0..=per_sector {
            for c in 0..=per_sector {
                for d in 0..=per_sector {
                    let n = [a, b, c, d];
                    let k: usize = n.iter().sum();
                    if k > 0 && k <= max_total {
                        out.push(n);
                    }
                }
            }
        }
    }
    out
}

/// Jordan–Wigner image of one basis column.
///
/// Modes are laid out sector by sector, serials ascending, the first mode
/// in the most significant bit. Only earlier modes of the same sector
/// contribute a parity factor.
pub fn jw_column(
    counts: [usize; 4],
    sector: usize,
    serial: usize,
    create: bool,
    col: usize,
) -> Option<(usize, i8)> {
    let k: usize = counts.iter().sum();
    let start: usize = counts[..sector].iter().sum();
    let bit_of = |pos: usize| 1usize << (k - 1 - pos);
    let target = bit_of(start + serial - 1);
    let occupied = col & target != 0;
    if occupied == create {
        return None;
    }
    let mut sign = 1i8;
    for pos in start..start + serial - 1 {
        if col & bit_of(pos) != 0 {
            sign = -sign;
        }
    }
    Some((col ^ target, sign))
}

pub fn jw_apply(counts: [usize; 4], g: &Generator, col: usize) -> Option<(usize, i8)> {
    jw_column(
        counts,
        g.mode.sector.index(),
        g.mode.serial,
        g.kind == GenKind::Create,
        col,
    )
}

/// Dense matrix of an operator expression, stored column by column.
pub fn expr_columns(counts: [usize; 4], e: &OperatorExpr) -> Vec<BTreeMap<usize, Complex64>> {
    let dim = 1usize << counts.iter().sum::<usize>();
    (0..dim)
        .map(|col| {
            let mut out: BTreeMap<usize, Complex64> = BTreeMap::new();
            'terms: for t in e.terms() {
                let mut state = col;
                let mut sign = 1i8;
                for g in t.gens.iter().rev() {
                    match jw_apply(counts, g, state) {
                        Some((next, s)) => {
                            state = next;
                            sign *= s;
                        }
                        None => continue 'terms,
                    }
                }
                *out.entry(state).or_default() += scalar_to_c64(&t.scalar) * f64::from(sign);
            }
            out
        })
        .collect()
}

pub fn max_column_diff(a: &[BTreeMap<usize, Complex64>], b: &[BTreeMap<usize, Complex64>]) -> f64 {
    let mut worst = 0.0f64;
    for (ca, cb) in a.iter().zip(b) {
        for (row, v) in ca {
            worst = worst.max((v - cb.get(row).copied().unwrap_or_default()).norm());
        }
        for (row, v) in cb {
            if !ca.contains_key(row) {
                worst = worst.max(v.norm());
            }
        }
    }
    worst
}

/// `γ⁰ = diag(1, 1, −1, −1)` in the Dirac representation.
pub fn dirac_bar(a: &[Complex64; 4], b: &[Complex64; 4]) -> Complex64 {
    let g0 = [1.0, 1.0, -1.0, -1.0];
    (0..4).map(|i| a[i].conj() * b[i] * g0[i]).sum()
}

/// All permutations of `0..n` with their signs, by Heap's algorithm.
pub fn signed_permutations(n: usize) -> Vec<(f64, Vec<usize>)> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut c = vec![0; n];
    let mut sign = 1.0;
    let mut out = vec![(sign, p.clone())];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            sign = -sign;
            out.push((sign, p.clone()));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}
