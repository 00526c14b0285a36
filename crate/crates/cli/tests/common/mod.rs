//! Test-only reference geometry, independent of the library.

#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

/// Distance from `x` to the one-dimensional Cantor set `K` with
/// `K = K/r ∪ ((r-1)/r + K/r)`; `C^r = K × K`.
pub fn cantor_distance_1d(x: f64, r: f64) -> f64 {
    if x <= 0.0 {
        return -x;
    }
    if x >= 1.0 {
        return x - 1.0;
    }
    let (a, b) = (1.0 / r, 1.0 - 1.0 / r);
    let (mut x, mut scale) = (x, 1.0);
    for _ in 0..80 {
        if x <= a {
            x *= r;
        } else if x >= b {
            x = (x - b) * r;
        } else {
            return scale * (x - a).min(b - x);
        }
        scale /= r;
    }
    0.0
}

pub fn product_distance(p: [f64; 2], r: f64) -> f64 {
    cantor_distance_1d(p[0], r).hypot(cantor_distance_1d(p[1], r))
}

/// Corners of all level-`n` construction squares, built from the
/// one-dimensional level-`n` intervals.
pub fn level_corners(r: f64, n: u32) -> Vec<[f64; 2]> {
    let mut starts = vec![0.0f64];
    let mut len = 1.0;
    for _ in 0..n {
        let child = len / r;
        starts = starts.iter().flat_map(|&a| [a, a + len - child]).collect();
        len = child;
    }
    let ends: Vec<f64> = starts.iter().flat_map(|&a| [a, a + len]).collect();
    ends.iter().flat_map(|&x| ends.iter().map(move |&y| [x, y])).collect()
}

pub fn dustlab(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dustlab"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

/// Parses the first `[lo, hi]` pair in `text`.
pub fn parse_interval(text: &str) -> Option<(f64, f64)> {
    let start = text.find('[')?;
    let end = start + text[start..].find(']')?;
    let (lo, hi) = text[start + 1..end].split_once(',')?;
    Some((lo.trim().parse().ok()?, hi.trim().parse().ok()?))
}
