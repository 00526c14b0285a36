//! Reference computations that do not touch the library.
//!
//! `C^r` is the product `K × K` of the one-dimensional two-map Cantor set
//! `K = K/r ∪ ((r-1)/r + K/r)`, so the distance to `C^r` is the Euclidean norm
//! of the two one-dimensional distances, and areas reduce to a one-dimensional
//! Stieltjes integral over the length function of `K_t`.

#![allow(dead_code)]

/// Exact distance from `x` to `K`, up to floating-point rounding.
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

/// Length of the level-`j` gap of `K` (there are `2^(j-1)` of them).
fn gap(r: f64, j: i32) -> f64 {
    (1.0 - 2.0 / r) * r.powi(-(j - 1))
}

/// Number of gaps of `K` longer than `2t`.
fn wide_gaps(t: f64, r: f64) -> i32 {
    let mut j = 0;
    while j < 1000 && gap(r, j + 1) > 2.0 * t {
        j += 1;
    }
    j
}

/// `|K_t| = 1 + 2t - Σ_j 2^(j-1) max(0, g_j - 2t)`, rearranged as
/// `(2/r)^J + 2^(J+1)·t` with `J` the number of gaps longer than `2t`.
pub fn cantor_len(t: f64, r: f64) -> f64 {
    let j = wide_gaps(t, r);
    (2.0 / r).powi(j) + 2f64.powi(j + 1) * t
}

fn cantor_len_slope(t: f64, r: f64) -> f64 {
    2f64.powi(wide_gaps(t, r) + 1)
}

/// Gauss–Legendre nodes and weights on [-1, 1], 12 points.
const GL: [(f64, f64); 6] = [
    (0.125_233_408_511_468_9, 0.249_147_045_813_402_8),
    (0.367_831_498_998_180_2, 0.233_492_536_538_354_8),
    (0.587_317_954_286_617_4, 0.203_167_426_723_065_9),
    (0.769_902_674_194_304_7, 0.160_078_328_543_346_2),
    (0.904_117_256_370_474_9, 0.106_939_325_995_318_4),
    (0.981_560_634_246_719_3, 0.047_175_336_386_511_8),
];

/// `λ²(C^r_eps) = ∫_0^eps |K_√(eps²-s²)| d|K_s|`, evaluated with the
/// substitution `s = eps·sin θ` and Gauss–Legendre on every smooth piece.
pub fn semi_analytic_area(r: f64, eps: f64) -> f64 {
    let half = std::f64::consts::FRAC_PI_2;
    let mut cuts = vec![0.0, half];
    let mut j = 1;
    loop {
        let h = gap(r, j) / 2.0;
        if h < 1e-200 * eps || j > 1000 {
            break;
        }
        if h < eps {
            let t = (h / eps).asin();
            cuts.push(t);
            cuts.push(half - t);
        }
        j += 1;
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let integrand = |theta: f64| {
        let (s, c) = theta.sin_cos();
        cantor_len(eps * c, r) * cantor_len_slope(eps * s, r) * eps * c
    };
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
        for &(x, wt) in &GL {
            total += h * wt * (integrand(m - h * x) + integrand(m + h * x));
        }
    }
    total
}

/// All corners of the level-`n` construction squares, enumerated from the
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
    ends.iter()
        .flat_map(|&x| ends.iter().map(move |&y| [x, y]))
        .collect()
}

pub fn brute_force_distance(p: [f64; 2], corners: &[[f64; 2]]) -> f64 {
    corners
        .iter()
        .map(|c| (p[0] - c[0]).hypot(p[1] - c[1]))
        .fold(f64::INFINITY, f64::min)
}
