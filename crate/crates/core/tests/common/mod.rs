//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use cubmp::filtration::BiFiltration;
use cubmp::BinaryGrid;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn linf(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

pub fn to_diagonal(a: (f64, f64)) -> f64 {
    (a.1 - a.0).abs() / 2.0
}

fn total(costs: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return costs.iter().copied().fold(0.0, f64::max);
    }
    costs.iter().map(|c| c.powf(p)).sum::<f64>().powf(1.0 / p)
}

/// Minimum over every partial injection `a -> b`; unmatched points on either
/// side go to the diagonal.
pub fn brute_force_wasserstein(a: &[(f64, f64)], b: &[(f64, f64)], p: f64) -> f64 {
    fn rec(
        i: usize,
        a: &[(f64, f64)],
        b: &[(f64, f64)],
        used: &mut Vec<bool>,
        costs: &mut Vec<f64>,
        p: f64,
        best: &mut f64,
    ) {
        if i == a.len() {
            let mut all = costs.clone();
            all.extend(
                b.iter()
                    .zip(used.iter())
                    .filter(|(_, &u)| !u)
                    .map(|(&y, _)| to_diagonal(y)),
            );
            *best = best.min(total(&all, p));
            return;
        }
        costs.push(to_diagonal(a[i]));
        rec(i + 1, a, b, used, costs, p, best);
        costs.pop();
        for j in 0..b.len() {
            if used[j] {
                continue;
            }
            used[j] = true;
            costs.push(linf(a[i], b[j]));
            rec(i + 1, a, b, used, costs, p, best);
            costs.pop();
            used[j] = false;
        }
    }
    let mut best = f64::INFINITY;
    rec(0, a, b, &mut vec![false; b.len()], &mut Vec::new(), p, &mut best);
    best
}

/// Finite bars on a half-integer lattice, so costs and their squares are
/// exact in floating point.
pub fn lattice_diagram<R: Rng + ?Sized>(rng: &mut R, max_points: usize) -> Vec<(f64, f64)> {
    let n = rng.gen_range(0..=max_points);
    (0..n)
        .map(|_| {
            let b = f64::from(rng.gen_range(0..20u32)) * 0.5;
            let len = f64::from(rng.gen_range(1..=10u32)) * 0.5;
            (b, b + len)
        })
        .collect()
}

pub fn real_diagram<R: Rng + ?Sized>(rng: &mut R, max_points: usize) -> Vec<(f64, f64)> {
    let n = rng.gen_range(0..=max_points);
    (0..n)
        .map(|_| {
            let b = rng.gen_range(-3.0..3.0);
            (b, b + rng.gen_range(0.0..4.0))
        })
        .collect()
}

/// `|a - n| / max(1, |a|, |n|)`.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / 1f64.max(analytic.abs()).max(numeric.abs())
}

/// True when `t` is within `margin` of a breakpoint of some tent.
pub fn near_kink(bars: &[(f64, f64)], t: f64, margin: f64) -> bool {
    bars.iter()
        .any(|&(b, d)| [b, d, 0.5 * (b + d)].iter().any(|k| (t - k).abs() < margin))
}

/// Largest relative error between the analytic partials of the weighted tent
/// vectorization and central differences with step `h`, over the samples
/// that are not near a kink. `None` if every sample was excluded.
pub fn perslay_gradient_error(bars: &[(f64, f64)], w: f64, samples: &[f64], h: f64, margin: f64) -> Option<f64> {
    use cubmp::vectorize::{perslay_gradients, perslay_vector};
    let g = perslay_gradients(bars, w, samples);
    let central = |plus: Vec<f64>, minus: Vec<f64>, j: usize| (plus[j] - minus[j]) / (2.0 * h);
    let mut worst: Option<f64> = None;
    let mut note = |e: f64| worst = Some(worst.map_or(e, |x: f64| x.max(e)));
    for (j, &t) in samples.iter().enumerate() {
        if near_kink(bars, t, margin) {
            continue;
        }
        for i in 0..bars.len() {
            let shifted = |db: f64, dd: f64| {
                let mut v = bars.to_vec();
                v[i] = (v[i].0 + db, v[i].1 + dd);
                perslay_vector(&v, w, samples)
            };
            note(relative_error(
                g.d_birth(j, i),
                central(shifted(h, 0.0), shifted(-h, 0.0), j),
            ));
            note(relative_error(
                g.d_death(j, i),
                central(shifted(0.0, h), shifted(0.0, -h), j),
            ));
        }
        let mut up = samples.to_vec();
        let mut down = samples.to_vec();
        up[j] += h;
        down[j] -= h;
        note(relative_error(
            g.d_samples[j],
            central(perslay_vector(bars, w, &up), perslay_vector(bars, w, &down), j),
        ));
        note(relative_error(
            g.d_weight_exponent[j],
            central(
                perslay_vector(bars, w + h, samples),
                perslay_vector(bars, w - h, samples),
                j,
            ),
        ));
    }
    worst
}

/// Runs the `cubmp` binary with `CUMPER_THREADS` set to `threads` (or unset).
pub fn cubmp(args: &[&str], threads: Option<usize>) -> std::process::Output {
    let mut cmd = std::process::Command::new(env!("CARGO_BIN_EXE_cubmp"));
    cmd.args(args).env_remove("CUMPER_THREADS");
    if let Some(t) = threads {
        cmd.env("CUMPER_THREADS", t.to_string());
    }
    cmd.output().expect("binary runs")
}

/// Writes a smooth-plus-noise RGB PNG and returns its path.
pub fn write_color_png(dir: &std::path::Path, name: &str, size: u32, seed: u64) -> std::path::PathBuf {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let img = image::RgbImage::from_fn(size, size, |x, y| {
        let base = |k: f64| 127.0 + 100.0 * ((x as f64 * 0.3 + k) + (y as f64 * 0.2 - k).cos()).sin();
        let noise = |rng: &mut ChaCha8Rng| rng.gen_range(-20.0..20.0);
        image::Rgb([
            (base(0.0) + noise(&mut rng)).clamp(0.0, 255.0) as u8,
            (base(1.0) + noise(&mut rng)).clamp(0.0, 255.0) as u8,
            (base(2.0) + noise(&mut rng)).clamp(0.0, 255.0) as u8,
        ])
    });
    let path = dir.join(name);
    img.save(&path).expect("png written");
    path
}

/// A monotone bifiltration from random per-pixel staircase boundaries.
pub fn random_bifiltration(rng: &mut ChaCha8Rng, rows: usize, cols: usize, h: usize, w: usize) -> BiFiltration {
    let entry: Vec<Vec<usize>> = (0..h * w)
        .map(|_| {
            let mut t: Vec<usize> = (0..rows).map(|_| rng.gen_range(0..=cols)).collect();
            t.sort_unstable_by(|a, b| b.cmp(a));
            t
        })
        .collect();
    BiFiltration::from_fn(rows, cols, |s, t| {
        BinaryGrid::from_fn(h, w, |r, c| t >= entry[r * w + c][s]).unwrap()
    })
    .unwrap()
}
