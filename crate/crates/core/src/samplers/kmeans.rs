use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Method, ScoreVector};
use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::Scalar;

const MAX_LLOYD_ITERS: usize = 25;
const INERTIA_RTOL: f64 = 1e-4;

fn sq_dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y))
}

fn nearest<T: Scalar>(point: &[T], centers: &[Vec<T>]) -> (usize, T) {
    let mut best = (0, T::infinity());
    for (j, c) in centers.iter().enumerate() {
        let d = sq_dist(point, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

fn kmeans_plus_plus<T: Scalar>(points: &Matrix<T>, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<T>> {
    let n = points.nrows();
    let mut centers = vec![points.row(rng.random_range(0..n)).to_vec()];
    let mut d2: Vec<f64> = points.rows().map(|p| sq_dist(p, &centers[0]).as_f64()).collect();
    while centers.len() < k {
        let next = match WeightedIndex::new(&d2) {
            Ok(dist) => dist.sample(rng),
            // Every point already coincides with a center.
            Err(_) => rng.random_range(0..n),
        };
        let c = points.row(next).to_vec();
        for (dist, p) in d2.iter_mut().zip(points.rows()) {
            *dist = dist.min(sq_dist(p, &c).as_f64());
        }
        centers.push(c);
    }
    centers
}

/// Lloyd iterations from k-means++ seeds; empty clusters keep their center.
fn lloyd<T: Scalar>(points: &Matrix<T>, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<T>> {
    let d = points.ncols();
    let mut centers = kmeans_plus_plus(points, k, rng);
    let mut prev_inertia: Option<T> = None;
    for _ in 0..MAX_LLOYD_ITERS {
        let mut sums = vec![vec![T::zero(); d]; k];
        let mut counts = vec![0usize; k];
        let mut inertia = T::zero();
        for p in points.rows() {
            let (j, dist) = nearest(p, &centers);
            inertia += dist;
            counts[j] += 1;
            for (s, &v) in sums[j].iter_mut().zip(p) {
                *s += v;
            }
        }
        for j in 0..k {
            if counts[j] > 0 {
                let c = T::of(counts[j] as f64);
                centers[j] = sums[j].iter().map(|&s| s / c).collect();
            }
        }
        if let Some(prev) = prev_inertia {
            if prev == T::zero() || (prev - inertia).abs() <= T::of(INERTIA_RTOL) * prev {
                break;
            }
        }
        prev_inertia = Some(inertia);
    }
    centers
}

/// Sensitivity upper bound from a k-means clustering of `Z_i = y_i x_i`:
///
/// ```text
/// s_i = n / (1 + Σ_j |G_j^{(-i)}| exp(-R ‖Ḡ_j^{(-i)} - Z_i‖))
/// ```
///
/// Centers come from k-means++ and Lloyd iterations on a seeded uniform
/// subsample of `cluster_subsample` rows; every row is then assigned to its
/// nearest center. For row `i`'s own cluster the count and mean exclude
/// `Z_i`; a cluster emptied by the exclusion contributes nothing.
pub fn scores_kmeans<T: Scalar>(
    ds: &LabeledDataset<T>,
    k: usize,
    radius: f64,
    cluster_subsample: usize,
    seed: u64,
) -> Result<ScoreVector<T>> {
    let n = ds.n();
    if k == 0 || k > n {
        return Err(Error::Config(format!("kmeans needs 1 <= k <= n, got k={k}, n={n}")));
    }
    if !(radius > 0.0) {
        return Err(Error::Config(format!("kmeans radius must be positive, got {radius}")));
    }
    let sub = cluster_subsample.min(n);
    if sub < k {
        return Err(Error::Config(format!("cluster subsample of {sub} rows is smaller than k={k}")));
    }

    let signs: Vec<T> = ds.y().iter().map(|&y| if y > 0 { T::one() } else { -T::one() }).collect();
    let z = ds.x().scale_rows(&signs);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked = rand::seq::index::sample(&mut rng, n, sub).into_vec();
    let centers = lloyd(&z.select_rows(&picked), k, &mut rng);

    let d = z.ncols();
    let assignment: Vec<usize> = z.rows().map(|p| nearest(p, &centers).0).collect();
    let mut sums = vec![vec![T::zero(); d]; k];
    let mut counts = vec![0usize; k];
    for (p, &j) in z.rows().zip(&assignment) {
        counts[j] += 1;
        for (s, &v) in sums[j].iter_mut().zip(p) {
            *s += v;
        }
    }

    let r = T::of(radius);
    let nn = T::of(n as f64);
    let mut mean = vec![T::zero(); d];
    let scores = z
        .rows()
        .zip(&assignment)
        .map(|(zi, &own)| {
            let mut total = T::zero();
            for j in 0..k {
                let (count, excluded) = if j == own { (counts[j] - 1, true) } else { (counts[j], false) };
                if count == 0 {
                    continue;
                }
                let c = T::of(count as f64);
                for ((m, &s), &v) in mean.iter_mut().zip(&sums[j]).zip(zi) {
                    *m = if excluded { (s - v) / c } else { s / c };
                }
                total += c * (-r * sq_dist(&mean, zi).sqrt()).exp();
            }
            nn / (T::one() + total)
        })
        .collect();
    ScoreVector::new(scores, Method::Kmeans)
}
