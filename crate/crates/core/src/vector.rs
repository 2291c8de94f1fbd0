//! Small dense-vector helpers. Points are plain `Vec<f64>` / `&[f64]`.

pub type Point = Vec<f64>;

pub fn sub(a: &[f64], b: &[f64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Point {
    a.iter().map(|x| x * s).collect()
}

/// `a + t * dir`
pub fn along(a: &[f64], dir: &[f64], t: f64) -> Point {
    a.iter().zip(dir).map(|(x, d)| x + t * d).collect()
}

/// Writes `a + t * dir` into `out` without allocating.
pub fn along_into(out: &mut [f64], a: &[f64], dir: &[f64], t: f64) {
    for ((o, x), d) in out.iter_mut().zip(a).zip(dir) {
        *o = x + t * d;
    }
}

/// `a + s (b - a)`
pub fn lerp(a: &[f64], b: &[f64], s: f64) -> Point {
    a.iter().zip(b).map(|(x, y)| x + s * (y - x)).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn euclidean(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn is_zero(a: &[f64]) -> bool {
    a.iter().all(|&x| x == 0.0)
}
