use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Triple;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geom::Point;

const TRIES: usize = 256;

fn unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> Point {
    loop {
        let mut v = Point::origin(dim);
        for i in 0..dim {
            v = v.with(i, rng.gen_range(-1.0..1.0));
        }
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v * (1.0 / n);
        }
    }
}

/// `y = x + u d(x) e` with `e` uniform on the sphere; retried until `y` is in
/// the domain and joined to `x` by a segment.
fn local_partner(domain: &Domain, x: &Point, rng: &mut ChaCha8Rng, u: impl Fn(&mut ChaCha8Rng) -> f64) -> Result<Point> {
    let d = domain.dist_to_boundary(x)?;
    for _ in 0..TRIES {
        let y = *x + unit_vector(rng, domain.dim()) * (u(rng) * d);
        if y != *x && domain.contains(&y) {
            return Ok(y);
        }
    }
    Err(Error::Sampling(format!("no local partner found for {x}")))
}

/// `n` seeded pairs: the first half local (`|x - y| / d(x)` uniform in
/// `(0.05, 0.9)`), the rest two independent interior points.
pub fn sample_pairs(domain: &Domain, n: usize, seed: u64) -> Result<Vec<(Point, Point)>> {
    let xs = domain.sample_interior(n, 0.0, seed)?;
    let ys = domain.sample_interior(n, 0.0, seed.wrapping_add(0x5151))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa11ce);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = xs[i];
        let y = if i < n / 2 {
            local_partner(domain, &x, &mut rng, |r| r.gen_range(0.05..0.9))?
        } else {
            ys[i]
        };
        if x != y {
            out.push((x, y));
        }
    }
    Ok(out)
}

/// `n` seeded pairs with `|x - y| < max_frac d(x)`; the fraction is
/// log-uniform over three decades below `max_frac`.
pub fn sample_local_pairs(domain: &Domain, n: usize, max_frac: f64, seed: u64) -> Result<Vec<(Point, Point)>> {
    if !(max_frac > 0.0 && max_frac <= 1.0) {
        return Err(Error::validation("max_frac", "must lie in (0, 1]"));
    }
    let xs = domain.sample_interior(n, 0.0, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x10ca1);
    xs.into_iter()
        .map(|x| {
            let y = local_partner(domain, &x, &mut rng, |r| {
                max_frac * 10f64.powf(-3.0 * (1.0 - r.gen::<f64>()))
            })?;
            Ok((x, y))
        })
        .collect()
}

/// `n` seeded triples of distinct points in `B(center, q d(center))`.
pub fn sample_triples(domain: &Domain, center: &Point, q: f64, n: usize, seed: u64) -> Result<Vec<Triple>> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::validation("q", "must lie in (0, 1)"));
    }
    let rad = q * domain.dist_to_boundary(center)?;
    let dim = domain.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7219);
    let point = |rng: &mut ChaCha8Rng| loop {
        let mut v = Point::origin(dim);
        for i in 0..dim {
            v = v.with(i, rng.gen_range(-1.0..1.0));
        }
        if v.norm() < 1.0 {
            return *center + v * rad;
        }
    };
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let (x, a, b) = (point(&mut rng), point(&mut rng), point(&mut rng));
        if let Ok(t) = Triple::new(x, a, b) {
            out.push(t);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_pairs_respect_fraction() {
        let d = Domain::slit_disk();
        let pairs = sample_local_pairs(&d, 200, 0.5, 4).unwrap();
        for (x, y) in pairs {
            assert!(x.dist(&y) < 0.5 * d.dist_to_boundary(&x).unwrap());
            assert!(d.contains(&y));
        }
    }

    #[test]
    fn pairs_are_seeded() {
        let d = Domain::ball(Point::new2(0.0, 0.0), 1.0).unwrap();
        assert_eq!(sample_pairs(&d, 20, 9).unwrap(), sample_pairs(&d, 20, 9).unwrap());
    }
}
