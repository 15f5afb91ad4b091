use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geom::Vec2;
use crate::topology::polygons_distance;

/// Minimum distance between the two generated polygons.
pub const MIN_GAP: f64 = 0.3;

fn star(rng: &mut ChaCha8Rng, centre: Vec2) -> Vec<Vec2> {
    let n = rng.gen_range(5..=9);
    (0..n)
        .map(|k| {
            let t = 2.0 * PI * (k as f64 + rng.gen_range(-0.3..0.3)) / n as f64;
            let r = rng.gen_range(0.25..0.5);
            centre + Vec2::from_angle(t) * r
        })
        .collect()
}

/// Two disjoint star-shaped polygons inside the disk of radius 1.5, drawn
/// from stream `index` of the generator seeded with `seed`.
pub fn random_polygon_pair(seed: u64, index: u64) -> (Vec<Vec2>, Vec<Vec2>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    loop {
        let phi = rng.gen_range(0.0..2.0 * PI);
        let (c, sn) = (phi.cos(), phi.sin());
        let rot = |p: Vec2| Vec2::new(c * p.x - sn * p.y, sn * p.x + c * p.y);
        let ca = rot(Vec2::new(-0.8 + rng.gen_range(-0.15..0.15), rng.gen_range(-0.4..0.4)));
        let cb = rot(Vec2::new(0.8 + rng.gen_range(-0.15..0.15), rng.gen_range(-0.4..0.4)));
        let a = star(&mut rng, ca);
        let b = star(&mut rng, cb);
        if polygons_distance(&a, &b) >= MIN_GAP {
            return (a, b);
        }
    }
}
