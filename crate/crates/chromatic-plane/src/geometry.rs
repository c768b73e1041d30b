//! Plane points, orientation-preserving isometries and period lattices.
//!
//! An isometry is stored as a rotation angle about the origin followed by a
//! translation. Restricting to orientation-preserving maps is enough here:
//! evaluating a coloring on a mapped unit edge only needs the two endpoints,
//! and a reflected edge is some rotated edge.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::Error;

/// Cross products below this magnitude count as a degenerate basis.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// A point of the plane, coordinates in units of the edge length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanePoint {
    pub x: f64,
    pub y: f64,
}

impl PlanePoint {
    pub const ORIGIN: PlanePoint = PlanePoint { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        PlanePoint { x, y }
    }

    /// Unit vector at angle `theta`, i.e. `cis(theta)`.
    pub fn cis(theta: f64) -> Self {
        PlanePoint::new(theta.cos(), theta.sin())
    }

    pub fn add(self, other: PlanePoint) -> PlanePoint {
        PlanePoint::new(self.x + other.x, self.y + other.y)
    }

    pub fn sub(self, other: PlanePoint) -> PlanePoint {
        PlanePoint::new(self.x - other.x, self.y - other.y)
    }

    pub fn scale(self, s: f64) -> PlanePoint {
        PlanePoint::new(self.x * s, self.y * s)
    }

    pub fn dist(self, other: PlanePoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// An orientation-preserving isometry: rotate by `theta` about the origin,
/// then translate by `(dx, dy)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Isometry {
    pub dx: f64,
    pub dy: f64,
    /// Rotation angle in `[0, 2π)`.
    pub theta: f64,
}

impl Isometry {
    pub fn new(dx: f64, dy: f64, theta: f64) -> Self {
        Isometry {
            dx,
            dy,
            theta: theta.rem_euclid(TAU),
        }
    }

    pub fn identity() -> Self {
        Isometry::new(0.0, 0.0, 0.0)
    }

    pub fn apply(&self, p: PlanePoint) -> PlanePoint {
        let (sin, cos) = self.theta.sin_cos();
        PlanePoint::new(
            cos * p.x - sin * p.y + self.dx,
            sin * p.x + cos * p.y + self.dy,
        )
    }

    /// Image of the origin.
    pub fn origin_image(&self) -> PlanePoint {
        PlanePoint::new(self.dx, self.dy)
    }

    /// The two endpoints of the mapped unit edge `(0, 1)`.
    pub fn unit_edge(&self) -> (PlanePoint, PlanePoint) {
        let a = self.origin_image();
        let b = a.add(PlanePoint::cis(self.theta));
        (a, b)
    }
}

/// Period lattice spanned by two linearly independent vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeBasis {
    pub z1: PlanePoint,
    pub z2: PlanePoint,
}

impl LatticeBasis {
    pub fn new(z1: PlanePoint, z2: PlanePoint) -> Result<Self, Error> {
        let cross = z1.x * z2.y - z1.y * z2.x;
        if !cross.is_finite() || cross.abs() <= DEGENERACY_TOL {
            return Err(Error::DegenerateBasis);
        }
        Ok(LatticeBasis { z1, z2 })
    }

    /// Fractional lattice coordinates `(a, b)` with `p = a·z1 + b·z2`.
    pub fn fractional(&self, p: PlanePoint) -> (f64, f64) {
        let det = self.z1.x * self.z2.y - self.z1.y * self.z2.x;
        let a = (p.x * self.z2.y - p.y * self.z2.x) / det;
        let b = (self.z1.x * p.y - self.z1.y * p.x) / det;
        (a, b)
    }

    /// Lattice point `m·z1 + n·z2`.
    pub fn lattice_point(&self, m: i64, n: i64) -> PlanePoint {
        self.z1.scale(m as f64).add(self.z2.scale(n as f64))
    }

    /// Point `a·z1 + b·z2` for real coefficients.
    pub fn point_at(&self, a: f64, b: f64) -> PlanePoint {
        self.z1.scale(a).add(self.z2.scale(b))
    }
}

/// Reduce `p` into the fundamental cell `{a·z1 + b·z2 | 0 ≤ a, b < 1}`.
///
/// Returns the cell representative and the integer coefficients removed, so
/// that `p = cell + m·z1 + n·z2`.
pub fn reduce_to_cell(p: PlanePoint, basis: &LatticeBasis) -> (PlanePoint, (i64, i64)) {
    let (a, b) = basis.fractional(p);
    let m = a.floor() as i64;
    let n = b.floor() as i64;
    let cell = p.sub(basis.lattice_point(m, n));
    (cell, (m, n))
}

/// A seedable stream of principal isometries.
///
/// Chunked runs derive one stream per chunk from `(seed, chunk)` via a
/// splitmix-style hash, so parallel and serial execution draw identical
/// samples. The generator is pinned to ChaCha8 to keep outputs bit-stable.
#[derive(Debug, Clone)]
pub struct IsometryRng {
    rng: ChaCha8Rng,
}

impl IsometryRng {
    pub fn new(seed: u64) -> Self {
        IsometryRng {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn for_chunk(seed: u64, chunk: u64) -> Self {
        IsometryRng::new(mix_seed(seed, chunk))
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    /// Uniform sample from the principal isometries of `basis`:
    /// translation `a·z1 + b·z2` with `a, b` uniform on `[0,1)` and rotation
    /// uniform on `[0, 2π)`.
    pub fn principal_isometry(&mut self, basis: &LatticeBasis) -> Isometry {
        let a = self.uniform();
        let b = self.uniform();
        let theta = self.uniform() * TAU;
        let t = basis.point_at(a, b);
        Isometry::new(t.x, t.y, theta)
    }
}

/// Derive an independent sub-stream seed, splitmix64 finalizer over seed
/// and stream index.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    mix_seed(seed, stream)
}

fn mix_seed(seed: u64, chunk: u64) -> u64 {
    let mut z = seed ^ chunk.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn hex_basis() -> LatticeBasis {
        LatticeBasis::new(PlanePoint::new(2.0, 0.0), PlanePoint::new(1.0, 3f64.sqrt())).unwrap()
    }

    #[test]
    fn identity_isometry_fixes_points() {
        let p = Isometry::identity().apply(PlanePoint::new(3.0, 4.0));
        assert_eq!((p.x, p.y), (3.0, 4.0));
    }

    #[test]
    fn half_turn() {
        let p = Isometry::new(0.0, 0.0, PI).apply(PlanePoint::new(1.0, 0.0));
        assert!((p.x + 1.0).abs() < 1e-12 && p.y.abs() < 1e-12);
    }

    #[test]
    fn quarter_turn_plus_shift() {
        let p = Isometry::new(1.0, 0.0, FRAC_PI_2).apply(PlanePoint::new(1.0, 0.0));
        assert!((p.x - 1.0).abs() < 1e-12 && (p.y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reduce_examples() {
        let basis = hex_basis();
        let (c, mn) = reduce_to_cell(PlanePoint::ORIGIN, &basis);
        assert_eq!(mn, (0, 0));
        assert!(c.norm() < 1e-12);

        let (c, mn) = reduce_to_cell(PlanePoint::new(3.0, 3f64.sqrt()), &basis);
        assert_eq!(mn, (1, 1));
        assert!(c.norm() < 1e-9);

        let (c, mn) = reduce_to_cell(PlanePoint::new(2.5, 0.0), &basis);
        assert_eq!(mn, (1, 0));
        assert!((c.x - 0.5).abs() < 1e-9 && c.y.abs() < 1e-9);
    }

    #[test]
    fn degenerate_basis_rejected() {
        let r = LatticeBasis::new(PlanePoint::new(1.0, 1.0), PlanePoint::new(2.0, 2.0));
        assert!(matches!(r, Err(Error::DegenerateBasis)));
    }

    #[test]
    fn reduce_is_idempotent_and_exact() {
        let basis = hex_basis();
        let mut rng = IsometryRng::new(11);
        for _ in 0..1000 {
            let p = PlanePoint::new(
                (rng.uniform() - 0.5) * 100.0,
                (rng.uniform() - 0.5) * 100.0,
            );
            let (cell, (m, n)) = reduce_to_cell(p, &basis);
            let back = cell.add(basis.lattice_point(m, n));
            assert!(back.dist(p) < 1e-9);
            let (_, mn2) = reduce_to_cell(cell, &basis);
            assert_eq!(mn2, (0, 0));
        }
    }

    #[test]
    fn isometries_preserve_distance() {
        let mut rng = IsometryRng::new(5);
        let basis = hex_basis();
        for _ in 0..1000 {
            let iso = rng.principal_isometry(&basis);
            let p = PlanePoint::new(rng.uniform() * 20.0 - 10.0, rng.uniform() * 20.0 - 10.0);
            let q = PlanePoint::new(rng.uniform() * 20.0 - 10.0, rng.uniform() * 20.0 - 10.0);
            let d0 = p.dist(q);
            let d1 = iso.apply(p).dist(iso.apply(q));
            assert!((d0 - d1).abs() <= 1e-12 * (1.0 + d0));
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let basis = hex_basis();
        let a = IsometryRng::new(42).principal_isometry(&basis);
        let b = IsometryRng::new(42).principal_isometry(&basis);
        assert_eq!(a, b);
    }

    #[test]
    fn sample_mean_of_a_coordinate() {
        // Law of large numbers: mean of the first cell coordinate is 1/2,
        // 3σ band at n = 10^6 is ±0.0015; assert ±0.002.
        let basis = hex_basis();
        let mut rng = IsometryRng::new(7);
        let n = 1_000_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let iso = rng.principal_isometry(&basis);
            let (a, _) = basis.fractional(iso.origin_image());
            sum += a;
        }
        assert!((sum / n as f64 - 0.5).abs() < 0.002);
    }

    #[test]
    fn theta_chi_square_uniformity() {
        let basis = hex_basis();
        let mut rng = IsometryRng::new(9);
        let n = 1_000_000usize;
        let mut bins = [0u64; 16];
        for _ in 0..n {
            let iso = rng.principal_isometry(&basis);
            let bin = ((iso.theta / TAU) * 16.0) as usize;
            bins[bin.min(15)] += 1;
        }
        let expected = n as f64 / 16.0;
        let chi2: f64 = bins
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        // chi-square critical value, 15 dof, significance 0.001
        assert!(chi2 < 37.697, "chi2 = {chi2}");
    }

    proptest::proptest! {
        #[test]
        fn reduce_lands_in_unit_cell(
            x in -1e4f64..1e4,
            y in -1e4f64..1e4,
        ) {
            let basis = hex_basis();
            let p = PlanePoint::new(x, y);
            let (cell, (m, n)) = reduce_to_cell(p, &basis);
            let (a, b) = basis.fractional(cell);
            proptest::prop_assert!((-1e-9..1.0 + 1e-9).contains(&a));
            proptest::prop_assert!((-1e-9..1.0 + 1e-9).contains(&b));
            let back = cell.add(basis.lattice_point(m, n));
            proptest::prop_assert!(back.dist(p) <= 1e-7 * (1.0 + p.norm()));
        }

        #[test]
        fn isometries_preserve_random_distances(
            dx in -50f64..50.0,
            dy in -50f64..50.0,
            theta in 0f64..std::f64::consts::TAU,
            px in -50f64..50.0,
            py in -50f64..50.0,
        ) {
            let iso = Isometry::new(dx, dy, theta);
            let p = PlanePoint::new(px, py);
            let q = PlanePoint::new(py, -px);
            let d0 = p.dist(q);
            let d1 = iso.apply(p).dist(iso.apply(q));
            proptest::prop_assert!((d0 - d1).abs() <= 1e-9 * (1.0 + d0));
        }
    }
}
