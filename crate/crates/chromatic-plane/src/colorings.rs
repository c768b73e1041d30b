//! Periodic plane colorings: stripes, hexagonal tilings and the circle-patch
//! overlay that trades one extra color for a fixed badness factor.
//!
//! A coloring is a closed-form descriptor, not a raster, so `color_at` is
//! exact at any point of the plane. Boundary conventions are fixed and
//! deterministic: stripes are half-open on the left, hexagon boundaries are
//! resolved by cube rounding, patch disks are open. All of these are
//! measure-zero sets.
//!
//! ```
//! use chromatic_plane::colorings::{ColoringDescriptor, PeriodicColoring};
//! use chromatic_plane::geometry::PlanePoint;
//!
//! // Colorings round-trip through flat JSON descriptors.
//! let d: ColoringDescriptor =
//!     serde_json::from_str(r#"{"family":"hex","k":7,"diameter":0.95}"#).unwrap();
//! let seven = PeriodicColoring::from_descriptor(&d).unwrap();
//! assert_eq!(seven.k(), 7);
//!
//! // The 7-coloring separates every unit-distance pair, for example a
//! // horizontal one:
//! let a = PlanePoint::new(0.2, 0.1);
//! let b = PlanePoint::new(1.2, 0.1);
//! assert_ne!(seven.color_at(a), seven.color_at(b));
//! ```

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::geometry::{reduce_to_cell, LatticeBasis, PlanePoint};
use crate::{Error, Result};

/// Serializable recipe for a coloring, flat JSON keyed by `family`.
#[derive(Debug, Clone, PartialEq)]
pub enum ColoringDescriptor {
    /// Alternating vertical stripes; `k` is 1 (degenerate) or 2.
    Stripe { width: f64, k: u32 },
    /// Hexagonal tiling, hexagon at axial `(q, r)` colored `(q + m·r) mod k`
    /// for multiplier `m ≥ 1`; `m = 0` selects the block pattern
    /// `(q mod s) + s·(r mod s)` for square `k = s²`.
    Hex { k: u32, diameter: f64, multiplier: u32 },
    /// Isbell's 7-coloring: hexagons of diameter slightly below 1.
    Isbell { diameter: f64 },
    /// Base coloring plus a triangular grid of open unit-diameter disks in a
    /// fresh color.
    Overlay {
        base: Box<ColoringDescriptor>,
        offset: [f64; 2],
    },
}

/// Default hexagon diameter for Isbell's coloring; anything in (a band
/// below 1) works, the exact value is not pinned by the construction.
pub const ISBELL_DIAMETER: f64 = 0.95;

/// Multiplier whose pattern is the classical one for `k` colors.
///
/// For k = 7 the pattern `(q + 3r) mod 7` is Isbell's: its same-color
/// sublattice is generated by Eisenstein primes of norm 7, so same-colored
/// hexagons sit √7 center-spacings apart. `(q + 2r) mod 7` would leave
/// same-colored hexagons at norm-3 offsets, which admits monochromatic unit
/// pairs.
///
/// For k = 4 the default is the block pattern (multiplier 0): its same-color
/// sublattice is 2Λ with minimal norm 4, while any cyclic index-4 pattern
/// has a same-color vector of norm ≤ 3 and roughly five times the badness at
/// the interesting diameters.
///
/// For the remaining k the norm-3 kernel is unavoidable among cyclic
/// patterns and 2 is the classical choice.
pub fn default_multiplier(k: u32) -> u32 {
    match k {
        4 => 0,
        7 => 3,
        _ => 2,
    }
}

impl ColoringDescriptor {
    pub fn stripe(width: f64) -> Self {
        ColoringDescriptor::Stripe { width, k: 2 }
    }

    pub fn hex(k: u32, diameter: f64) -> Self {
        ColoringDescriptor::Hex {
            k,
            diameter,
            multiplier: default_multiplier(k),
        }
    }

    /// Number of colors the described coloring uses.
    pub fn k(&self) -> u32 {
        match self {
            ColoringDescriptor::Stripe { k, .. } => *k,
            ColoringDescriptor::Hex { k, .. } => *k,
            ColoringDescriptor::Isbell { .. } => 7,
            ColoringDescriptor::Overlay { base, .. } => base.k() + 1,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDescriptor {
    family: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    diameter: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    multiplier: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    base: Option<Box<RawDescriptor>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    offset: Option<[f64; 2]>,
}

fn reject_fields(raw: &RawDescriptor, allowed: &[&str]) -> std::result::Result<(), String> {
    let present: &[(&str, bool)] = &[
        ("width", raw.width.is_some()),
        ("k", raw.k.is_some()),
        ("diameter", raw.diameter.is_some()),
        ("multiplier", raw.multiplier.is_some()),
        ("base", raw.base.is_some()),
        ("offset", raw.offset.is_some()),
    ];
    for (name, is_present) in present {
        if *is_present && !allowed.contains(name) {
            return Err(format!(
                "field `{name}` is not valid for family `{}`",
                raw.family
            ));
        }
    }
    Ok(())
}

impl TryFrom<RawDescriptor> for ColoringDescriptor {
    type Error = String;

    fn try_from(raw: RawDescriptor) -> std::result::Result<Self, String> {
        match raw.family.as_str() {
            "stripe" => {
                reject_fields(&raw, &["width", "k"])?;
                let width = raw.width.ok_or("stripe requires `width`")?;
                Ok(ColoringDescriptor::Stripe {
                    width,
                    k: raw.k.unwrap_or(2),
                })
            }
            "hex" => {
                reject_fields(&raw, &["k", "diameter", "multiplier"])?;
                let k = raw.k.ok_or("hex requires `k`")?;
                let diameter = raw.diameter.ok_or("hex requires `diameter`")?;
                Ok(ColoringDescriptor::Hex {
                    k,
                    diameter,
                    multiplier: raw.multiplier.unwrap_or_else(|| default_multiplier(k)),
                })
            }
            "isbell" => {
                reject_fields(&raw, &["diameter"])?;
                Ok(ColoringDescriptor::Isbell {
                    diameter: raw.diameter.unwrap_or(ISBELL_DIAMETER),
                })
            }
            "overlay" => {
                reject_fields(&raw, &["base", "offset"])?;
                let base = raw.base.ok_or("overlay requires `base`")?;
                let base = ColoringDescriptor::try_from(*base)?;
                Ok(ColoringDescriptor::Overlay {
                    base: Box::new(base),
                    offset: raw.offset.unwrap_or([0.0, 0.0]),
                })
            }
            other => Err(format!(
                "unknown family `{other}`; valid families: stripe, hex, isbell, overlay"
            )),
        }
    }
}

impl From<&ColoringDescriptor> for RawDescriptor {
    fn from(d: &ColoringDescriptor) -> RawDescriptor {
        let empty = RawDescriptor {
            family: String::new(),
            width: None,
            k: None,
            diameter: None,
            multiplier: None,
            base: None,
            offset: None,
        };
        match d {
            ColoringDescriptor::Stripe { width, k } => RawDescriptor {
                family: "stripe".into(),
                width: Some(*width),
                k: Some(*k),
                ..empty
            },
            ColoringDescriptor::Hex {
                k,
                diameter,
                multiplier,
            } => RawDescriptor {
                family: "hex".into(),
                k: Some(*k),
                diameter: Some(*diameter),
                multiplier: Some(*multiplier),
                ..empty
            },
            ColoringDescriptor::Isbell { diameter } => RawDescriptor {
                family: "isbell".into(),
                diameter: Some(*diameter),
                ..empty
            },
            ColoringDescriptor::Overlay { base, offset } => RawDescriptor {
                family: "overlay".into(),
                base: Some(Box::new(RawDescriptor::from(base.as_ref()))),
                offset: Some(*offset),
                ..empty
            },
        }
    }
}

impl Serialize for ColoringDescriptor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawDescriptor::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ColoringDescriptor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawDescriptor::deserialize(d)?;
        ColoringDescriptor::try_from(raw).map_err(D::Error::custom)
    }
}

#[derive(Debug, Clone)]
enum Family {
    Stripe {
        width: f64,
        k: u32,
    },
    Hex(HexTiling),
    Overlay {
        base: Box<PeriodicColoring>,
        offset: PlanePoint,
    },
}

/// Pointy-top hexagonal tiling with circumradius `r`; centers sit on the
/// axial lattice with spacing `√3·r`.
#[derive(Debug, Clone)]
struct HexTiling {
    k: u32,
    r: f64,
    multiplier: u32,
}

impl HexTiling {
    /// Center-translation vectors of the axial lattice.
    fn axial_vectors(&self) -> (PlanePoint, PlanePoint) {
        let s = 3f64.sqrt() * self.r;
        (PlanePoint::new(s, 0.0), PlanePoint::new(s / 2.0, 1.5 * self.r))
    }

    #[cfg(test)]
    fn center(&self, q: i64, r: i64) -> PlanePoint {
        let (u, v) = self.axial_vectors();
        u.scale(q as f64).add(v.scale(r as f64))
    }

    /// Axial coordinates of the hexagon containing `p`, by cube rounding.
    /// Ties (points equidistant in the rounding sense) are resolved by the
    /// fixed fix-up order q, r.
    fn axial_at(&self, p: PlanePoint) -> (i64, i64) {
        let qf = (3f64.sqrt() / 3.0 * p.x - p.y / 3.0) / self.r;
        let rf = (2.0 / 3.0 * p.y) / self.r;
        cube_round(qf, rf)
    }

    /// Color of the hexagon at axial `(q, r)`.
    fn pattern_color(&self, q: i64, r: i64) -> u32 {
        if self.multiplier == 0 {
            let s = (self.k as f64).sqrt().round() as i64;
            (q.rem_euclid(s) + s * r.rem_euclid(s)) as u32
        } else {
            (q + self.multiplier as i64 * r).rem_euclid(self.k as i64) as u32
        }
    }

    fn color_at(&self, p: PlanePoint) -> u32 {
        let (q, r) = self.axial_at(p);
        self.pattern_color(q, r)
    }
}

/// Standard cube-coordinate rounding for hexagonal grids.
fn cube_round(qf: f64, rf: f64) -> (i64, i64) {
    let sf = -qf - rf;
    let mut q = qf.round();
    let mut r = rf.round();
    let s = sf.round();
    let dq = (q - qf).abs();
    let dr = (r - rf).abs();
    let ds = (s - sf).abs();
    if dq > dr && dq > ds {
        q = -r - s;
    } else if dr > ds {
        r = -q - s;
    }
    (q as i64, r as i64)
}

/// Lattice of the overlay patch: disk centers at `2` and `2·cis(π/3)`.
pub fn patch_basis() -> LatticeBasis {
    LatticeBasis::new(PlanePoint::new(2.0, 0.0), PlanePoint::new(1.0, 3f64.sqrt()))
        .expect("patch basis is non-degenerate")
}

/// Whether `p` lies in an open unit-diameter disk of the patch anchored at
/// `offset`.
pub fn in_patch(p: PlanePoint, offset: PlanePoint) -> bool {
    let basis = patch_basis();
    let (_, (m, n)) = reduce_to_cell(p.sub(offset), &basis);
    for dm in -1..=2 {
        for dn in -1..=2 {
            let center = offset.add(basis.lattice_point(m + dm, n + dn));
            if p.dist(center) < 0.5 {
                return true;
            }
        }
    }
    false
}

/// A total `k`-coloring of the plane, periodic under its lattice.
#[derive(Debug, Clone)]
pub struct PeriodicColoring {
    k: u32,
    basis: LatticeBasis,
    descriptor: ColoringDescriptor,
    family: Family,
}

impl PeriodicColoring {
    /// Alternating stripes of the given width, 2 colors, each stripe owning
    /// its left border.
    pub fn stripes(width: f64) -> Result<Self> {
        Self::stripes_k(width, 2)
    }

    /// Stripe coloring with `k` in {1, 2}; `k = 1` is the degenerate
    /// everything-one-color case.
    pub fn stripes_k(width: f64, k: u32) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "stripe width must be positive, got {width}"
            )));
        }
        if k == 0 || k > 2 {
            return Err(Error::InvalidParameter(format!(
                "stripe coloring supports k in {{1, 2}}, got {k}"
            )));
        }
        Ok(PeriodicColoring {
            k,
            basis: LatticeBasis::new(
                PlanePoint::new(2.0 * width, 0.0),
                PlanePoint::new(0.0, 1.0),
            )?,
            descriptor: ColoringDescriptor::Stripe { width, k },
            family: Family::Stripe { width, k },
        })
    }

    /// Hexagonal tiling coloring: hexagons of the given diameter, colored by
    /// the pattern selected by `multiplier` (see
    /// [`ColoringDescriptor::Hex`]).
    pub fn hex(k: u32, diameter: f64, multiplier: u32) -> Result<Self> {
        if k < 3 {
            return Err(Error::InvalidParameter(format!(
                "hex coloring requires k >= 3, got {k}"
            )));
        }
        if !(diameter > 0.0) || !diameter.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "hex diameter must be positive, got {diameter}"
            )));
        }
        if multiplier == 0 {
            let s = (k as f64).sqrt().round() as u32;
            if s < 2 || s * s != k {
                return Err(Error::InvalidHexPattern { k, multiplier });
            }
        }
        let tiling = HexTiling {
            k,
            r: diameter / 2.0,
            multiplier,
        };
        // Adjacent hexagons differ by axial (1,0), (0,1) or (1,-1) up to
        // sign; the pattern must separate every such pair. One period square
        // of positions suffices.
        for q in 0..k as i64 {
            for r in 0..k as i64 {
                for (dq, dr) in [(1i64, 0i64), (0, 1), (1, -1)] {
                    if tiling.pattern_color(q, r) == tiling.pattern_color(q + dq, r + dr) {
                        return Err(Error::InvalidHexPattern { k, multiplier });
                    }
                }
            }
        }
        let (u, v) = tiling.axial_vectors();
        let basis = if multiplier == 0 {
            // block pattern repeats on s·Λ
            let s = (k as f64).sqrt().round();
            LatticeBasis::new(u.scale(s), v.scale(s))?
        } else {
            // k·u shifts q by k; v − m·u shifts (q, r) by (−m, 1), both
            // leave (q + m·r) mod k unchanged.
            LatticeBasis::new(u.scale(k as f64), v.sub(u.scale(multiplier as f64)))?
        };
        Ok(PeriodicColoring {
            k,
            basis,
            descriptor: ColoringDescriptor::Hex {
                k,
                diameter,
                multiplier,
            },
            family: Family::Hex(tiling),
        })
    }

    /// Isbell's 7-coloring of the plane.
    pub fn isbell(diameter: f64) -> Result<Self> {
        let mut c = Self::hex(7, diameter, 3)?;
        c.descriptor = ColoringDescriptor::Isbell { diameter };
        Ok(c)
    }

    /// Overlay a triangular grid of open unit-diameter disks (anchored at
    /// `offset`) in a fresh color over `base`, yielding a `k+1`-coloring.
    ///
    /// The overlay keeps the base's lattice as its nominal period; it is an
    /// exact period only when the base is also periodic under the patch
    /// lattice. Averaging over uniform offsets (see
    /// [`crate::badness::expected_overlay_badness`]) removes the mismatch.
    pub fn overlay(base: PeriodicColoring, offset: PlanePoint) -> Self {
        let k = base.k + 1;
        let basis = base.basis;
        let descriptor = ColoringDescriptor::Overlay {
            base: Box::new(base.descriptor.clone()),
            offset: [offset.x, offset.y],
        };
        PeriodicColoring {
            k,
            basis,
            descriptor,
            family: Family::Overlay {
                base: Box::new(base),
                offset,
            },
        }
    }

    pub fn from_descriptor(d: &ColoringDescriptor) -> Result<Self> {
        match d {
            ColoringDescriptor::Stripe { width, k } => Self::stripes_k(*width, *k),
            ColoringDescriptor::Hex {
                k,
                diameter,
                multiplier,
            } => Self::hex(*k, *diameter, *multiplier),
            ColoringDescriptor::Isbell { diameter } => Self::isbell(*diameter),
            ColoringDescriptor::Overlay { base, offset } => {
                let base = Self::from_descriptor(base)?;
                Ok(Self::overlay(base, PlanePoint::new(offset[0], offset[1])))
            }
        }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn basis(&self) -> &LatticeBasis {
        &self.basis
    }

    pub fn descriptor(&self) -> &ColoringDescriptor {
        &self.descriptor
    }

    /// Color of the plane at `p`, in `{0, …, k−1}`.
    pub fn color_at(&self, p: PlanePoint) -> u32 {
        match &self.family {
            Family::Stripe { width, k } => {
                ((p.x / width).floor() as i64).rem_euclid(*k as i64) as u32
            }
            Family::Hex(tiling) => tiling.color_at(p),
            Family::Overlay { base, offset } => {
                if in_patch(p, *offset) {
                    base.k
                } else {
                    base.color_at(p)
                }
            }
        }
    }
}
