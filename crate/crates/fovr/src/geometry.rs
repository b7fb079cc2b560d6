//! Spherical and equirectangular geometry.
//!
//! Coordinate convention (used everywhere in this crate): right-handed,
//! `+x` is the reference forward direction (yaw 0, pitch 0), `+z` is up,
//! and yaw increases counterclockwise when viewed from `+z`. A direction
//! at yaw ψ, pitch θ (degrees) is
//!
//! ```text
//! (cos θ cos ψ, cos θ sin ψ, sin θ)
//! ```
//!
//! Yaw lives in the half-open range `[-180, 180)` so every direction has a
//! single representation; pitch lives in `[-90, 90]`. Points derived from
//! directions ([`dir_to_sphere`]) additionally canonicalize yaw to 0 at the
//! exact poles, where yaw is meaningless. [`SpherePoint::new`] preserves a
//! caller-supplied yaw at the poles so that the equirectangular maps stay
//! exact affine functions of the stored fields.

use crate::error::{Error, Result};

/// A rotation, stored as (w, x, y, z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const IDENTITY: Quaternion = Quaternion {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    /// Rotation of `angle_deg` about the given axis.
    pub fn from_axis_angle(axis: UnitVec3, angle_deg: f64) -> Self {
        let half = angle_deg.to_radians() / 2.0;
        let s = half.sin();
        Quaternion {
            w: half.cos(),
            x: axis.x * s,
            y: axis.y * s,
            z: axis.z * s,
        }
    }

    pub fn norm(&self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Unit-norm copy. Errors on a zero (or denormal-tiny) quaternion.
    pub fn normalized(&self) -> Result<Quaternion> {
        let n = self.norm();
        if !n.is_finite() || n < 1e-12 {
            return Err(Error::invalid(format!(
                "quaternion norm {n} is not normalizable"
            )));
        }
        Ok(Quaternion {
            w: self.w / n,
            x: self.x / n,
            y: self.y / n,
            z: self.z / n,
        })
    }

    pub fn dot(&self, other: &Quaternion) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    fn neg(&self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }

    /// Hamilton product `self * other`.
    pub fn mul(&self, other: &Quaternion) -> Quaternion {
        let (w1, x1, y1, z1) = (self.w, self.x, self.y, self.z);
        let (w2, x2, y2, z2) = (other.w, other.x, other.y, other.z);
        Quaternion {
            w: w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            x: w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            y: w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            z: w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        }
    }

    /// Rotates a unit vector by this (unit) quaternion.
    pub fn rotate(&self, v: UnitVec3) -> UnitVec3 {
        // v' = v + 2 w (u x v) + 2 u x (u x v), u = vector part
        let (ux, uy, uz) = (self.x, self.y, self.z);
        let (vx, vy, vz) = (v.x, v.y, v.z);
        let cx = uy * vz - uz * vy;
        let cy = uz * vx - ux * vz;
        let cz = ux * vy - uy * vx;
        let dx = uy * cz - uz * cy;
        let dy = uz * cx - ux * cz;
        let dz = ux * cy - uy * cx;
        let w2 = 2.0 * self.w;
        UnitVec3::renormalized(vx + w2 * cx + 2.0 * dx, vy + w2 * cy + 2.0 * dy, vz + w2 * cz + 2.0 * dz)
    }

    /// Spherical linear interpolation between two rotations, shortest path.
    pub fn slerp(a: &Quaternion, b: &Quaternion, t: f64) -> Result<Quaternion> {
        let a = a.normalized()?;
        let mut b = b.normalized()?;
        let mut dot = a.dot(&b);
        if dot < 0.0 {
            b = b.neg();
            dot = -dot;
        }
        if dot > 1.0 - 1e-10 {
            // nearly parallel: lerp and renormalize
            return Quaternion::new(
                a.w + t * (b.w - a.w),
                a.x + t * (b.x - a.x),
                a.y + t * (b.y - a.y),
                a.z + t * (b.z - a.z),
            )
            .normalized();
        }
        let theta = dot.min(1.0).acos();
        let sin_theta = theta.sin();
        let s0 = ((1.0 - t) * theta).sin() / sin_theta;
        let s1 = (t * theta).sin() / sin_theta;
        Ok(Quaternion::new(
            s0 * a.w + s1 * b.w,
            s0 * a.x + s1 * b.x,
            s0 * a.y + s1 * b.y,
            s0 * a.z + s1 * b.z,
        ))
    }
}

/// A direction in 3-space with Euclidean norm 1 (within 1e-9).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl UnitVec3 {
    pub const X: UnitVec3 = UnitVec3 { x: 1.0, y: 0.0, z: 0.0 };
    pub const Y: UnitVec3 = UnitVec3 { x: 0.0, y: 1.0, z: 0.0 };
    pub const Z: UnitVec3 = UnitVec3 { x: 0.0, y: 0.0, z: 1.0 };

    /// Normalizes the given components. Errors when the norm is too small
    /// to define a direction.
    pub fn new(x: f64, y: f64, z: f64) -> Result<UnitVec3> {
        let n = (x * x + y * y + z * z).sqrt();
        if !n.is_finite() || n < 1e-12 {
            return Err(Error::invalid(format!(
                "vector norm {n} is not normalizable"
            )));
        }
        Ok(UnitVec3 {
            x: x / n,
            y: y / n,
            z: z / n,
        })
    }

    /// Internal constructor for components already unit up to rounding.
    fn renormalized(x: f64, y: f64, z: f64) -> UnitVec3 {
        let n = (x * x + y * y + z * z).sqrt();
        UnitVec3 {
            x: x / n,
            y: y / n,
            z: z / n,
        }
    }

    pub fn dot(&self, other: &UnitVec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &UnitVec3) -> (f64, f64, f64) {
        (
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    /// Great-circle angle to another direction, in degrees, in [0, 180].
    pub fn angle_deg(&self, other: &UnitVec3) -> f64 {
        let (cx, cy, cz) = self.cross(other);
        let cross_norm = (cx * cx + cy * cy + cz * cz).sqrt();
        cross_norm.atan2(self.dot(other)).to_degrees()
    }

    /// Spherical interpolation along the great circle from `a` to `b`.
    /// Falls back to normalized lerp for nearly parallel inputs; for nearly
    /// antipodal inputs the great circle is ambiguous and a fixed
    /// perpendicular axis picks one deterministically.
    pub fn slerp(a: &UnitVec3, b: &UnitVec3, t: f64) -> UnitVec3 {
        let dot = a.dot(b).clamp(-1.0, 1.0);
        let theta = dot.acos();
        if theta.sin().abs() < 1e-9 {
            if dot > 0.0 {
                return UnitVec3::renormalized(
                    a.x + t * (b.x - a.x),
                    a.y + t * (b.y - a.y),
                    a.z + t * (b.z - a.z),
                );
            }
            // Antipodal: travel half-circle through a deterministic
            // perpendicular (lerp would pass through the origin).
            let (px, py, pz) = if a.z.abs() < 0.9 {
                a.cross(&UnitVec3::Z)
            } else {
                a.cross(&UnitVec3::X)
            };
            let e = UnitVec3::renormalized(px, py, pz);
            let (c, s) = ((t * theta).cos(), (t * theta).sin());
            return UnitVec3::renormalized(
                a.x * c + e.x * s,
                a.y * c + e.y * s,
                a.z * c + e.z * s,
            );
        }
        let sin_theta = theta.sin();
        let s0 = ((1.0 - t) * theta).sin() / sin_theta;
        let s1 = (t * theta).sin() / sin_theta;
        UnitVec3::renormalized(
            s0 * a.x + s1 * b.x,
            s0 * a.y + s1 * b.y,
            s0 * a.z + s1 * b.z,
        )
    }
}

/// A direction on the viewing sphere in degrees: yaw in `[-180, 180)`,
/// pitch in `[-90, 90]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint {
    yaw_deg: f64,
    pitch_deg: f64,
}

/// Wraps an angle into `[-180, 180)`.
pub fn wrap_yaw_deg(yaw: f64) -> f64 {
    let mut y = (yaw + 180.0).rem_euclid(360.0) - 180.0;
    if y >= 180.0 {
        y -= 360.0;
    }
    y
}

impl SpherePoint {
    /// Validates pitch, wraps yaw into range. Yaw supplied at the exact
    /// poles is preserved; see the module docs.
    pub fn new(yaw_deg: f64, pitch_deg: f64) -> Result<SpherePoint> {
        if !yaw_deg.is_finite() || !pitch_deg.is_finite() {
            return Err(Error::invalid("sphere point components must be finite"));
        }
        if !(-90.0..=90.0).contains(&pitch_deg) {
            return Err(Error::invalid(format!(
                "pitch {pitch_deg} outside [-90, 90]"
            )));
        }
        Ok(SpherePoint {
            yaw_deg: wrap_yaw_deg(yaw_deg),
            pitch_deg,
        })
    }

    pub fn yaw_deg(&self) -> f64 {
        self.yaw_deg
    }

    pub fn pitch_deg(&self) -> f64 {
        self.pitch_deg
    }
}

/// Tile grid over the equirectangular frame. `cols` spans yaw, `rows`
/// spans pitch (row 0 at the top, pitch +90).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TileGrid {
    cols: u32,
    rows: u32,
}

impl TileGrid {
    pub fn new(cols: u32, rows: u32) -> Result<TileGrid> {
        if cols == 0 || rows == 0 {
            return Err(Error::invalid("tile grid must have at least 1x1 tiles"));
        }
        Ok(TileGrid { cols, rows })
    }

    pub fn cols(&self) -> u32 {
        self.cols
    }

    pub fn rows(&self) -> u32 {
        self.rows
    }

    pub fn tile_count(&self) -> usize {
        self.cols as usize * self.rows as usize
    }

    /// Row-major flat index.
    pub fn flat_index(&self, tile: TileIndex) -> usize {
        tile.row as usize * self.cols as usize + tile.col as usize
    }

    pub fn tile_at(&self, flat: usize) -> TileIndex {
        TileIndex {
            col: (flat % self.cols as usize) as u32,
            row: (flat / self.cols as usize) as u32,
        }
    }

    /// Iterates all tiles in row-major order.
    pub fn tiles(&self) -> impl Iterator<Item = TileIndex> + '_ {
        let grid = *self;
        (0..grid.tile_count()).map(move |i| grid.tile_at(i))
    }
}

impl Default for TileGrid {
    fn default() -> Self {
        TileGrid { cols: 36, rows: 36 }
    }
}

/// A tile position within a [`TileGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TileIndex {
    pub col: u32,
    pub row: u32,
}

impl TileIndex {
    pub fn new(col: u32, row: u32) -> TileIndex {
        TileIndex { col, row }
    }
}

/// Forward direction (the `+x` reference axis rotated by `q`).
pub fn quat_to_forward(q: &Quaternion) -> Result<UnitVec3> {
    Ok(q.normalized()?.rotate(UnitVec3::X))
}

/// Converts a unit direction to yaw/pitch. At the exact poles the yaw is
/// canonicalized to 0.
pub fn dir_to_sphere(d: &UnitVec3) -> SpherePoint {
    let pitch_deg = d.z.clamp(-1.0, 1.0).asin().to_degrees();
    if pitch_deg.abs() >= 90.0 || (d.x == 0.0 && d.y == 0.0) {
        return SpherePoint {
            yaw_deg: 0.0,
            pitch_deg: pitch_deg.clamp(-90.0, 90.0),
        };
    }
    SpherePoint {
        yaw_deg: wrap_yaw_deg(d.y.atan2(d.x).to_degrees()),
        pitch_deg,
    }
}

/// Converts yaw/pitch back to a unit direction.
pub fn sphere_to_dir(p: &SpherePoint) -> UnitVec3 {
    let yaw = p.yaw_deg.to_radians();
    let pitch = p.pitch_deg.to_radians();
    UnitVec3 {
        x: pitch.cos() * yaw.cos(),
        y: pitch.cos() * yaw.sin(),
        z: pitch.sin(),
    }
}

/// Equirectangular coordinates: `u = (yaw + 180) / 360` in `[0, 1)`,
/// `v = (90 - pitch) / 180` in `[0, 1]`.
pub fn sphere_to_uv(p: &SpherePoint) -> (f64, f64) {
    ((p.yaw_deg + 180.0) / 360.0, (90.0 - p.pitch_deg) / 180.0)
}

/// Inverse of [`sphere_to_uv`].
pub fn uv_to_sphere(u: f64, v: f64) -> Result<SpherePoint> {
    SpherePoint::new(u * 360.0 - 180.0, 90.0 - v * 180.0)
}

/// Maps a sphere point to its tile, clamping the floor at the far edges.
pub fn point_to_tile(p: &SpherePoint, grid: &TileGrid) -> TileIndex {
    let (u, v) = sphere_to_uv(p);
    let col = ((u * grid.cols as f64).floor() as i64).clamp(0, grid.cols as i64 - 1);
    let row = ((v * grid.rows as f64).floor() as i64).clamp(0, grid.rows as i64 - 1);
    TileIndex {
        col: col as u32,
        row: row as u32,
    }
}

/// Great-circle angle between two sphere points, degrees in [0, 180].
pub fn angular_distance(a: &SpherePoint, b: &SpherePoint) -> f64 {
    sphere_to_dir(a).angle_deg(&sphere_to_dir(b))
}

/// Mean direction of a set of points: the normalized resultant of their
/// unit vectors. Errors on an empty set and when the directions cancel
/// (resultant norm below 1e-9).
pub fn spherical_mean(points: &[SpherePoint]) -> Result<SpherePoint> {
    if points.is_empty() {
        return Err(Error::invalid("spherical mean of an empty set"));
    }
    let (mut sx, mut sy, mut sz) = (0.0, 0.0, 0.0);
    for p in points {
        let d = sphere_to_dir(p);
        sx += d.x;
        sy += d.y;
        sz += d.z;
    }
    let n = points.len() as f64;
    let resultant = ((sx / n).powi(2) + (sy / n).powi(2) + (sz / n).powi(2)).sqrt();
    if resultant <= 1e-9 {
        return Err(Error::DegenerateMean(resultant));
    }
    Ok(dir_to_sphere(&UnitVec3::new(sx, sy, sz)?))
}
