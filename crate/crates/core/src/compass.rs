//! Compass bearings as exact unit vectors.

/// A compass bearing stored as an east/north unit vector.
///
/// Construction reduces the angle to `[0°, 90°)` and applies the quarter
/// turns by swapping and negating components, so bearings that differ by an
/// exact multiple of 90° are exact rotations of each other.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bearing {
    east: f64,
    north: f64,
}

impl Bearing {
    /// Degrees clockwise from north.
    pub fn from_degrees(deg: f64) -> Self {
        let d = deg.rem_euclid(360.0);
        let quarter = ((d / 90.0).floor() as i32).clamp(0, 3);
        let rem = d - 90.0 * quarter as f64;
        let r = rem.to_radians();
        let mut b = Bearing {
            east: r.sin(),
            north: r.cos(),
        };
        for _ in 0..quarter {
            b = b.rotated_cw();
        }
        b
    }

    /// Bearing of a grid step; `drow` points north.
    pub fn from_offset(dcol: i32, drow: i32) -> Self {
        let (e, n) = (dcol as f64, drow as f64);
        let len = (e * e + n * n).sqrt();
        Bearing {
            east: e / len,
            north: n / len,
        }
    }

    pub fn rotated_cw(self) -> Self {
        Bearing {
            east: self.north,
            north: -self.east,
        }
    }

    pub fn reversed(self) -> Self {
        Bearing {
            east: -self.east,
            north: -self.north,
        }
    }

    /// Cosine of the angle between two bearings.
    #[inline]
    pub fn cos_to(self, other: Bearing) -> f64 {
        self.east * other.east + self.north * other.north
    }

    pub fn east(self) -> f64 {
        self.east
    }

    pub fn north(self) -> f64 {
        self.north
    }

    pub fn degrees(self) -> f64 {
        self.east.atan2(self.north).to_degrees().rem_euclid(360.0)
    }
}
