//! Small fixed-capacity ambient vectors.
//!
//! Ambient dimensions up to [`MAX_AMBIENT`] are stored zero padded, so
//! Euclidean operations never need to know the actual dimension.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const MAX_AMBIENT: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AmbientVec(pub [f64; MAX_AMBIENT]);

impl AmbientVec {
    pub const ZERO: AmbientVec = AmbientVec([0.0; MAX_AMBIENT]);

    /// Panics if `s` is longer than [`MAX_AMBIENT`].
    pub fn from_slice(s: &[f64]) -> Self {
        assert!(s.len() <= MAX_AMBIENT, "ambient dimension above {MAX_AMBIENT}");
        let mut c = [0.0; MAX_AMBIENT];
        c[..s.len()].copy_from_slice(s);
        AmbientVec(c)
    }

    pub fn unit(i: usize) -> Self {
        let mut c = [0.0; MAX_AMBIENT];
        c[i] = 1.0;
        AmbientVec(c)
    }

    #[inline]
    pub fn dot(&self, o: &Self) -> f64 {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2] + self.0[3] * o.0[3]
    }

    #[inline]
    pub fn norm2(&self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.norm2().sqrt()
    }

    /// First `dim` coordinates.
    pub fn head(&self, dim: usize) -> &[f64] {
        &self.0[..dim]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl Index<usize> for AmbientVec {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for AmbientVec {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for AmbientVec {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        let mut c = self.0;
        for (a, b) in c.iter_mut().zip(o.0) {
            *a += b;
        }
        AmbientVec(c)
    }
}

impl AddAssign for AmbientVec {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for AmbientVec {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        let mut c = self.0;
        for (a, b) in c.iter_mut().zip(o.0) {
            *a -= b;
        }
        AmbientVec(c)
    }
}

impl SubAssign for AmbientVec {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl Mul<f64> for AmbientVec {
    type Output = Self;
    #[inline]
    fn mul(self, s: f64) -> Self {
        AmbientVec(self.0.map(|v| v * s))
    }
}

impl Neg for AmbientVec {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

impl Serialize for AmbientVec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        // trailing zero padding is dropped
        let len = self.0.iter().rposition(|v| *v != 0.0).map_or(0, |i| i + 1);
        self.0[..len].serialize(s)
    }
}

impl<'de> Deserialize<'de> for AmbientVec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        if v.len() > MAX_AMBIENT {
            return Err(serde::de::Error::custom(format!(
                "ambient vectors have at most {MAX_AMBIENT} components"
            )));
        }
        Ok(AmbientVec::from_slice(&v))
    }
}
