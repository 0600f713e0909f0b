//! Array layout: element indexing, propagation distances and physical size of
//! a uniform rectangular array (URA).
//!
//! Antenna locations are numbered row by row starting at 1. Location `m` sits
//! in column `i(m)` and row `j(m)`, both 1-based.

use crate::error::{domain, Result};
use crate::scalar::Scalar;

/// Layout of one array. Transmitter and receiver share the same layout and
/// face each other broadside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UraGeometry<T> {
    /// Antennas per horizontal row.
    pub m_h: usize,
    /// Number of vertically stacked rows.
    pub m_v: usize,
    /// Horizontal spacing in meters.
    pub delta_h: T,
    /// Vertical spacing in meters.
    pub delta_v: T,
    /// Width of a single element in meters.
    pub width: T,
}

impl<T: Scalar> UraGeometry<T> {
    pub fn new(m_h: usize, m_v: usize, delta_h: T, delta_v: T, width: T) -> Result<Self> {
        let g = Self {
            m_h,
            m_v,
            delta_h,
            delta_v,
            width,
        };
        g.validate()?;
        Ok(g)
    }

    /// Square array with equal spacing in both dimensions.
    pub fn square(side: usize, delta: T, width: T) -> Result<Self> {
        Self::new(side, side, delta, delta, width)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_h == 0 || self.m_v == 0 {
            return Err(domain(format!(
                "array needs at least one row and column, got {}x{}",
                self.m_h, self.m_v
            )));
        }
        for (name, v) in [("delta_h", self.delta_h), ("delta_v", self.delta_v)] {
            if !v.is_finite() || v < T::zero() {
                return Err(domain(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if !self.width.is_finite() || self.width <= T::zero() {
            return Err(domain(format!(
                "width must be finite and > 0, got {}",
                self.width
            )));
        }
        Ok(())
    }

    /// Total number of antenna locations `M = m_h * m_v`.
    #[inline]
    pub fn len(&self) -> usize {
        self.m_h * self.m_v
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(i(m), j(m))` for a 1-based location index.
    pub fn position(&self, m: usize) -> Result<(usize, usize)> {
        self.check_index(m)?;
        Ok(position_unchecked(m, self.m_h))
    }

    /// Propagation distance between transmit location `m` and receive
    /// location `k` at broadside separation `distance`.
    pub fn pairwise_distance(&self, distance: T, m: usize, k: usize) -> Result<T> {
        if !(distance > T::zero()) {
            return Err(domain(format!("link distance must be > 0, got {distance}")));
        }
        let (di, dj) = self.offsets(m, k)?;
        Ok((distance * distance + self.squared_offset(di, dj)).sqrt())
    }

    /// Integer column/row offsets between two 1-based locations.
    pub fn offsets(&self, m: usize, k: usize) -> Result<(usize, usize)> {
        let (im, jm) = self.position(m)?;
        let (ik, jk) = self.position(k)?;
        Ok((im.abs_diff(ik), jm.abs_diff(jk)))
    }

    /// Squared in-plane separation for integer offsets, in expanded form.
    #[inline]
    pub fn squared_offset(&self, di: usize, dj: usize) -> T {
        let di = T::from_usize_exact(di * di);
        let dj = T::from_usize_exact(dj * dj);
        di * self.delta_h * self.delta_h + dj * self.delta_v * self.delta_v
    }

    pub fn dimensions(&self) -> ApertureDimensions<T> {
        aperture_dimensions(self)
    }

    fn check_index(&self, m: usize) -> Result<()> {
        if m == 0 || m > self.len() {
            return Err(domain(format!(
                "antenna index {m} outside 1..={}",
                self.len()
            )));
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn position_unchecked(m: usize, m_h: usize) -> (usize, usize) {
    let row = (m - 1) / m_h;
    (m - m_h * row, row + 1)
}

/// Horizontal index `i(m) = m - m_h * floor((m - 1) / m_h)`.
///
/// `m_total` bounds the valid range of `m`.
pub fn horizontal_index(m: usize, m_h: usize, m_total: usize) -> Result<usize> {
    check_index_args(m, m_h, m_total)?;
    Ok(position_unchecked(m, m_h).0)
}

/// Vertical index `j(m) = 1 + floor((m - 1) / m_h)`.
pub fn vertical_index(m: usize, m_h: usize, m_total: usize) -> Result<usize> {
    check_index_args(m, m_h, m_total)?;
    Ok(position_unchecked(m, m_h).1)
}

fn check_index_args(m: usize, m_h: usize, m_total: usize) -> Result<()> {
    if m_h == 0 {
        return Err(domain("m_h must be >= 1"));
    }
    if m == 0 || m > m_total {
        return Err(domain(format!("antenna index {m} outside 1..={m_total}")));
    }
    Ok(())
}

/// Physical extent of an array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApertureDimensions<T> {
    /// Horizontal length including one element width.
    pub l_h: T,
    /// Vertical length including one element width.
    pub l_v: T,
    /// Center-to-center diagonal between the outermost locations.
    pub diagonal: T,
    /// Diagonal of the bounding rectangle, `sqrt(l_h^2 + l_v^2)`.
    pub aperture_length: T,
    pub area: T,
}

pub fn aperture_dimensions<T: Scalar>(g: &UraGeometry<T>) -> ApertureDimensions<T> {
    let span_h = g.delta_h * T::from_usize_exact(g.m_h - 1);
    let span_v = g.delta_v * T::from_usize_exact(g.m_v - 1);
    let l_h = span_h + g.width;
    let l_v = span_v + g.width;
    ApertureDimensions {
        l_h,
        l_v,
        diagonal: span_h.hypot(span_v),
        aperture_length: l_h.hypot(l_v),
        area: l_h * l_v,
    }
}

/// Cross-polar leakage, given either as impurity `gamma` or leakage `kappa`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Polarization<T> {
    /// Fraction of power an element radiates into the opposite polarization.
    Gamma(T),
    /// Leakage `kappa = 2 (1 - gamma) gamma`.
    Kappa(T),
}

impl<T: Scalar> Polarization<T> {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Polarization::Gamma(g) if !(g >= T::zero() && g <= T::one()) => {
                Err(domain(format!("gamma must lie in [0, 1], got {g}")))
            }
            Polarization::Kappa(k) if !(k >= T::zero() && k <= T::lit(0.5)) => {
                Err(domain(format!("kappa must lie in [0, 1/2], got {k}")))
            }
            _ => Ok(()),
        }
    }

    pub fn kappa(&self) -> T {
        match *self {
            Polarization::Gamma(g) => kappa_from_gamma(g),
            Polarization::Kappa(k) => k,
        }
    }
}

#[inline]
pub fn kappa_from_gamma<T: Scalar>(gamma: T) -> T {
    T::lit(2.0) * (T::one() - gamma) * gamma
}

/// Physical scenario shared by both arrays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkConfig<T> {
    /// Broadside separation `d` in meters.
    pub distance: T,
    pub wavelength: T,
    pub polarization: Polarization<T>,
    /// Reference SNR `P beta / sigma^2` in dB.
    pub snr_db: T,
}

impl<T: Scalar> LinkConfig<T> {
    pub fn new(
        distance: T,
        wavelength: T,
        polarization: Polarization<T>,
        snr_db: T,
    ) -> Result<Self> {
        let link = Self {
            distance,
            wavelength,
            polarization,
            snr_db,
        };
        link.validate()?;
        Ok(link)
    }

    pub fn with_kappa(distance: T, wavelength: T, kappa: T, snr_db: T) -> Result<Self> {
        Self::new(distance, wavelength, Polarization::Kappa(kappa), snr_db)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.distance > T::zero()) || !self.distance.is_finite() {
            return Err(domain(format!(
                "distance must be > 0, got {}",
                self.distance
            )));
        }
        if !(self.wavelength > T::zero()) || !self.wavelength.is_finite() {
            return Err(domain(format!(
                "wavelength must be > 0, got {}",
                self.wavelength
            )));
        }
        if !self.snr_db.is_finite() {
            return Err(domain(format!(
                "snr_db must be finite, got {}",
                self.snr_db
            )));
        }
        self.polarization.validate()
    }

    #[inline]
    pub fn kappa(&self) -> T {
        self.polarization.kappa()
    }

    /// Same link with a different leakage.
    pub fn with_leakage(&self, kappa: T) -> Self {
        Self {
            polarization: Polarization::Kappa(kappa),
            ..*self
        }
    }

    /// `10^(snr_db / 10)`.
    #[inline]
    pub fn snr_linear(&self) -> T {
        T::lit(10.0).powf(self.snr_db / T::lit(10.0))
    }
}
