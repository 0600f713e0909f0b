//! Line-of-sight channel matrices between two broadside URAs.
//!
//! Entry `(k, m)` of a single-polarized matrix couples transmit location `m`
//! to receive location `k` (both 1-based in the geometry API, 0-based as
//! matrix indices). Dual-polarized matrices stack the first polarization in
//! rows/columns `0..M` and the second in `M..2M`.

use num_complex::Complex;

use crate::error::{domain, Result};
use crate::geometry::{LinkConfig, UraGeometry};
use crate::matrix::ComplexMatrix;
use crate::scalar::Scalar;

/// Which propagation model fills the channel matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelModelKind {
    /// Per-pair gains and spherical-wavefront phases.
    Exact,
    /// Common gain and quadratic (Fresnel) phases.
    Approx,
}

impl ChannelModelKind {
    pub fn label(self) -> &'static str {
        match self {
            ChannelModelKind::Exact => "exact",
            ChannelModelKind::Approx => "approx",
        }
    }
}

impl std::str::FromStr for ChannelModelKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(ChannelModelKind::Exact),
            "approx" | "approximate" | "fresnel" => Ok(ChannelModelKind::Approx),
            other => Err(crate::Error::Config(format!(
                "unknown channel model `{other}`"
            ))),
        }
    }
}

/// Free-space gain `(lambda / (4 pi dist))^2` between isotropic antennas.
pub fn channel_gain<T: Scalar>(link: &LinkConfig<T>, dist: T) -> Result<T> {
    if !(dist > T::zero()) {
        return Err(domain(format!("distance must be > 0, got {dist}")));
    }
    Ok(gain_unchecked(link.wavelength, dist))
}

#[inline]
fn gain_unchecked<T: Scalar>(wavelength: T, dist: T) -> T {
    let a = wavelength / (T::lit(4.0) * T::PI() * dist);
    a * a
}

/// Gain at the broadside reference distance, `beta`.
pub fn reference_gain<T: Scalar>(link: &LinkConfig<T>) -> T {
    gain_unchecked(link.wavelength, link.distance)
}

/// `M x M` single-polarized channel.
pub fn build_unpolarized<T: Scalar>(
    link: &LinkConfig<T>,
    g: &UraGeometry<T>,
    kind: ChannelModelKind,
) -> Result<ComplexMatrix<T>> {
    link.validate()?;
    g.validate()?;
    let table = OffsetTable::new(link, g, kind);
    let m_h = g.m_h;
    Ok(ComplexMatrix::from_fn(g.len(), g.len(), |k, m| {
        let (ik, jk) = (k % m_h, k / m_h);
        let (im, jm) = (m % m_h, m / m_h);
        table.get(im.abs_diff(ik), jm.abs_diff(jk))
    }))
}

/// Entries depend only on the integer column/row offsets, so each distinct
/// offset is evaluated once.
struct OffsetTable<T> {
    m_h: usize,
    values: Vec<Complex<T>>,
}

impl<T: Scalar> OffsetTable<T> {
    fn new(link: &LinkConfig<T>, g: &UraGeometry<T>, kind: ChannelModelKind) -> Self {
        let d = link.distance;
        let lambda = link.wavelength;
        let two_pi = T::lit(2.0) * T::PI();
        let sqrt_beta = reference_gain(link).sqrt();
        let mut values = Vec::with_capacity(g.m_h * g.m_v);
        for dj in 0..g.m_v {
            for di in 0..g.m_h {
                let delta = g.squared_offset(di, dj);
                let z = match kind {
                    ChannelModelKind::Exact => {
                        let dist = (d * d + delta).sqrt();
                        // dist - d without cancellation
                        let excess = delta / (dist + d);
                        let amp = gain_unchecked(lambda, dist).sqrt();
                        Complex::from_polar(amp, -two_pi * excess / lambda)
                    }
                    ChannelModelKind::Approx => {
                        Complex::from_polar(sqrt_beta, -T::PI() * delta / (d * lambda))
                    }
                };
                values.push(z);
            }
        }
        Self { m_h: g.m_h, values }
    }

    #[inline]
    fn get(&self, di: usize, dj: usize) -> Complex<T> {
        self.values[dj * self.m_h + di]
    }
}

/// Polarization mixing matrix `[[sqrt(1-k), sqrt(k)], [sqrt(k), sqrt(1-k)]]`.
pub fn polarization_matrix<T: Scalar>(kappa: T) -> Result<ComplexMatrix<T>> {
    if !(kappa >= T::zero() && kappa <= T::lit(0.5)) {
        return Err(domain(format!("kappa must lie in [0, 1/2], got {kappa}")));
    }
    let co = (T::one() - kappa).sqrt();
    let cross = kappa.sqrt();
    ComplexMatrix::from_real(2, 2, &[co, cross, cross, co])
}

/// `2M x 2M` dual-polarized channel `K (x) H`.
pub fn build_dual<T: Scalar>(
    link: &LinkConfig<T>,
    g: &UraGeometry<T>,
    kind: ChannelModelKind,
) -> Result<ComplexMatrix<T>> {
    let k = polarization_matrix(link.kappa())?;
    let h = build_unpolarized(link, g, kind)?;
    Ok(kronecker(&k, &h))
}

/// Kronecker product; block `(r, c)` of the result is `a[(r, c)] * b`.
pub fn kronecker<T: Scalar>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let (br, bc) = b.shape();
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}
