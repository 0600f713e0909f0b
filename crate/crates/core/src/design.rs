//! Closed-form design rules for dual-polarized URAs at the capacity-optimal
//! spacing, and the row/column factorization search.

use crate::error::{domain, Result};
use crate::geometry::{aperture_dimensions, ApertureDimensions, LinkConfig, UraGeometry};
use crate::scalar::Scalar;

/// Spacing `sqrt(lambda d / m_dim)` that makes the Fresnel Gram a scaled
/// identity along one array dimension holding `m_dim` elements.
pub fn optimal_spacing<T: Scalar>(link: &LinkConfig<T>, m_dim: usize) -> Result<T> {
    if m_dim == 0 {
        return Err(domain("dimension must hold at least one antenna"));
    }
    Ok((link.wavelength * link.distance / T::from_usize_exact(m_dim)).sqrt())
}

/// `m_h x m_v` array at the optimal spacing in both dimensions.
pub fn optimal_geometry<T: Scalar>(
    link: &LinkConfig<T>,
    m_h: usize,
    m_v: usize,
    width: T,
) -> Result<UraGeometry<T>> {
    UraGeometry::new(
        m_h,
        m_v,
        optimal_spacing(link, m_h)?,
        optimal_spacing(link, m_v)?,
        width,
    )
}

/// Eigenvalues of `K^H K` for the polarization mixing matrix `K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationEigen<T> {
    /// Same-signal-on-both-polarizations mode, `1 + 2 sqrt((1 - k) k)`.
    pub mu1: T,
    /// Opposite-sign mode, `1 - 2 sqrt((1 - k) k)`.
    pub mu2: T,
}

pub fn polarization_eigenvalues<T: Scalar>(kappa: T) -> Result<PolarizationEigen<T>> {
    if !(kappa >= T::zero() && kappa <= T::lit(0.5)) {
        return Err(domain(format!("kappa must lie in [0, 1/2], got {kappa}")));
    }
    let spread = T::lit(2.0) * ((T::one() - kappa) * kappa).sqrt();
    Ok(PolarizationEigen {
        mu1: T::one() + spread,
        mu2: (T::one() - spread).max(T::zero()),
    })
}

/// Per-mode powers when the `2M` Gram eigenvalues take two levels,
/// `mu1 beta M` and `mu2 beta M`, each `M` times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelAllocation<T> {
    /// Power on each of the `M` strong modes.
    pub q1: T,
    /// Power on each of the `M` weak modes.
    pub q2: T,
    /// Total power at which the weak modes start receiving power. Infinite
    /// when `mu2 = 0`.
    pub threshold_power: T,
}

impl<T: Scalar> TwoLevelAllocation<T> {
    /// Whether every mode is active.
    pub fn both_active(&self, total_power: T) -> bool {
        total_power > self.threshold_power
    }
}

fn check_two_level_args<T: Scalar>(beta: T, m: usize, total_power: T, noise: T) -> Result<()> {
    if !(beta > T::zero()) || m == 0 || !(noise > T::zero()) || !(total_power >= T::zero()) {
        return Err(domain(format!(
            "need beta > 0, M >= 1, sigma^2 > 0, P >= 0; got beta={beta}, M={m}, sigma^2={noise}, P={total_power}"
        )));
    }
    Ok(())
}

pub fn two_level_allocation<T: Scalar>(
    mu: PolarizationEigen<T>,
    beta: T,
    m: usize,
    total_power: T,
    noise: T,
) -> Result<TwoLevelAllocation<T>> {
    check_two_level_args(beta, m, total_power, noise)?;
    let m_t = T::from_usize_exact(m);
    let threshold_power = if mu.mu2 > T::zero() {
        noise / (mu.mu2 * beta) - noise / (mu.mu1 * beta)
    } else {
        T::infinity()
    };
    let two = T::lit(2.0);
    let (q1, q2) = if total_power <= threshold_power {
        (total_power / m_t, T::zero())
    } else {
        let half = total_power / (two * m_t);
        let w1 = noise / (two * mu.mu1 * beta * m_t);
        let w2 = noise / (two * mu.mu2 * beta * m_t);
        (half + w2 - w1, half + w1 - w2)
    };
    Ok(TwoLevelAllocation {
        q1,
        q2,
        threshold_power,
    })
}

/// Capacity when both polarization modes are active:
/// `M log2(1 + P mu1 beta / 2 sigma^2 + (mu1 - mu2) / 2 mu2)
///  + M log2(1 + P mu2 beta / 2 sigma^2 + (mu2 - mu1) / 2 mu1)`.
pub fn high_snr_capacity<T: Scalar>(
    mu: PolarizationEigen<T>,
    beta: T,
    m: usize,
    total_power: T,
    noise: T,
) -> Result<T> {
    check_two_level_args(beta, m, total_power, noise)?;
    if !(mu.mu2 > T::zero()) {
        return Err(domain(
            "high-SNR capacity is undefined when mu2 = 0; use water-filling",
        ));
    }
    let alloc = two_level_allocation(mu, beta, m, total_power, noise)?;
    if total_power < alloc.threshold_power {
        return Err(domain(format!(
            "P = {total_power} is below the threshold {} where the weak modes switch on",
            alloc.threshold_power
        )));
    }
    let two = T::lit(2.0);
    let snr = total_power * beta / (two * noise);
    let m_t = T::from_usize_exact(m);
    let strong = T::one() + snr * mu.mu1 + (mu.mu1 - mu.mu2) / (two * mu.mu2);
    let weak = T::one() + snr * mu.mu2 + (mu.mu2 - mu.mu1) / (two * mu.mu1);
    Ok(m_t * (strong.log2() + weak.log2()))
}

/// Gram eigenvalues of the Fresnel dual channel at the optimal spacing:
/// `M` copies of `mu1 beta M` followed by `M` copies of `mu2 beta M`.
pub fn two_level_spectrum<T: Scalar>(mu: PolarizationEigen<T>, beta: T, m: usize) -> Vec<T> {
    let scale = beta * T::from_usize_exact(m);
    let mut v = vec![mu.mu1 * scale; m];
    v.extend(std::iter::repeat_n(mu.mu2 * scale, m));
    v
}

/// What the factorization search minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    /// `L_h * L_v`.
    Area,
    /// `sqrt(L_h^2 + L_v^2)`.
    ApertureLength,
}

impl Objective {
    pub fn label(self) -> &'static str {
        match self {
            Objective::Area => "area",
            Objective::ApertureLength => "aperture_length",
        }
    }

    fn evaluate<T: Scalar>(self, dims: &ApertureDimensions<T>) -> T {
        match self {
            Objective::Area => dims.area,
            Objective::ApertureLength => dims.aperture_length,
        }
    }
}

impl std::str::FromStr for Objective {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "area" => Ok(Objective::Area),
            "aperture_length" | "length" => Ok(Objective::ApertureLength),
            other => Err(crate::Error::Config(format!("unknown objective `{other}`"))),
        }
    }
}

/// One candidate factorization at the optimal spacings.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryChoice<T> {
    pub geometry: UraGeometry<T>,
    pub dimensions: ApertureDimensions<T>,
    pub objective: Objective,
    pub objective_value: T,
    /// Other factorizations `(m_h, m_v)` whose objective ties the returned one.
    pub ties: Vec<(usize, usize)>,
    /// False when the continuous optimum is not an integer factorization
    /// (aperture length with non-square `M`).
    pub continuous_optimum_attained: bool,
}

impl<T> GeometryChoice<T> {
    pub fn m_h(&self) -> usize {
        self.geometry.m_h
    }

    pub fn m_v(&self) -> usize {
        self.geometry.m_v
    }
}

/// All `(m_h, m_v)` with `m_h * m_v = m`, ordered by increasing `m_h`.
pub fn divisor_pairs(m: usize) -> Vec<(usize, usize)> {
    (1..=m)
        .filter(|h| m.is_multiple_of(*h))
        .map(|h| (h, m / h))
        .collect()
}

/// Exhaustive search over the integer factorizations of `m`.
///
/// Exact ties resolve to the larger `m_h` (a horizontal ULA when minimizing
/// area); the other tied pairs are listed in [`GeometryChoice::ties`].
pub fn optimize_factorization<T: Scalar>(
    m: usize,
    link: &LinkConfig<T>,
    width: T,
    objective: Objective,
) -> Result<GeometryChoice<T>> {
    if m == 0 {
        return Err(domain("M must be >= 1"));
    }
    link.validate()?;
    let mut candidates = Vec::new();
    for (m_h, m_v) in divisor_pairs(m) {
        let geometry = optimal_geometry(link, m_h, m_v, width)?;
        let dimensions = aperture_dimensions(&geometry);
        candidates.push((geometry, dimensions, objective.evaluate(&dimensions)));
    }
    let best_value = candidates.iter().map(|c| c.2).fold(T::infinity(), T::min);
    let tol = T::rel_tol(1e-12) * best_value.abs();
    let mut tied: Vec<_> = candidates
        .into_iter()
        .filter(|c| c.2 - best_value <= tol)
        .collect();
    let (geometry, dimensions, objective_value) = tied.pop().expect("at least one divisor pair");
    let root = (m as f64).sqrt().round() as usize;
    let continuous_optimum_attained = match objective {
        Objective::Area => true,
        Objective::ApertureLength => root * root == m,
    };
    Ok(GeometryChoice {
        geometry,
        dimensions,
        objective,
        objective_value,
        ties: tied.iter().map(|c| (c.0.m_h, c.0.m_v)).collect(),
        continuous_optimum_attained,
    })
}

/// Derivative of the optimally spaced area `L_h L_v` with respect to a
/// continuous `m_h`, with `m_v = M / m_h`:
///
/// `[W sqrt(lambda d m_h) (sqrt(M) m_h + sqrt(M) - M - m_h) + 2 lambda d (M - m_h^2)] / (2 sqrt(M) m_h^2)`.
///
/// Vanishes at `m_h = sqrt(M)`, where the area has a local maximum.
pub fn area_stationarity_check<T: Scalar>(
    m: usize,
    link: &LinkConfig<T>,
    width: T,
    m_h: T,
) -> Result<T> {
    let m_t = T::from_usize_exact(m);
    if m == 0 || !(m_h >= T::one() && m_h <= m_t) {
        return Err(domain(format!("m_h must lie in [1, {m}], got {m_h}")));
    }
    let ld = link.wavelength * link.distance;
    let root_m = m_t.sqrt();
    let width_term = width * (ld * m_h).sqrt() * (root_m * m_h + root_m - m_t - m_h);
    let spacing_term = T::lit(2.0) * ld * (m_t - m_h * m_h);
    Ok((width_term + spacing_term) / (T::lit(2.0) * root_m * m_h * m_h))
}
