//! Gram spectra, water-filling and MIMO capacity.

use num_complex::Complex;
use num_traits::Zero;

use crate::channel::{build_dual, build_unpolarized, reference_gain, ChannelModelKind};
use crate::error::{domain, Error, Result};
use crate::geometry::{LinkConfig, UraGeometry};
use crate::matrix::ComplexMatrix;
use crate::scalar::Scalar;

/// Sweep budget for the Jacobi eigensolver.
pub const MAX_SWEEPS: usize = 100;

/// Eigenvalues of `H^H H`, sorted descending and clamped to be nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    pub eigenvalues: Vec<T>,
    /// Sum of the eigenvalues.
    pub trace: T,
}

impl<T: Scalar> Spectrum<T> {
    /// Wraps an arbitrary list of nonnegative gains, sorting it descending.
    pub fn from_eigenvalues(mut eigenvalues: Vec<T>) -> Result<Self> {
        if let Some(bad) = eigenvalues
            .iter()
            .find(|v| !(**v >= T::zero()) || !v.is_finite())
        {
            return Err(domain(format!(
                "eigenvalues must be finite and >= 0, found {bad}"
            )));
        }
        eigenvalues.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
        let trace = eigenvalues.iter().copied().sum();
        Ok(Self { eigenvalues, trace })
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// Outcome of water-filling over a set of eigenmode gains.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult<T> {
    /// Bits per channel use.
    pub capacity: T,
    /// Power per eigenmode, in the same order as the gains passed in.
    pub allocations: Vec<T>,
    /// Common level `sigma^2 / g_i + q_i` shared by every active mode.
    pub water_level: T,
    pub active_count: usize,
}

/// Spectrum of `h^H h`.
pub fn gram_spectrum<T: Scalar>(h: &ComplexMatrix<T>) -> Result<Spectrum<T>> {
    if !h.is_finite() {
        return Err(domain("channel matrix has non-finite entries"));
    }
    let gram = h.gram();
    let eig = hermitian_eigenvalues(&gram)?;
    let frob = h.frobenius_norm_sq();
    let mut spectrum = clamp_spectrum(eig, frob)?;
    // Jacobi rotations preserve the trace up to round-off.
    let tol = T::rel_tol(1e-9);
    if (spectrum.trace - frob).abs() > tol * frob.max(T::min_positive_value()) {
        return Err(Error::Numerical(format!(
            "eigenvalue sum {} deviates from squared Frobenius norm {}",
            spectrum.trace, frob
        )));
    }
    spectrum
        .eigenvalues
        .sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    Ok(spectrum)
}

fn clamp_spectrum<T: Scalar>(eig: Vec<T>, scale: T) -> Result<Spectrum<T>> {
    let floor = -T::rel_tol(1e-9) * scale;
    let mut out = Vec::with_capacity(eig.len());
    for v in eig {
        if v < floor {
            return Err(Error::Numerical(format!(
                "Gram eigenvalue {v} is below the round-off floor {floor}"
            )));
        }
        out.push(v.max(T::zero()));
    }
    let trace = out.iter().copied().sum();
    Ok(Spectrum {
        eigenvalues: out,
        trace,
    })
}

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Converges once the off-diagonal Frobenius norm drops below
/// `1e-12 * |trace|` (or the closest the scalar type can resolve). Only the
/// upper triangle and real diagonal of the input are trusted. Eigenvalues are
/// returned in diagonal order, unsorted.
pub fn hermitian_eigenvalues<T: Scalar>(a: &ComplexMatrix<T>) -> Result<Vec<T>> {
    if !a.is_square() {
        return Err(domain(format!(
            "eigensolver needs a square matrix, got {:?}",
            a.shape()
        )));
    }
    let n = a.rows();
    let mut w: Vec<Complex<T>> = a.as_slice().to_vec();
    for i in 0..n {
        w[i * n + i] = Complex::new(w[i * n + i].re, T::zero());
        for j in (i + 1)..n {
            w[j * n + i] = w[i * n + j].conj();
        }
    }

    let scale = (0..n).map(|i| w[i * n + i].re.abs()).sum::<T>();
    if scale.is_zero() || n < 2 {
        return Ok((0..n).map(|i| w[i * n + i].re).collect());
    }
    let target = T::rel_tol(1e-12) * scale;

    for _ in 0..MAX_SWEEPS {
        if offdiag_norm(&w, n) <= target {
            return Ok((0..n).map(|i| w[i * n + i].re).collect());
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                rotate(&mut w, n, p, q);
            }
        }
    }
    let off = offdiag_norm(&w, n);
    if off <= target {
        return Ok((0..n).map(|i| w[i * n + i].re).collect());
    }
    Err(Error::Numerical(format!(
        "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps on a {n}x{n} matrix: \
         off-diagonal norm {off} vs target {target}"
    )))
}

fn offdiag_norm<T: Scalar>(w: &[Complex<T>], n: usize) -> T {
    let mut s = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            s += w[i * n + j].norm_sqr();
        }
    }
    (T::lit(2.0) * s).sqrt()
}

/// Annihilates `(p, q)` with the unitary rotation
/// `G = [[c, s e^{i phi}], [-s e^{-i phi}, c]]` where `a_pq = r e^{i phi}`.
fn rotate<T: Scalar>(w: &mut [Complex<T>], n: usize, p: usize, q: usize) {
    let apq = w[p * n + q];
    let r = apq.norm();
    if r.is_zero() {
        return;
    }
    let app = w[p * n + p].re;
    let aqq = w[q * n + q].re;
    // Skip entries already negligible next to both diagonals.
    let tiny = T::epsilon() * T::epsilon();
    if r <= tiny * (app.abs() + aqq.abs()) {
        w[p * n + q] = Complex::zero();
        w[q * n + p] = Complex::zero();
        return;
    }
    let phase = apq / r;
    let theta = (aqq - app) / (T::lit(2.0) * r);
    let t = if theta.abs() > T::lit(1e150).min(T::max_value().sqrt()) {
        T::lit(0.5) / theta
    } else {
        let t = T::one() / (theta.abs() + (theta * theta + T::one()).sqrt());
        if theta < T::zero() {
            -t
        } else {
            t
        }
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;
    let s_fwd = phase * s; // G_pq
    let s_bwd = phase.conj() * s; // -G_qp

    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = w[k * n + p];
        let akq = w[k * n + q];
        let new_kp = akp * c - s_bwd * akq;
        let new_kq = s_fwd * akp + akq * c;
        w[k * n + p] = new_kp;
        w[k * n + q] = new_kq;
        w[p * n + k] = new_kp.conj();
        w[q * n + k] = new_kq.conj();
    }
    w[p * n + p] = Complex::new(app - t * r, T::zero());
    w[q * n + q] = Complex::new(aqq + t * r, T::zero());
    w[p * n + q] = Complex::zero();
    w[q * n + p] = Complex::zero();
}

/// Capacity-maximizing power split over eigenmode gains under a sum-power
/// constraint. Gains may come in any order; allocations follow that order.
pub fn waterfill<T: Scalar>(
    spectrum: &Spectrum<T>,
    total_power: T,
    noise: T,
) -> Result<CapacityResult<T>> {
    waterfill_gains(&spectrum.eigenvalues, total_power, noise)
}

pub fn waterfill_gains<T: Scalar>(
    gains: &[T],
    total_power: T,
    noise: T,
) -> Result<CapacityResult<T>> {
    if !(total_power >= T::zero()) || !total_power.is_finite() {
        return Err(domain(format!(
            "total power must be finite and >= 0, got {total_power}"
        )));
    }
    if !(noise > T::zero()) || !noise.is_finite() {
        return Err(domain(format!(
            "noise variance must be finite and > 0, got {noise}"
        )));
    }
    if let Some(bad) = gains.iter().find(|g| !(**g >= T::zero()) || !g.is_finite()) {
        return Err(domain(format!(
            "eigenmode gains must be finite and >= 0, found {bad}"
        )));
    }

    let mut order: Vec<usize> = (0..gains.len()).filter(|&i| gains[i] > T::zero()).collect();
    if order.is_empty() {
        return Err(domain(
            "all eigenvalues are zero: the channel carries no information",
        ));
    }
    order.sort_by(|&a, &b| {
        gains[b]
            .partial_cmp(&gains[a])
            .expect("finite")
            .then(a.cmp(&b))
    });

    let mut allocations = vec![T::zero(); gains.len()];
    if total_power.is_zero() {
        return Ok(CapacityResult {
            capacity: T::zero(),
            allocations,
            water_level: noise / gains[order[0]],
            active_count: 0,
        });
    }

    // Largest active set whose water level clears its weakest member's floor.
    let floors: Vec<T> = order.iter().map(|&i| noise / gains[i]).collect();
    let mut prefix = T::zero();
    let mut best = (1, total_power + floors[0]);
    for (k, &floor) in floors.iter().enumerate() {
        prefix += floor;
        let level = (total_power + prefix) / T::from_usize_exact(k + 1);
        if level > floor {
            best = (k + 1, level);
        } else {
            break;
        }
    }
    let (active_count, water_level) = best;

    let mut capacity = T::zero();
    for (&i, &floor) in order.iter().zip(&floors).take(active_count) {
        let q = (water_level - floor).max(T::zero());
        allocations[i] = q;
        capacity += (T::one() + q * gains[i] / noise).log2();
    }
    Ok(CapacityResult {
        capacity,
        allocations,
        water_level,
        active_count,
    })
}

/// Transmit power and noise variance implied by a link's reference SNR:
/// `sigma^2 = 1` and `P = 10^(snr_db / 10) / beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBudget<T> {
    pub power: T,
    pub noise: T,
}

pub fn power_budget<T: Scalar>(link: &LinkConfig<T>) -> PowerBudget<T> {
    PowerBudget {
        power: link.snr_linear() / reference_gain(link),
        noise: T::one(),
    }
}

/// Water-filling capacity of the full dual-polarized channel.
pub fn capacity_of_link<T: Scalar>(
    link: &LinkConfig<T>,
    g: &UraGeometry<T>,
    kind: ChannelModelKind,
) -> Result<CapacityResult<T>> {
    let h = build_dual(link, g, kind)?;
    capacity_of_matrix(&h, power_budget(link))
}

/// Water-filling capacity with single-polarized arrays and the same total
/// transmit power.
pub fn capacity_single_polarized<T: Scalar>(
    link: &LinkConfig<T>,
    g: &UraGeometry<T>,
    kind: ChannelModelKind,
) -> Result<CapacityResult<T>> {
    let h = build_unpolarized(link, g, kind)?;
    capacity_of_matrix(&h, power_budget(link))
}

pub fn capacity_of_matrix<T: Scalar>(
    h: &ComplexMatrix<T>,
    budget: PowerBudget<T>,
) -> Result<CapacityResult<T>> {
    let spectrum = gram_spectrum(h)?;
    waterfill(&spectrum, budget.power, budget.noise)
}
