//! The concrete trace-compatible model: the adjacency operator H₀ on ℓ²(ℤ),
//! (H₀ψ)(n) = ψ(n+1) + ψ(n−1), perturbed by finitely supported real
//! potentials. The absolutely continuous spectrum is the band [−2, 2] with
//! λ = 2 cos k, k ∈ (0, π), and the free resolvent has the closed form
//!
//!   r₀(z; n, m) = ζ^{|n−m|} / (ζ − ζ⁻¹),   ζ² − zζ + 1 = 0, |ζ| < 1.
//!
//! Boundary values on the band are taken from above (λ + i0), where the
//! branch ζ = e^{−ik} is fixed by Im r₀(λ+i0; n, n) > 0 and locked by a
//! regression test.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Result, SpectralError};
use crate::linalg::{CMat, HermitianMatrix};

/// Default exclusion margin around the band edges ±2, where the fiber
/// degenerates (sin k → 0).
pub const DEFAULT_EDGE_MARGIN: f64 = 1e-3;

/// A point where resolvent boundary data is evaluated: either a genuine
/// complex number off the band, or the upper boundary value λ + i0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralPoint {
    Complex(Complex64),
    PlusI0(f64),
}

impl SpectralPoint {
    pub fn complex(z: Complex64) -> Self {
        SpectralPoint::Complex(z)
    }

    pub fn real(x: f64) -> Self {
        SpectralPoint::Complex(Complex64::new(x, 0.0))
    }

    /// The non-tangential limit λ + i0 from the upper half plane.
    pub fn limit(lambda: f64) -> Self {
        SpectralPoint::PlusI0(lambda)
    }
}

/// Finitely supported real potential; the affine space of the model is
/// H₀ + {LatticePotential}. The empty potential is allowed (it is the zero
/// perturbation); stored couplings are never zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticePotential {
    sites: Vec<i64>,
    couplings: Vec<f64>,
}

impl LatticePotential {
    pub fn new(pairs: &[(i64, f64)]) -> Result<Self> {
        let mut sorted: Vec<(i64, f64)> = pairs.to_vec();
        sorted.sort_by_key(|&(n, _)| n);
        for w in sorted.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(SpectralError::Config(format!(
                    "duplicate potential site {}",
                    w[0].0
                )));
            }
        }
        for &(n, c) in &sorted {
            if !c.is_finite() {
                return Err(SpectralError::NonFinite(format!("coupling at site {n}")));
            }
            if c == 0.0 {
                return Err(SpectralError::Config(format!(
                    "zero coupling at site {n}; omit the site instead"
                )));
            }
        }
        Ok(LatticePotential {
            sites: sorted.iter().map(|&(n, _)| n).collect(),
            couplings: sorted.iter().map(|&(_, c)| c).collect(),
        })
    }

    pub fn empty() -> Self {
        LatticePotential {
            sites: Vec::new(),
            couplings: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn sites(&self) -> &[i64] {
        &self.sites
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn coupling_at(&self, site: i64) -> f64 {
        match self.sites.binary_search(&site) {
            Ok(i) => self.couplings[i],
            Err(_) => 0.0,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.sites.iter().copied().zip(self.couplings.iter().copied())
    }

    /// Σ_n V(n); enters the free-operator sum rule.
    pub fn total(&self) -> f64 {
        self.couplings.iter().sum()
    }

    /// Operator norm of the multiplication operator, max |c|.
    pub fn sup_norm(&self) -> f64 {
        self.couplings.iter().fold(0.0, |a, &c| a.max(c.abs()))
    }

    /// fa·self + fb·other, dropping sites whose coupling cancels exactly.
    pub fn linear_combination(&self, fa: f64, other: &LatticePotential, fb: f64) -> LatticePotential {
        let mut pairs: Vec<(i64, f64)> = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.len() || j < other.len() {
            let (site, value) = if j >= other.len()
                || (i < self.len() && self.sites[i] < other.sites[j])
            {
                let p = (self.sites[i], fa * self.couplings[i]);
                i += 1;
                p
            } else if i >= self.len() || other.sites[j] < self.sites[i] {
                let p = (other.sites[j], fb * other.couplings[j]);
                j += 1;
                p
            } else {
                let p = (
                    self.sites[i],
                    fa * self.couplings[i] + fb * other.couplings[j],
                );
                i += 1;
                j += 1;
                p
            };
            if value != 0.0 {
                pairs.push((site, value));
            }
        }
        LatticePotential {
            sites: pairs.iter().map(|&(n, _)| n).collect(),
            couplings: pairs.iter().map(|&(_, c)| c).collect(),
        }
    }

    pub fn scaled(&self, factor: f64) -> LatticePotential {
        self.linear_combination(factor, &LatticePotential::empty(), 0.0)
    }

    pub fn minus(&self, other: &LatticePotential) -> LatticePotential {
        self.linear_combination(1.0, other, -1.0)
    }
}

/// V = G*JG on the channel-source space K = ℂ^m: g_i = √|c_i| and
/// J = diag(sign c_i), restricted to the support sites.
#[derive(Debug, Clone, PartialEq)]
pub struct FactoredPerturbation {
    sites: Vec<i64>,
    g: Vec<f64>,
    j: Vec<f64>,
}

/// Factor a nonempty potential over its support subspace.
pub fn factor_potential(v: &LatticePotential) -> Result<FactoredPerturbation> {
    if v.is_empty() {
        return Err(SpectralError::Config(
            "cannot factor the empty potential".into(),
        ));
    }
    Ok(FactoredPerturbation {
        sites: v.sites.clone(),
        g: v.couplings.iter().map(|c| c.abs().sqrt()).collect(),
        j: v.couplings.iter().map(|c| c.signum()).collect(),
    })
}

impl FactoredPerturbation {
    pub fn rank(&self) -> usize {
        self.sites.len()
    }

    pub fn sites(&self) -> &[i64] {
        &self.sites
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    pub fn j_signs(&self) -> &[f64] {
        &self.j
    }

    pub fn j_matrix(&self) -> CMat {
        CMat::from_fn(self.rank(), self.rank(), |i, jx| {
            if i == jx {
                Complex64::new(self.j[i], 0.0)
            } else {
                Complex64::ZERO
            }
        })
    }

    /// Reconstruct the potential G*JG.
    pub fn potential(&self) -> LatticePotential {
        LatticePotential {
            sites: self.sites.clone(),
            couplings: self
                .g
                .iter()
                .zip(&self.j)
                .map(|(g, j)| j * g * g)
                .collect(),
        }
    }
}

/// The root ζ of ζ² − zζ + 1 = 0 with |ζ| < 1 (for the +i0 tag, e^{−ik}).
fn zeta(point: SpectralPoint) -> Result<Complex64> {
    match point {
        SpectralPoint::Complex(z) => {
            if z.im == 0.0 && z.re.abs() <= 2.0 {
                return Err(SpectralError::InsideBand { re: z.re, im: z.im });
            }
            let s = (z * z - 4.0).sqrt();
            let c1 = 0.5 * (z - s);
            let c2 = 0.5 * (z + s);
            let zt = if c1.norm() <= c2.norm() { c1 } else { c2 };
            if (zt.norm() - 1.0).abs() < 1e-14 {
                return Err(SpectralError::InsideBand { re: z.re, im: z.im });
            }
            Ok(zt)
        }
        SpectralPoint::PlusI0(lambda) => {
            if lambda.abs() >= 2.0 {
                return Err(SpectralError::BandEdge {
                    lambda,
                    margin: 0.0,
                });
            }
            let k = (lambda / 2.0).acos();
            Ok(Complex64::new(k.cos(), -k.sin()))
        }
    }
}

/// Free resolvent kernel r₀(z; n, m) = ⟨δ_n, (H₀ − z)⁻¹ δ_m⟩.
pub fn free_resolvent_kernel(point: SpectralPoint, n: i64, m: i64) -> Result<Complex64> {
    let zt = zeta(point)?;
    let d = n.abs_diff(m) as i32;
    Ok(zt.powi(d) / (zt - zt.inv()))
}

/// T(z) = G R_z(H) G* evaluated on the channel-source space, together with
/// its Hermitian imaginary part B = (T − T*)/2i.
#[derive(Debug, Clone)]
pub struct BoundaryT {
    pub point: SpectralPoint,
    pub matrix: CMat,
    pub b: CMat,
}

impl BoundaryT {
    pub(crate) fn from_matrix(point: SpectralPoint, matrix: CMat) -> Self {
        let b = imaginary_part(&matrix);
        BoundaryT { point, matrix, b }
    }
}

/// (M − M*) / 2i.
pub fn imaginary_part(m: &CMat) -> CMat {
    let half_i = Complex64::new(0.0, 0.5);
    (m.adjoint() - m) * half_i
}

/// T₀(z)[i][j] = g_i g_j r₀(z; n_i, n_j) for the free operator.
pub fn sandwiched_resolvent(f: &FactoredPerturbation, point: SpectralPoint) -> Result<BoundaryT> {
    let m = cross_t_matrix(f.sites(), f.g(), f.sites(), f.g(), point)?;
    Ok(BoundaryT::from_matrix(point, m))
}

/// Cross T-matrix block g_a ⊗ g_b weighted kernel values between two site
/// lists; the building block for rebased segment operators.
pub fn cross_t_matrix(
    sites_a: &[i64],
    g_a: &[f64],
    sites_b: &[i64],
    g_b: &[f64],
    point: SpectralPoint,
) -> Result<CMat> {
    let zt = zeta(point)?;
    let denom = zt - zt.inv();
    Ok(CMat::from_fn(sites_a.len(), sites_b.len(), |i, j| {
        let d = sites_a[i].abs_diff(sites_b[j]) as i32;
        zt.powi(d) / denom * (g_a[i] * g_b[j])
    }))
}

/// Channel map Z(λ; G): K → ℂ² onto the two-dimensional fiber at
/// λ = 2 cos k (channels k and −k). Normalized by the gauge identity
/// π Z*Z = B₀(λ+i0), which forces ρ(k)² = 1/(4π sin k).
#[derive(Debug, Clone)]
pub struct ChannelMap {
    pub lambda: f64,
    pub k: f64,
    pub rho: f64,
    pub z: CMat,
}

pub fn channel_map(f: &FactoredPerturbation, lambda: f64, edge_margin: f64) -> Result<ChannelMap> {
    let (z, k, rho) = free_channel_rows(f.sites(), f.g(), lambda, edge_margin)?;
    Ok(ChannelMap { lambda, k, rho, z })
}

/// Plane-wave rows ρ g_j e^{∓ikn_j} for an arbitrary site list.
pub fn free_channel_rows(
    sites: &[i64],
    g: &[f64],
    lambda: f64,
    edge_margin: f64,
) -> Result<(CMat, f64, f64)> {
    if lambda.abs() >= 2.0 - edge_margin {
        return Err(SpectralError::BandEdge {
            lambda,
            margin: edge_margin,
        });
    }
    let k = (lambda / 2.0).acos();
    let rho = 1.0 / (4.0 * std::f64::consts::PI * k.sin()).sqrt();
    let z = CMat::from_fn(2, sites.len(), |row, j| {
        let phase = k * sites[j] as f64;
        let wave = if row == 0 {
            Complex64::new(phase.cos(), -phase.sin())
        } else {
            Complex64::new(phase.cos(), phase.sin())
        };
        wave * (rho * g[j])
    });
    Ok((z, k, rho))
}

/// Kernel v(λ, λ′) = Z(λ) J Z*(λ′) of the perturbation in the direct
/// integral representation; a 2×2 fiber block.
pub fn perturbation_kernel(
    f: &FactoredPerturbation,
    lambda: f64,
    lambda_prime: f64,
    edge_margin: f64,
) -> Result<CMat> {
    let za = channel_map(f, lambda, edge_margin)?;
    let zb = channel_map(f, lambda_prime, edge_margin)?;
    Ok(&za.z * f.j_matrix() * zb.z.adjoint())
}

/// A discrete eigenvalue of H₀ + rV outside the band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundState {
    pub energy: f64,
    /// Set when the root sits at tolerance-level distance from a band edge.
    pub edge_warning: bool,
}

const BOUND_STATE_TOL: f64 = 1e-12;
const EDGE_WARNING_DISTANCE: f64 = 1e-9;

/// All real energies outside [−2, 2] where 1 + r T₀(E) J is singular.
///
/// Uses the Birman–Schwinger matrix W(E) = J + T(E) of the scaled potential:
/// dT/dE = G R² G* is positive definite, so the negative-eigenvalue count of
/// W is monotone in E on each side of the band and bracketing by counts
/// finds every root.
pub fn bound_states(f: &FactoredPerturbation, r: f64) -> Result<Vec<BoundState>> {
    if !r.is_finite() {
        return Err(SpectralError::NonFinite("coupling r".into()));
    }
    let scaled = f.potential().scaled(r);
    if scaled.is_empty() {
        return Ok(Vec::new());
    }
    let fs = factor_potential(&scaled)?;
    let reach = scaled.sup_norm() + 1.0;
    let mut energies = Vec::new();
    for (lo, hi) in [
        (-2.0 - reach, -2.0 - BOUND_STATE_TOL),
        (2.0 + BOUND_STATE_TOL, 2.0 + reach),
    ] {
        collect_roots(&fs, lo, hi, &mut energies)?;
    }
    energies.sort_by(f64::total_cmp);
    Ok(energies
        .into_iter()
        .map(|e| BoundState {
            energy: e,
            edge_warning: (e.abs() - 2.0).abs() < EDGE_WARNING_DISTANCE,
        })
        .collect())
}

/// Number of negative eigenvalues of J + T(E) (real symmetric off the band).
fn negative_count(f: &FactoredPerturbation, energy: f64) -> Result<usize> {
    let t = sandwiched_resolvent(f, SpectralPoint::real(energy))?;
    let m = f.rank();
    let w = DMatrix::<f64>::from_fn(m, m, |i, j| {
        t.matrix[(i, j)].re + if i == j { f.j_signs()[i] } else { 0.0 }
    });
    let eigs = w.symmetric_eigenvalues();
    Ok(eigs.iter().filter(|&&x| x < 0.0).count())
}

fn collect_roots(
    f: &FactoredPerturbation,
    lo: f64,
    hi: f64,
    out: &mut Vec<f64>,
) -> Result<()> {
    let c_lo = negative_count(f, lo)?;
    let c_hi = negative_count(f, hi)?;
    if c_lo == c_hi {
        return Ok(());
    }
    if hi - lo <= BOUND_STATE_TOL {
        let mid = 0.5 * (lo + hi);
        for _ in 0..c_lo.abs_diff(c_hi) {
            out.push(mid);
        }
        return Ok(());
    }
    let mid = 0.5 * (lo + hi);
    collect_roots(f, lo, mid, out)?;
    collect_roots(f, mid, hi, out)
}

/// Normalized bound-state data recovered from the Birman–Schwinger null
/// vector: amplitudes φ = Gψ on the support, ‖ψ‖², and the flow weight
/// ⟨ψ, Uψ⟩ of the factored potential U.
#[derive(Debug, Clone)]
pub struct BoundStateVector {
    pub energy: f64,
    pub amplitudes: Vec<f64>,
    pub norm_sq: f64,
    pub weight: f64,
}

pub fn bound_state_vector(f: &FactoredPerturbation, energy: f64) -> Result<BoundStateVector> {
    if energy.abs() <= 2.0 {
        return Err(SpectralError::BandEdge {
            lambda: energy,
            margin: 0.0,
        });
    }
    let m = f.rank();
    let t = sandwiched_resolvent(f, SpectralPoint::real(energy))?;
    let w = DMatrix::<f64>::from_fn(m, m, |i, j| {
        t.matrix[(i, j)].re + if i == j { f.j_signs()[i] } else { 0.0 }
    });
    let se = w.clone().symmetric_eigen();
    let (imin, _) = se
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, &v)| {
            if v.abs() < bv {
                (i, v.abs())
            } else {
                (bi, bv)
            }
        });
    let eta: Vec<f64> = se.eigenvectors.column(imin).iter().copied().collect();
    // ψ(n) = −Σ_p r₀(E; n, u_p) g_p η_p, with η the null vector of J + T(E);
    // φ = Gψ = Jη on the support.
    let phi: Vec<f64> = (0..m).map(|p| f.j_signs()[p] * eta[p]).collect();
    let zt = zeta(SpectralPoint::real(energy))?;
    let zr = zt.re; // real off the band
    let denom_sq = (zr - 1.0 / zr) * (zr - 1.0 / zr);
    let mut norm_sq = 0.0;
    for p in 0..m {
        for q in 0..m {
            let d = f.sites()[p].abs_diff(f.sites()[q]) as i32;
            // Σ_n ζ^{|n−a|+|n−b|} summed in closed form.
            let lattice_sum =
                (d as f64 + 1.0) * zr.powi(d) + 2.0 * zr.powi(d + 2) / (1.0 - zr * zr);
            norm_sq += f.g()[p] * f.g()[q] * eta[p] * eta[q] * lattice_sum / denom_sq;
        }
    }
    let weight_num: f64 = (0..m).map(|p| f.j_signs()[p] * phi[p] * phi[p]).sum();
    Ok(BoundStateVector {
        energy,
        amplitudes: phi,
        norm_sq,
        weight: weight_num / norm_sq,
    })
}

/// Dirichlet truncation of H₀ + V onto the centered window of N sites.
pub fn truncate(v: &LatticePotential, n: usize) -> Result<HermitianMatrix> {
    let (diag, off) = truncate_tridiagonal(v, n)?;
    HermitianMatrix::from_tridiagonal(&diag, &off)
}

/// Diagonal and off-diagonal of the Dirichlet truncation; site s sits at
/// index s + (N−1)/2.
pub fn truncate_tridiagonal(v: &LatticePotential, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n < 3 || n % 2 == 0 {
        return Err(SpectralError::Config(format!(
            "truncation size must be odd and at least 3, got {n}"
        )));
    }
    let half = (n as i64 - 1) / 2;
    let mut diag = vec![0.0; n];
    for (site, c) in v.iter() {
        if site.abs() > half {
            return Err(SpectralError::Config(format!(
                "potential site {site} falls outside the truncation window [-{half}, {half}]"
            )));
        }
        diag[(site + half) as usize] = c;
    }
    let off = vec![1.0; n - 1];
    Ok((diag, off))
}
