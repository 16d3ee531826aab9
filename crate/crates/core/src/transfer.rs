//! Transfer-matrix analytics: bulk and impurity transfer factors, analytic
//! Lyapunov exponents, eigenstate reconstruction by the scalar recursion,
//! profile fitting, and the scale-free collapse metric.
//!
//! The recursion acts on the `Q`-sublattice amplitudes of the rotated basis:
//! one bulk step multiplies by `A(E) = (E1^2 - J^2) / (2tJ)`, and each
//! impurity replaces two bulk steps by the two-step factor
//! `B(E, eta) = (E1 E2 - J^2)^2 / (2 t eta J^2)` with `E1 = E + i gamma`,
//! `E2 = E + i eta / 2`.

use ndarray::Array1;

use crate::eigen;
use crate::lattice::{rotation, Basis, Hamiltonian, LatticeConfig};
use crate::spectral::{self, LoopTag, SpectrumResult};
use crate::{C64, Error};

/// Impurity-free transfer factor `A(E)`.
///
/// Requires `t > 0` and `J != 0`; the result may legitimately vanish.
pub fn bulk_factor(e: C64, config: &LatticeConfig) -> C64 {
    debug_assert!(config.t() > 0.0 && config.j() != 0.0);
    let e1 = e + C64::new(0.0, config.gamma());
    let j = config.j();
    (e1 * e1 - j * j) / (2.0 * config.t() * j)
}

/// Impurity-modified two-step transfer factor `B(E, eta)`.
pub fn impurity_factor(e: C64, config: &LatticeConfig) -> Result<C64, Error> {
    let eta = config.eta();
    if eta == 0.0 {
        return Err(Error::ZeroEta);
    }
    debug_assert!(config.t() > 0.0 && config.j() != 0.0);
    let j = config.j();
    let e1 = e + C64::new(0.0, config.gamma());
    let e2 = e + C64::new(0.0, eta / 2.0);
    let w = e1 * e2 - j * j;
    Ok(w * w / (2.0 * config.t() * eta * j * j))
}

/// Analytic Lyapunov exponent per unit cell at energy `E`.
///
/// Returns `(kappa / N) [ln|2t/eta| + 2 ln|(E1 E2 - J^2)/(E1^2 - J^2)|]`;
/// the multi-impurity exponent is exactly `kappa` times the single-impurity
/// one. Configurations without impurities are extended: the exponent is 0.
pub fn lyapunov(e: C64, config: &LatticeConfig) -> Result<f64, Error> {
    if config.kappa() == 0 {
        return Ok(0.0);
    }
    let eta = config.eta();
    if eta == 0.0 {
        return Err(Error::ZeroEta);
    }
    let j = config.j();
    let e1 = e + C64::new(0.0, config.gamma());
    let e2 = e + C64::new(0.0, eta / 2.0);
    let w1 = e1 * e1 - j * j;
    if w1.norm() < 1e-13 {
        return Err(Error::SingularTransfer(e));
    }
    let w2 = e1 * e2 - j * j;
    let base = ((2.0 * config.t() / eta).abs().ln() + 2.0 * (w2.norm() / w1.norm()).ln())
        / config.n_cells() as f64;
    Ok(config.kappa() as f64 * base)
}

/// Energy-independent reference exponent `ln|2t/eta| / N` of conventional
/// impurity-induced scale-free localization.
pub fn lyapunov_conventional(config: &LatticeConfig) -> Result<f64, Error> {
    let eta = config.eta();
    if eta == 0.0 {
        return Err(Error::ZeroEta);
    }
    Ok((2.0 * config.t() / eta).abs().ln() / config.n_cells() as f64)
}

/// Least-squares Lyapunov fit attached to a profile.
#[derive(Debug, Clone, Copy)]
pub struct LyapunovFit {
    pub lambda: f64,
    pub stderr: f64,
    /// Fit window in unwrapped 1-based cell coordinates.
    pub window: (usize, usize),
}

/// Eigenstate profile over the ring.
#[derive(Debug, Clone)]
pub struct EigenstateProfile {
    pub e: C64,
    /// Rotated-basis amplitudes `(p_n, q_n)` per cell, 1-based order.
    pub amplitudes_ssh: Vec<(C64, C64)>,
    /// Unit-cell density `rho_n = |psi_n^A|^2 + |psi_n^B|^2`, normalized.
    pub density: Vec<f64>,
    /// Normalized coordinates `n / N`.
    pub coords: Vec<f64>,
    pub lambda_fit: Option<LyapunovFit>,
    /// Localization length `1/|lambda|`, when the fitted exponent is nonzero.
    pub xi: Option<f64>,
}

impl EigenstateProfile {
    pub fn n_cells(&self) -> usize {
        self.density.len()
    }

    /// `|q_n|` at an unwrapped 1-based cell coordinate.
    fn abs_q(&self, unwrapped: usize) -> f64 {
        let n = self.n_cells();
        let idx = (unwrapped - 1) % n;
        self.amplitudes_ssh[idx].1.norm()
    }

    /// Attach a fit, updating `xi`.
    pub fn set_fit(&mut self, fit: LyapunovFit) {
        self.xi = if fit.lambda != 0.0 { Some(1.0 / fit.lambda.abs()) } else { None };
        self.lambda_fit = Some(fit);
    }
}

fn profile_from_ssh_amplitudes(e: C64, amps: Vec<(C64, C64)>) -> EigenstateProfile {
    let n = amps.len();
    let norm2: f64 = amps.iter().map(|(p, q)| p.norm_sqr() + q.norm_sqr()).sum();
    let scale = 1.0 / norm2.sqrt();
    let amps: Vec<(C64, C64)> = amps.into_iter().map(|(p, q)| (p * scale, q * scale)).collect();
    // the cell rotation is unitary, so the unit-cell density is basis independent
    let density: Vec<f64> = amps.iter().map(|(p, q)| p.norm_sqr() + q.norm_sqr()).collect();
    let coords = (1..=n).map(|k| k as f64 / n as f64).collect();
    EigenstateProfile { e, amplitudes_ssh: amps, density, coords, lambda_fit: None, xi: None }
}

/// Reconstruct the eigenstate at a closure-condition eigenvalue by the
/// scalar recursion, seeded with `q = 1` at the cell after the first
/// impurity and propagated forward around the ring.
///
/// The rebuilt state is rotated back to the lattice basis and normalized;
/// its residual against the lattice Hamiltonian must come out below 1e-6.
pub fn reconstruct_eigenstate(e: C64, config: &LatticeConfig) -> Result<EigenstateProfile, Error> {
    let n = config.n_cells();
    let j = config.j();
    if j == 0.0 || config.t() == 0.0 {
        return Err(Error::SingularTransfer(e));
    }
    // closure pre-check
    if config.kappa() >= 1 {
        let (rm, rp) = spectral::closure_residual(e, config)?;
        if rm > 1e-4 || rp > 1e-4 {
            return Err(Error::NotAnEigenvalue(e, rm.max(rp)));
        }
    } else {
        let a = bulk_factor(e, config);
        if a.norm() < 1e-13 {
            return Err(Error::SingularTransfer(e));
        }
        let f = a.ln() * n as f64;
        let two_pi = std::f64::consts::TAU;
        let rp = (f.im - two_pi * (f.im / two_pi).round()).abs();
        if f.re.abs() > 1e-4 || rp > 1e-4 {
            return Err(Error::NotAnEigenvalue(e, f.re.abs().max(rp)));
        }
    }
    let e1 = e + C64::new(0.0, config.gamma());
    let e2 = e + C64::new(0.0, config.eta() / 2.0);
    let a = bulk_factor(e, config);
    let (into_imp, out_of_imp) = if config.kappa() >= 1 {
        let w = e1 * e2 - j * j;
        (w / (config.eta() * j), w / (2.0 * config.t() * j))
    } else {
        (C64::default(), C64::default())
    };
    let seed_cell = config.impurities().first().map(|&m| m % n + 1).unwrap_or(1);
    let mut q = vec![C64::default(); n];
    q[seed_cell - 1] = C64::from(1.0);
    for step in 1..n {
        let cell = (seed_cell - 1 + step) % n + 1;
        let prev = (seed_cell - 1 + step - 1) % n + 1;
        let ratio = if config.is_impurity(cell) {
            into_imp
        } else if config.is_impurity(prev) {
            out_of_imp
        } else {
            a
        };
        q[cell - 1] = ratio * q[prev - 1];
    }
    let mut amps = Vec::with_capacity(n);
    for cell in 1..=n {
        let prev = (cell + n - 2) % n + 1;
        let efac = if config.is_impurity(prev) { e2 } else { e1 };
        let p = efac * q[prev - 1] / j;
        amps.push((p, q[cell - 1]));
    }
    let profile = profile_from_ssh_amplitudes(e, amps);
    // residual contract against the lattice-basis Hamiltonian
    let h = Hamiltonian::build(config, Basis::CrossStitch);
    let v = cross_vector(&profile);
    let res = eigen::residual(h.matrix(), e, &v);
    if res > 1e-6 {
        return Err(Error::NotAnEigenvalue(e, res));
    }
    Ok(profile)
}

/// Profile of a diagonalization eigenvector given in the lattice basis.
pub fn profile_from_vector(e: C64, v_cross: &Array1<C64>, config: &LatticeConfig) -> EigenstateProfile {
    let n = config.n_cells();
    assert_eq!(v_cross.len(), 2 * n);
    let u = rotation(n);
    let ssh = u.apply_adjoint(v_cross.as_slice().unwrap());
    let amps: Vec<(C64, C64)> = (0..n).map(|c| (ssh[2 * c], ssh[2 * c + 1])).collect();
    profile_from_ssh_amplitudes(e, amps)
}

/// Lattice-basis state vector of a profile.
pub fn cross_vector(profile: &EigenstateProfile) -> Vec<C64> {
    let n = profile.n_cells();
    let u = rotation(n);
    let mut ssh = vec![C64::default(); 2 * n];
    for (c, (p, q)) in profile.amplitudes_ssh.iter().enumerate() {
        ssh[2 * c] = *p;
        ssh[2 * c + 1] = *q;
    }
    u.apply(&ssh)
}

/// Default fit window: the longest impurity-free arc, trimmed on both ends
/// (10% of `N`, reduced so at least 12 cells survive when arcs are short).
/// Coordinates are unwrapped 1-based cells, possibly extending past `N`.
pub fn default_fit_window(config: &LatticeConfig) -> Result<(usize, usize), Error> {
    let n = config.n_cells();
    if config.kappa() == 0 {
        return Ok((1, n));
    }
    let imps = config.impurities();
    let mut best: (usize, usize) = (0, 0); // (start cell after impurity, length)
    for (i, &m) in imps.iter().enumerate() {
        let next = if i + 1 < imps.len() { imps[i + 1] } else { imps[0] + n };
        let len = next - m - 1;
        if len > best.1 {
            best = (m + 1, len);
        }
    }
    let (start, len) = best;
    let trim = ((0.1 * n as f64).round() as usize).min(len.saturating_sub(12) / 2);
    let (a, b) = (start + trim, start + len - 1 - trim);
    if b + 1 - a < 10 {
        return Err(Error::WindowTooSmall(b + 1 - a));
    }
    Ok((a, b))
}

/// Least-squares slope of `-ln|q_n|` over an unwrapped window of cells.
///
/// A positive slope means decay with increasing cell index. Returns the
/// slope and its regression standard error.
pub fn fit_lyapunov(
    profile: &EigenstateProfile,
    window: (usize, usize),
    config: &LatticeConfig,
) -> Result<(f64, f64), Error> {
    let (na, nb) = window;
    if nb < na || nb - na + 1 < 10 {
        return Err(Error::WindowTooSmall(nb.saturating_sub(na) + 1));
    }
    let n = config.n_cells();
    for u in na..=nb {
        let cell = (u - 1) % n + 1;
        if config.is_impurity(cell) {
            return Err(Error::WindowCrossesImpurity(na, nb));
        }
    }
    let len = nb - na + 1;
    let xs: Vec<f64> = (0..len).map(|k| k as f64).collect();
    let ys: Vec<f64> = (na..=nb).map(|u| -profile.abs_q(u).max(1e-300).ln()).collect();
    let xbar = xs.iter().sum::<f64>() / len as f64;
    let ybar = ys.iter().sum::<f64>() / len as f64;
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    let stderr = (ss_res / (len as f64 - 2.0) / sxx).sqrt();
    Ok((slope, stderr))
}

/// Fit a profile over the default window and attach the result.
pub fn fit_default(profile: &mut EigenstateProfile, config: &LatticeConfig) -> Result<LyapunovFit, Error> {
    let window = default_fit_window(config)?;
    let (lambda, stderr) = fit_lyapunov(profile, window, config)?;
    let fit = LyapunovFit { lambda, stderr, window };
    profile.set_fit(fit);
    Ok(fit)
}

/// Loop side selector for matched spectral positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopSide {
    Right,
    Left,
}

/// Deterministic rule selecting one loop eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateSelector {
    MaxIm,
    MinIm,
    MaxRe,
    SmallestPositiveRe,
}

/// Pick the loop eigenvalue extremizing the selector on one loop.
/// Ties are broken lexicographically, so the choice is deterministic.
pub fn select_loop_state(
    result: &SpectrumResult,
    side: LoopSide,
    selector: StateSelector,
) -> Option<usize> {
    let tag = match side {
        LoopSide::Right => LoopTag::RightLoop,
        LoopSide::Left => LoopTag::LeftLoop,
    };
    let candidates = result.tagged(tag);
    let key = |i: &usize| result.eigenvalues[*i];
    match selector {
        StateSelector::MaxIm => candidates
            .iter()
            .max_by(|a, b| {
                let (x, y) = (key(a), key(b));
                x.im.total_cmp(&y.im).then(x.re.total_cmp(&y.re))
            })
            .copied(),
        StateSelector::MinIm => candidates
            .iter()
            .min_by(|a, b| {
                let (x, y) = (key(a), key(b));
                x.im.total_cmp(&y.im).then(x.re.total_cmp(&y.re))
            })
            .copied(),
        StateSelector::MaxRe => candidates
            .iter()
            .max_by(|a, b| {
                let (x, y) = (key(a), key(b));
                x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im))
            })
            .copied(),
        StateSelector::SmallestPositiveRe => candidates
            .iter()
            .filter(|i| result.eigenvalues[**i].re > spectral::DELTA_LOOP)
            .min_by(|a, b| {
                let (x, y) = (key(a), key(b));
                x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im))
            })
            .copied(),
    }
}

const COLLAPSE_GRID: usize = 1024;
const COLLAPSE_EXCLUDE_CELLS: usize = 1;

/// Scale-free collapse metric across system sizes.
///
/// Each density is rescaled to `N rho_n` against cell-midpoint coordinates,
/// resampled onto a common grid by periodic log-linear interpolation (the
/// envelopes are geometric, so the resampling is exact up to eigenvalue
/// drift), normalized to unit L2 on the compared region, and the maximum
/// pairwise L2 distance is returned. Cells within one site of an impurity
/// are excluded from both the nodes and the compared region: the two burst
/// cells carry size-dependent single-cell weight and would mask the envelope
/// comparison the metric is after.
///
/// Profiles must share `J`, `t`, `gamma`, the impurity count, and the
/// fractional impurity positions; `eta` may differ (a non-collapsing pair is
/// exactly what a large metric flags).
pub fn collapse_metric(items: &[(&EigenstateProfile, &LatticeConfig)]) -> Result<f64, Error> {
    if items.len() < 2 {
        return Err(Error::IncompatibleConfigs("need at least two profiles".into()));
    }
    let (_, c0) = items[0];
    for (p, c) in items {
        if p.n_cells() != c.n_cells() {
            return Err(Error::IncompatibleConfigs("profile/config size mismatch".into()));
        }
        if (c.j() - c0.j()).abs() > 1e-12
            || (c.t() - c0.t()).abs() > 1e-12
            || (c.gamma() - c0.gamma()).abs() > 1e-12
        {
            return Err(Error::IncompatibleConfigs("bulk parameters differ".into()));
        }
        if c.kappa() != c0.kappa() {
            return Err(Error::IncompatibleConfigs("impurity counts differ".into()));
        }
        let ftol = 0.5 / c.n_cells().min(c0.n_cells()) as f64;
        for (&m, &m0) in c.impurities().iter().zip(c0.impurities()) {
            let f = m as f64 / c.n_cells() as f64;
            let f0 = m0 as f64 / c0.n_cells() as f64;
            if (f - f0).abs() > ftol {
                return Err(Error::IncompatibleConfigs(format!(
                    "impurity fractions differ: {f:.4} vs {f0:.4}"
                )));
            }
        }
    }
    let g = COLLAPSE_GRID;
    let xs: Vec<f64> = (0..g).map(|k| (k as f64 + 0.5) / g as f64).collect();
    let mut excluded = vec![false; g];
    let mut curves: Vec<Vec<f64>> = Vec::with_capacity(items.len());
    let w = COLLAPSE_EXCLUDE_CELLS;
    for (p, c) in items {
        let n = c.n_cells();
        for &m in c.impurities() {
            // window out to the first valid node midpoint on each side
            let lo = (m as f64 - 1.5 - w as f64) / n as f64;
            let hi = (m as f64 + 0.5 + w as f64) / n as f64;
            for (k, &x) in xs.iter().enumerate() {
                for shift in [-1.0, 0.0, 1.0] {
                    let xv = x + shift;
                    if xv >= lo && xv < hi {
                        excluded[k] = true;
                    }
                }
            }
        }
        // log-density nodes away from impurities, periodically extended
        let mut nodes: Vec<(f64, f64)> = Vec::with_capacity(n);
        for cell in 1..=n {
            let near = c
                .impurities()
                .iter()
                .any(|&m| crate::lattice::pbc_distance(n, cell, m) <= w);
            if !near {
                let x = (cell as f64 - 0.5) / n as f64;
                let y = (n as f64 * p.density[cell - 1]).max(1e-300).ln();
                nodes.push((x, y));
            }
        }
        if nodes.len() < 4 {
            return Err(Error::IncompatibleConfigs("too few cells outside impurity windows".into()));
        }
        let mut ext: Vec<(f64, f64)> = Vec::with_capacity(3 * nodes.len());
        for &(x, y) in &nodes {
            ext.push((x - 1.0, y));
        }
        ext.extend_from_slice(&nodes);
        for &(x, y) in &nodes {
            ext.push((x + 1.0, y));
        }
        let curve: Vec<f64> = xs.iter().map(|&x| interp_linear(&ext, x).exp()).collect();
        curves.push(curve);
    }
    let kept: Vec<usize> = (0..g).filter(|&k| !excluded[k]).collect();
    if kept.len() < 16 {
        return Err(Error::IncompatibleConfigs("exclusion windows cover the whole ring".into()));
    }
    let weight = 1.0 / g as f64;
    let normed: Vec<Vec<f64>> = curves
        .iter()
        .map(|curve| {
            let norm = (kept.iter().map(|&k| curve[k] * curve[k] * weight).sum::<f64>()).sqrt();
            kept.iter().map(|&k| curve[k] / norm).collect()
        })
        .collect();
    let mut worst = 0.0f64;
    for i in 0..normed.len() {
        for jdx in i + 1..normed.len() {
            let d2: f64 = normed[i]
                .iter()
                .zip(&normed[jdx])
                .map(|(a, b)| (a - b) * (a - b) * weight)
                .sum();
            worst = worst.max(d2.sqrt());
        }
    }
    Ok(worst)
}

fn interp_linear(nodes: &[(f64, f64)], x: f64) -> f64 {
    debug_assert!(nodes.len() >= 2);
    let pos = nodes.partition_point(|&(nx, _)| nx < x);
    if pos == 0 {
        return nodes[0].1;
    }
    if pos >= nodes.len() {
        return nodes[nodes.len() - 1].1;
    }
    let (x0, y0) = nodes[pos - 1];
    let (x1, y1) = nodes[pos];
    if x1 == x0 {
        return y0;
    }
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}
