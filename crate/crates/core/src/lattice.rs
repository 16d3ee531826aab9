//! Model construction: the lossy cross-stitch ring, its one-way SSH form,
//! and the local unitary rotation connecting the two.
//!
//! Cell indices are 1-based (`n = 1..=N`) to match the usual lattice
//! labeling; matrix storage is interleaved per cell, so site `A` (or `P`) of
//! cell `n` sits at row `2(n-1)` and site `B` (or `Q`) at row `2(n-1)+1`.
//! Periodic boundary conditions are imposed throughout; effective boundaries
//! arise only from impurity cells.

use ndarray::Array2;

use crate::{C64, Error};

/// Validated model parametrization.
///
/// An impurity cell swaps the bulk intracell hopping `t` for `eta/2` and the
/// bulk B-site loss `2*gamma` for `eta`, so `eta` tunes the cell between the
/// decoupled (`eta = 0`) and overdamped (`eta >> 1`) limits through the
/// bulk-identical point (`eta = 2t = 2*gamma`).
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeConfig {
    n: usize,
    j: f64,
    t: f64,
    gamma: f64,
    eta: f64,
    impurities: Vec<usize>,
}

impl LatticeConfig {
    /// Validate and build a configuration.
    ///
    /// Enforces `N >= 4`, nonnegative `t`, `gamma`, `eta`, impurity indices
    /// in `1..=N` with pairwise PBC distance at least 2, and `2*kappa <= N-1`
    /// so the closure exponent stays positive.
    pub fn new(
        n: usize,
        j: f64,
        t: f64,
        gamma: f64,
        eta: f64,
        impurities: impl IntoIterator<Item = usize>,
    ) -> Result<Self, Error> {
        if n < 4 {
            return Err(Error::BadSize(format!("N = {n} < 4")));
        }
        for (name, value) in [("t", t), ("gamma", gamma), ("eta", eta)] {
            if value < 0.0 || !value.is_finite() {
                return Err(Error::NegativeParameter { name, value });
            }
        }
        if !j.is_finite() {
            return Err(Error::NegativeParameter { name: "J", value: j });
        }
        let mut imp: Vec<usize> = impurities.into_iter().collect();
        imp.sort_unstable();
        for &m in &imp {
            if m < 1 || m > n {
                return Err(Error::BadSize(format!("impurity cell {m} outside 1..={n}")));
            }
        }
        for i in 0..imp.len() {
            for k in (i + 1)..imp.len() {
                let d = pbc_distance(n, imp[i], imp[k]);
                if d < 2 {
                    return Err(Error::AdjacentImpurities(imp[i], imp[k]));
                }
            }
        }
        if 2 * imp.len() > n - 1 {
            return Err(Error::BadSize(format!(
                "2*kappa = {} exceeds N-1 = {}",
                2 * imp.len(),
                n - 1
            )));
        }
        Ok(Self { n, j, t, gamma, eta, impurities: imp })
    }

    pub fn n_cells(&self) -> usize {
        self.n
    }

    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Sorted impurity cell indices (1-based).
    pub fn impurities(&self) -> &[usize] {
        &self.impurities
    }

    /// Number of impurities.
    pub fn kappa(&self) -> usize {
        self.impurities.len()
    }

    pub fn is_impurity(&self, cell: usize) -> bool {
        self.impurities.binary_search(&cell).is_ok()
    }

    /// Intracell hopping of cell `n`: `t` in the bulk, `eta/2` at impurities.
    pub fn t_at(&self, cell: usize) -> f64 {
        if self.is_impurity(cell) {
            self.eta / 2.0
        } else {
            self.t
        }
    }

    /// B-site loss rate of cell `n`: `2*gamma` in the bulk, `eta` at impurities.
    pub fn gamma_at(&self, cell: usize) -> f64 {
        if self.is_impurity(cell) {
            self.eta
        } else {
            2.0 * self.gamma
        }
    }

    /// Same configuration with a different impurity strength.
    pub fn with_eta(&self, eta: f64) -> Result<Self, Error> {
        Self::new(self.n, self.j, self.t, self.gamma, eta, self.impurities.iter().copied())
    }
}

/// Minimum ring distance between two cells.
pub fn pbc_distance(n: usize, a: usize, b: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(n - d)
}

/// Which single-particle basis a Hamiltonian is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// Lattice basis of the lossy cross-stitch model; loss only on B sites.
    CrossStitch,
    /// Rotated basis with one-way intracell hopping; loss on both sites.
    Ssh,
}

/// Orientation of the conjugation that maps the cross-stitch matrix onto the
/// SSH form. Fixed by construction to `U^dagger H U`; `verify_mapping` tests
/// both orientations and reports which one matches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    UDaggerHU,
    UHUDagger,
}

/// Dense 2N x 2N single-particle Hamiltonian with basis metadata.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    basis: Basis,
    orientation: Orientation,
    data: Array2<C64>,
}

impl Hamiltonian {
    /// Build the Hamiltonian of a validated configuration in the given basis.
    ///
    /// The cross-stitch form encodes the equations of motion as
    /// `i dpsi/dt = H psi` with intracell coupling `t_n`, intercell A-A
    /// coupling `+iJ/2` (backward) / `-iJ/2` (forward), B-B couplings with the
    /// opposite signs, A-B cross-cell couplings `J/2`, and loss `-i gamma_n`
    /// on B sites. The SSH form has one-way intracell hopping `2t` (bulk) or
    /// `eta` (impurity) from Q to P, bidirectional intercell hopping `J`, and
    /// loss `-i gamma_n / 2` on both sites of each cell.
    pub fn build(config: &LatticeConfig, basis: Basis) -> Self {
        let n = config.n_cells();
        let dim = 2 * n;
        let mut h = Array2::<C64>::zeros((dim, dim));
        let j = config.j();
        let i = C64::new(0.0, 1.0);
        match basis {
            Basis::CrossStitch => {
                for c in 0..n {
                    let cell = c + 1;
                    let (a, b) = (2 * c, 2 * c + 1);
                    let cm = (c + n - 1) % n;
                    let cp = (c + 1) % n;
                    let (am, bm) = (2 * cm, 2 * cm + 1);
                    let (ap, bp) = (2 * cp, 2 * cp + 1);
                    let tn = C64::from(config.t_at(cell));
                    let gn = config.gamma_at(cell);
                    h[[a, b]] += tn;
                    h[[a, am]] += i * j / 2.0;
                    h[[a, ap]] -= i * j / 2.0;
                    h[[a, bm]] += C64::from(j / 2.0);
                    h[[a, bp]] += C64::from(j / 2.0);
                    h[[b, a]] += tn;
                    h[[b, bm]] -= i * j / 2.0;
                    h[[b, bp]] += i * j / 2.0;
                    h[[b, am]] += C64::from(j / 2.0);
                    h[[b, ap]] += C64::from(j / 2.0);
                    h[[b, b]] -= i * gn;
                }
            }
            Basis::Ssh => {
                for c in 0..n {
                    let cell = c + 1;
                    let (p, q) = (2 * c, 2 * c + 1);
                    let pp = 2 * ((c + 1) % n);
                    let hop = if config.is_impurity(cell) { config.eta() } else { 2.0 * config.t() };
                    let loss = config.gamma_at(cell) / 2.0;
                    h[[p, q]] += C64::from(hop);
                    h[[p, p]] -= i * loss;
                    h[[q, q]] -= i * loss;
                    h[[pp, q]] += C64::from(j);
                    h[[q, pp]] += C64::from(j);
                }
            }
        }
        Self { basis, orientation: Orientation::UDaggerHU, data: h }
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    /// Conjugation orientation that maps this matrix family between bases.
    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_cells(&self) -> usize {
        self.dim() / 2
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.data
    }

    /// Mutable access to the raw matrix, for diagnostics and test hooks such
    /// as overriding the loss pattern.
    pub fn matrix_mut(&mut self) -> &mut Array2<C64> {
        &mut self.data
    }

    /// Max row sum of absolute values; an upper bound on the spectral radius.
    pub fn row_sum_bound(&self) -> f64 {
        let n = self.dim();
        let mut best = 0.0f64;
        for r in 0..n {
            let mut s = 0.0;
            for c in 0..n {
                s += self.data[[r, c]].norm();
            }
            best = best.max(s);
        }
        best
    }
}

/// Block-diagonal unitary made of the per-cell rotation
/// `U = (1/sqrt(2)) [[1, -i], [-i, 1]]` repeated on every cell.
#[derive(Debug, Clone, Copy)]
pub struct BlockUnitary {
    n: usize,
}

/// The per-cell rotation block shared by all cells.
pub fn rotation_block() -> [[C64; 2]; 2] {
    let s = 1.0 / 2.0_f64.sqrt();
    let i = C64::new(0.0, 1.0);
    [[C64::from(s), -i * s], [-i * s, C64::from(s)]]
}

/// Build the cellwise rotation for `n >= 1` cells.
pub fn rotation(n: usize) -> BlockUnitary {
    assert!(n >= 1, "rotation needs at least one cell");
    BlockUnitary { n }
}

impl BlockUnitary {
    pub fn n_cells(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn block(&self) -> [[C64; 2]; 2] {
        rotation_block()
    }

    /// Dense matrix form.
    pub fn to_dense(&self) -> Array2<C64> {
        let u = rotation_block();
        let mut out = Array2::<C64>::zeros((self.dim(), self.dim()));
        for c in 0..self.n {
            for r in 0..2 {
                for s in 0..2 {
                    out[[2 * c + r, 2 * c + s]] = u[r][s];
                }
            }
        }
        out
    }

    /// Apply `U` to a state vector, cell by cell.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.dim());
        let u = rotation_block();
        let mut out = vec![C64::default(); x.len()];
        for c in 0..self.n {
            let (a, b) = (x[2 * c], x[2 * c + 1]);
            out[2 * c] = u[0][0] * a + u[0][1] * b;
            out[2 * c + 1] = u[1][0] * a + u[1][1] * b;
        }
        out
    }

    /// Apply `U^dagger` to a state vector, cell by cell.
    pub fn apply_adjoint(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.dim());
        let u = rotation_block();
        let mut out = vec![C64::default(); x.len()];
        for c in 0..self.n {
            let (a, b) = (x[2 * c], x[2 * c + 1]);
            out[2 * c] = u[0][0].conj() * a + u[1][0].conj() * b;
            out[2 * c + 1] = u[0][1].conj() * a + u[1][1].conj() * b;
        }
        out
    }

    /// Conjugate a cell-local banded matrix: `U^dagger M U` or `U M U^dagger`.
    ///
    /// Exploits the block-diagonal structure, touching each (row cell,
    /// column cell) block once.
    pub fn conjugate(&self, m: &Array2<C64>, orientation: Orientation) -> Array2<C64> {
        assert_eq!(m.nrows(), self.dim());
        let u = rotation_block();
        // left = U^dagger, right = U for UDaggerHU; swapped adjoints otherwise.
        let (left, right): ([[C64; 2]; 2], [[C64; 2]; 2]) = match orientation {
            Orientation::UDaggerHU => (adjoint2(u), u),
            Orientation::UHUDagger => (u, adjoint2(u)),
        };
        let n = self.n;
        let mut out = Array2::<C64>::zeros((2 * n, 2 * n));
        for rc in 0..n {
            for cc in 0..n {
                // skip structurally zero blocks for speed
                if pbc_distance(n, rc + 1, cc + 1) > 1 && n > 2 {
                    continue;
                }
                let mut blk = [[C64::default(); 2]; 2];
                for r in 0..2 {
                    for s in 0..2 {
                        blk[r][s] = m[[2 * rc + r, 2 * cc + s]];
                    }
                }
                let lm = mul2(left, blk);
                let res = mul2(lm, right);
                for r in 0..2 {
                    for s in 0..2 {
                        out[[2 * rc + r, 2 * cc + s]] = res[r][s];
                    }
                }
            }
        }
        out
    }
}

fn adjoint2(m: [[C64; 2]; 2]) -> [[C64; 2]; 2] {
    [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]]
}

fn mul2(a: [[C64; 2]; 2], b: [[C64; 2]; 2]) -> [[C64; 2]; 2] {
    let mut out = [[C64::default(); 2]; 2];
    for r in 0..2 {
        for s in 0..2 {
            out[r][s] = a[r][0] * b[0][s] + a[r][1] * b[1][s];
        }
    }
    out
}

/// Result of checking the basis equivalence for one configuration.
#[derive(Debug, Clone, Copy)]
pub struct MappingReport {
    /// Max absolute entry of `C H_cross C^dagger - H_ssh` for the winning
    /// conjugation orientation.
    pub deviation: f64,
    /// Orientation that matched.
    pub orientation: Orientation,
}

/// Conjugate the cross-stitch matrix with the cell rotation in both
/// orientations and compare against the analytic SSH matrix.
///
/// Returns the smaller deviation and the matching orientation; errors with
/// `MappingMismatch` when even the better orientation deviates by more than
/// 1e-12 (for the symmetric choice `t = gamma` the match is exact to
/// rounding; `t != gamma` leaves a genuine residual of size `|t - gamma|`).
pub fn verify_mapping(config: &LatticeConfig) -> Result<MappingReport, Error> {
    let cross = Hamiltonian::build(config, Basis::CrossStitch);
    let ssh = Hamiltonian::build(config, Basis::Ssh);
    let u = rotation(config.n_cells());
    let mut best = MappingReport { deviation: f64::INFINITY, orientation: Orientation::UDaggerHU };
    for orientation in [Orientation::UDaggerHU, Orientation::UHUDagger] {
        let rotated = u.conjugate(cross.matrix(), orientation);
        let mut dev = 0.0f64;
        for (x, y) in rotated.iter().zip(ssh.matrix().iter()) {
            dev = dev.max((x - y).norm());
        }
        if dev < best.deviation {
            best = MappingReport { deviation: dev, orientation };
        }
    }
    if best.deviation > 1e-12 {
        return Err(Error::MappingMismatch(best.deviation));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, eta: f64, imps: &[usize]) -> LatticeConfig {
        LatticeConfig::new(n, 1.0, 0.5, 0.5, eta, imps.iter().copied()).unwrap()
    }

    #[test]
    fn validation_accepts_reference_config() {
        let c = LatticeConfig::new(100, 1.0, 0.5, 0.5, 3f64.exp(), [40]).unwrap();
        assert_eq!(c.kappa(), 1);
        assert_eq!(c.impurities(), &[40]);
    }

    #[test]
    fn validation_rejects_adjacent_impurities() {
        let e = LatticeConfig::new(100, 1.0, 0.5, 0.5, 1.0, [40, 41]).unwrap_err();
        assert!(matches!(e, Error::AdjacentImpurities(40, 41)));
        // PBC wraparound: cells 1 and 100 are neighbors
        let e = LatticeConfig::new(100, 1.0, 0.5, 0.5, 1.0, [1, 100]).unwrap_err();
        assert!(matches!(e, Error::AdjacentImpurities(1, 100)));
    }

    #[test]
    fn validation_rejects_bad_sizes_and_signs() {
        assert!(matches!(
            LatticeConfig::new(3, 1.0, 0.5, 0.5, 1.0, []),
            Err(Error::BadSize(_))
        ));
        // 2*kappa > N-1
        assert!(matches!(
            LatticeConfig::new(4, 1.0, 0.5, 0.5, 1.0, [1, 3]),
            Err(Error::BadSize(_))
        ));
        assert!(matches!(
            LatticeConfig::new(10, 1.0, -0.5, 0.5, 1.0, []),
            Err(Error::NegativeParameter { name: "t", .. })
        ));
        assert!(matches!(
            LatticeConfig::new(10, 1.0, 0.5, 0.5, -1.0, []),
            Err(Error::NegativeParameter { name: "eta", .. })
        ));
    }

    #[test]
    fn impurity_cell_at_bulk_point_matches_bulk() {
        // eta = 1 with 2t = 2gamma = 1: t_m = eta/2 = t, gamma_m = eta = 2gamma
        let c = cfg(4, 1.0, &[2]);
        assert_eq!(c.t_at(2), c.t_at(1));
        assert_eq!(c.gamma_at(2), c.gamma_at(1));
        let with_imp = Hamiltonian::build(&c, Basis::CrossStitch);
        let without = Hamiltonian::build(&cfg(4, 1.0, &[]), Basis::CrossStitch);
        let dev: f64 = with_imp
            .matrix()
            .iter()
            .zip(without.matrix().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert_eq!(dev, 0.0);
    }

    #[test]
    fn ssh_intracell_hopping_is_one_way() {
        let c = cfg(6, 1e-3, &[3]);
        let h = Hamiltonian::build(&c, Basis::Ssh);
        for cell in 1..=6usize {
            let (p, q) = (2 * (cell - 1), 2 * (cell - 1) + 1);
            let expect = if cell == 3 { 1e-3 } else { 1.0 };
            assert!((h.matrix()[[p, q]] - C64::from(expect)).norm() < 1e-15);
            assert_eq!(h.matrix()[[q, p]], C64::default());
        }
    }

    #[test]
    fn decoupled_cells_leave_diagonal_loss_only() {
        let c = LatticeConfig::new(4, 0.0, 0.0, 0.5, 0.0, []).unwrap();
        let h = Hamiltonian::build(&c, Basis::CrossStitch);
        for r in 0..8 {
            for s in 0..8 {
                let v = h.matrix()[[r, s]];
                if r == s && r % 2 == 1 {
                    assert!((v - C64::new(0.0, -1.0)).norm() < 1e-15);
                } else {
                    assert_eq!(v, C64::default());
                }
            }
        }
    }

    #[test]
    fn rotation_single_cell_is_the_reference_block() {
        let u = rotation(1).to_dense();
        let s = 1.0 / 2.0_f64.sqrt();
        assert!((u[[0, 0]] - C64::from(s)).norm() < 1e-16);
        assert!((u[[0, 1]] - C64::new(0.0, -s)).norm() < 1e-16);
        assert!((u[[1, 0]] - C64::new(0.0, -s)).norm() < 1e-16);
        assert!((u[[1, 1]] - C64::from(s)).norm() < 1e-16);
    }

    #[test]
    fn rotation_is_unitary() {
        for n in [1usize, 3, 7] {
            let u = rotation(n).to_dense();
            let mut dev = 0.0f64;
            for r in 0..2 * n {
                for c in 0..2 * n {
                    let mut s = C64::default();
                    for k in 0..2 * n {
                        s += u[[r, k]] * u[[c, k]].conj();
                    }
                    let expect = if r == c { C64::from(1.0) } else { C64::default() };
                    dev = dev.max((s - expect).norm());
                }
            }
            assert!(dev < 1e-14, "unitarity deviation {dev}");
        }
    }

    #[test]
    fn double_rotation_equals_cellwise_squared_block() {
        // applying U twice to a vector == applying the 2x2 block U*U per cell
        let n = 3;
        let u = rotation(n);
        let x: Vec<C64> = (0..2 * n)
            .map(|k| C64::new(0.3 * k as f64 - 1.0, 0.1 * (k as f64).sin()))
            .collect();
        let twice = u.apply(&u.apply(&x));
        let uu = mul2(rotation_block(), rotation_block());
        for c in 0..n {
            let (a, b) = (x[2 * c], x[2 * c + 1]);
            let ea = uu[0][0] * a + uu[0][1] * b;
            let eb = uu[1][0] * a + uu[1][1] * b;
            assert!((twice[2 * c] - ea).norm() < 1e-15);
            assert!((twice[2 * c + 1] - eb).norm() < 1e-15);
        }
    }

    #[test]
    fn mapping_matches_for_symmetric_parameters() {
        let report = verify_mapping(&cfg(10, 1e-3, &[4])).unwrap();
        assert!(report.deviation < 1e-12, "deviation {}", report.deviation);
        assert_eq!(report.orientation, Orientation::UDaggerHU);
        let report = verify_mapping(&cfg(12, 1.0, &[5])).unwrap();
        assert!(report.deviation < 1e-12);
    }

    #[test]
    fn mapping_fails_for_asymmetric_bulk() {
        // t != gamma leaves a real residual |t - gamma| in the intracell block
        let c = LatticeConfig::new(8, 1.0, 0.7, 0.3, 1.0, [3]).unwrap();
        let e = verify_mapping(&c).unwrap_err();
        match e {
            Error::MappingMismatch(dev) => assert!((dev - 0.4).abs() < 1e-12),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn trace_identity_holds_in_both_bases() {
        for (eta, imps) in [(1e-3, vec![4]), (1e3, vec![3, 8]), (0.0, vec![5])] {
            let c = cfg(10, eta, &imps);
            let kappa = c.kappa() as f64;
            let expect = C64::new(0.0, -(2.0 * c.gamma() * (10.0 - kappa) + eta * kappa));
            for basis in [Basis::CrossStitch, Basis::Ssh] {
                let h = Hamiltonian::build(&c, basis);
                let tr: C64 = (0..h.dim()).map(|k| h.matrix()[[k, k]]).sum();
                assert!((tr - expect).norm() < 1e-10, "basis {basis:?} trace {tr}");
            }
        }
    }

    #[test]
    fn couplings_are_local_on_the_ring() {
        let c = cfg(12, 1e3, &[2, 7]);
        for basis in [Basis::CrossStitch, Basis::Ssh] {
            let h = Hamiltonian::build(&c, basis);
            for r in 0..h.dim() {
                for s in 0..h.dim() {
                    if h.matrix()[[r, s]] != C64::default() {
                        let d = pbc_distance(12, r / 2 + 1, s / 2 + 1);
                        assert!(d <= 1, "nonlocal element at ({r}, {s})");
                    }
                }
            }
        }
    }

    #[test]
    fn loss_part_is_positive_semidefinite() {
        let c = cfg(10, 1e3, &[3, 8]);
        // lattice basis: the anti-Hermitian part is purely the B-site loss diagonal
        let h = Hamiltonian::build(&c, Basis::CrossStitch);
        for r in 0..h.dim() {
            for s in 0..h.dim() {
                let anti = (h.matrix()[[r, s]] - h.matrix()[[s, r]].conj()) / 2.0;
                if r == s {
                    assert!(anti.re.abs() < 1e-15 && anti.im <= 0.0);
                    if r % 2 == 0 {
                        assert_eq!(anti, C64::default(), "loss on an A site");
                    }
                } else {
                    assert!(anti.norm() < 1e-15, "off-diagonal anti-Hermitian part");
                }
            }
        }
        // rotated basis: the loss part -(H - H^dagger)/(2i) is cell-block
        // diagonal with 2x2 blocks [[g, i t'], [-i t', g]], eigenvalues g -+ t';
        // at the symmetric parameters g = t' in every cell, so both are >= 0
        let h = Hamiltonian::build(&c, Basis::Ssh);
        for cell in 1..=10usize {
            let (p, q) = (2 * (cell - 1), 2 * (cell - 1) + 1);
            let g = -(h.matrix()[[p, p]] - h.matrix()[[p, p]].conj()).im / 2.0;
            let cpl = (h.matrix()[[p, q]] - h.matrix()[[q, p]].conj()) / 2.0;
            let eig_low = g - cpl.norm();
            assert!(eig_low >= -1e-12, "loss block indefinite at cell {cell}: {eig_low}");
        }
    }
}
