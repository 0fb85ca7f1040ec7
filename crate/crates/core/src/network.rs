//! Looped interferometer: block partition of the unitary, feedback phases and
//! the spatio-temporal transfer matrices.
//!
//! The last `L` modes are the looped ones; output `M-L+i` is routed back to
//! input `M-L+i` one injection period later. Other wirings are expressed by
//! permuting the unitary before it enters [`InterferometerSpec`].

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FockState, LossModel, SourceModel};
use crate::linalg::{check_isometry, ComplexMatrix};

const UNITARITY_TOL: f64 = 1e-10;

/// Full description of a looped device.
#[derive(Clone, Debug)]
pub struct InterferometerSpec {
    unitary: ComplexMatrix,
    loops: usize,
    feedback_phases: Vec<f64>,
    injection: Vec<FockState>,
    loss: LossModel,
    source: SourceModel,
}

impl InterferometerSpec {
    /// Device with zero feedback phases, empty schedule and an ideal source.
    pub fn new(unitary: ComplexMatrix, loops: usize) -> Result<Self> {
        if !unitary.is_square() {
            return Err(Error::InvalidSpec(format!(
                "unitary must be square, got {}x{}",
                unitary.rows(),
                unitary.cols()
            )));
        }
        let modes = unitary.rows();
        if loops >= modes {
            return Err(Error::InvalidSpec(format!(
                "loop count {loops} must be below the mode count {modes}"
            )));
        }
        let cols = check_isometry(&unitary, UNITARITY_TOL)?;
        let rows = check_isometry(&unitary.adjoint(), UNITARITY_TOL)?;
        if !cols.is_isometry || !rows.is_isometry {
            return Err(Error::InvalidSpec(format!(
                "matrix is not unitary (deviation {:.3e})",
                cols.deviation.max(rows.deviation)
            )));
        }
        Ok(Self {
            unitary,
            loops,
            feedback_phases: vec![0.0; loops],
            injection: Vec::new(),
            loss: LossModel::ideal(modes - loops, modes - loops),
            source: SourceModel::ideal(),
        })
    }

    /// Sets the fiber phases; angles are wrapped into `[0, 2pi)`.
    pub fn with_phases(mut self, phases: Vec<f64>) -> Result<Self> {
        if phases.len() != self.loops {
            return Err(Error::Dimension(format!(
                "{} feedback phases for {} loops",
                phases.len(),
                self.loops
            )));
        }
        if phases.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidSpec("non-finite feedback phase".into()));
        }
        self.feedback_phases = phases
            .into_iter()
            .map(|p| p.rem_euclid(std::f64::consts::TAU))
            .collect();
        Ok(self)
    }

    /// Sets the per-iteration input states over the `M-L` external modes.
    pub fn with_injection(mut self, injection: Vec<FockState>) -> Result<Self> {
        let ext = self.external_modes();
        if let Some((t, s)) = injection.iter().enumerate().find(|(_, s)| s.modes() != ext) {
            return Err(Error::InvalidSpec(format!(
                "injection {} has {} modes, expected {ext}",
                t + 1,
                s.modes()
            )));
        }
        self.injection = injection;
        Ok(self)
    }

    pub fn with_loss(mut self, loss: LossModel) -> Result<Self> {
        let ext = self.external_modes();
        if loss.input_efficiency().len() != ext || loss.output_efficiency().len() != ext {
            return Err(Error::InvalidSpec(format!(
                "loss model must cover {ext} external inputs and outputs"
            )));
        }
        self.loss = loss;
        Ok(self)
    }

    pub fn with_source(mut self, source: SourceModel) -> Self {
        self.source = source;
        self
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    /// M
    pub fn modes(&self) -> usize {
        self.unitary.rows()
    }

    /// L
    pub fn loops(&self) -> usize {
        self.loops
    }

    /// M - L
    pub fn external_modes(&self) -> usize {
        self.modes() - self.loops
    }

    pub fn feedback_phases(&self) -> &[f64] {
        &self.feedback_phases
    }

    pub fn injection(&self) -> &[FockState] {
        &self.injection
    }

    pub fn loss(&self) -> &LossModel {
        &self.loss
    }

    pub fn source(&self) -> &SourceModel {
        &self.source
    }

    /// Concatenated input over the `(M-L) T` spatio-temporal input modes.
    pub fn schedule_input(&self, iterations: usize) -> Result<FockState> {
        if iterations == 0 {
            return Err(Error::Count("at least one iteration is required".into()));
        }
        if self.injection.len() < iterations {
            return Err(Error::InvalidSpec(format!(
                "injection schedule covers {} iterations, {iterations} requested",
                self.injection.len()
            )));
        }
        Ok(FockState::concat(&self.injection[..iterations]))
    }

    /// Block partition with the feedback phases folded in.
    pub fn phased_blocks(&self) -> Result<BlockPartition> {
        apply_feedback_phases(&partition_unitary(self)?, &self.feedback_phases)
    }

    /// Transfer matrix and output-mode labels for the chosen feedback setting.
    pub fn transfer(&self, iterations: usize, feedback: Feedback) -> Result<(ComplexMatrix, Vec<SpatioTemporalMode>)> {
        let blocks = self.phased_blocks()?;
        let matrix = match feedback {
            Feedback::Looped => build_extended_matrix(&blocks, iterations)?,
            Feedback::Unlooped => build_unlooped_matrix(&blocks, iterations)?,
        };
        let labels = output_layout(self.external_modes(), self.loops, iterations, feedback);
        Ok((matrix, labels))
    }
}

/// Reorders a physical unitary so that the looped ports come last.
///
/// Canonical row `r` is physical output `output_order[r]` and canonical
/// column `c` is physical input `input_order[c]`.
pub fn rewire(u: &ComplexMatrix, input_order: &[usize], output_order: &[usize]) -> Result<ComplexMatrix> {
    let n = u.rows();
    for order in [input_order, output_order] {
        let mut seen = vec![false; n];
        if order.len() != n {
            return Err(Error::InvalidSpec(format!("wiring permutation must have {n} entries")));
        }
        for &i in order {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidSpec(format!("wiring {order:?} is not a permutation")));
            }
        }
    }
    Ok(ComplexMatrix::from_fn(n, n, |r, c| {
        u[(output_order[r], input_order[c])]
    }))
}

/// Whether the feedback fibers are connected or blocked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Feedback {
    Looped,
    Unlooped,
}

impl fmt::Display for Feedback {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Feedback::Looped => "looped",
            Feedback::Unlooped => "unlooped",
        })
    }
}

impl std::str::FromStr for Feedback {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "looped" => Ok(Feedback::Looped),
            "unlooped" => Ok(Feedback::Unlooped),
            other => Err(Error::Argument(format!("unknown feedback setting `{other}`"))),
        }
    }
}

/// Label of a spatio-temporal output mode. Iterations count from 1 and
/// `mode` is the physical output port (0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpatioTemporalMode {
    /// Detected output.
    External { iteration: usize, mode: usize },
    /// Looped output that leaves the device undetected.
    Loop { iteration: usize, mode: usize },
}

impl SpatioTemporalMode {
    pub fn iteration(&self) -> usize {
        match *self {
            Self::External { iteration, .. } | Self::Loop { iteration, .. } => iteration,
        }
    }

    pub fn physical_mode(&self) -> usize {
        match *self {
            Self::External { mode, .. } | Self::Loop { mode, .. } => mode,
        }
    }

    pub fn is_external(&self) -> bool {
        matches!(self, Self::External { .. })
    }
}

impl fmt::Display for SpatioTemporalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::External { iteration, mode } => write!(f, "E{iteration}.{mode}"),
            Self::Loop { iteration, mode } => write!(f, "L{iteration}.{mode}"),
        }
    }
}

impl std::str::FromStr for SpatioTemporalMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Argument(format!("bad mode label `{s}`"));
        let (kind, rest) = s.split_at(s.len().min(1));
        let (it, mode) = rest.split_once('.').ok_or_else(bad)?;
        let iteration = it.parse().map_err(|_| bad())?;
        let mode = mode.parse().map_err(|_| bad())?;
        match kind {
            "E" => Ok(Self::External { iteration, mode }),
            "L" => Ok(Self::Loop { iteration, mode }),
            _ => Err(bad()),
        }
    }
}

/// Row labels of the matrix returned by [`InterferometerSpec::transfer`].
pub fn output_layout(external: usize, loops: usize, iterations: usize, feedback: Feedback) -> Vec<SpatioTemporalMode> {
    let mut labels: Vec<_> = (1..=iterations)
        .flat_map(|iteration| (0..external).map(move |mode| SpatioTemporalMode::External { iteration, mode }))
        .collect();
    let loop_iterations = match feedback {
        Feedback::Looped => iterations..=iterations,
        Feedback::Unlooped => 1..=iterations,
    };
    for iteration in loop_iterations {
        labels.extend((0..loops).map(|i| SpatioTemporalMode::Loop {
            iteration,
            mode: external + i,
        }));
    }
    labels
}

/// The four sub-blocks of the unitary.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockPartition {
    /// external inputs -> external outputs, (M-L) x (M-L)
    pub u_ee: ComplexMatrix,
    /// looped inputs -> external outputs, (M-L) x L
    pub u_el: ComplexMatrix,
    /// external inputs -> looped outputs, L x (M-L)
    pub u_le: ComplexMatrix,
    /// looped inputs -> looped outputs, L x L
    pub u_ll: ComplexMatrix,
}

impl BlockPartition {
    pub fn external_modes(&self) -> usize {
        self.u_ee.rows()
    }

    pub fn loops(&self) -> usize {
        self.u_ll.rows()
    }

    /// Reassembles the 2x2 block layout.
    pub fn assemble(&self) -> ComplexMatrix {
        let (e, l) = (self.external_modes(), self.loops());
        let mut u = ComplexMatrix::zeros(e + l, e + l);
        for (r0, c0, b) in [
            (0, 0, &self.u_ee),
            (0, e, &self.u_el),
            (e, 0, &self.u_le),
            (e, e, &self.u_ll),
        ] {
            u.set_block(r0, c0, b).expect("blocks fit by construction");
        }
        u
    }
}

pub fn partition_unitary(spec: &InterferometerSpec) -> Result<BlockPartition> {
    let u = spec.unitary();
    let (e, l) = (spec.external_modes(), spec.loops());
    Ok(BlockPartition {
        u_ee: u.block(0, 0, e, e)?,
        u_el: u.block(0, e, e, l)?,
        u_le: u.block(e, 0, l, e)?,
        u_ll: u.block(e, e, l, l)?,
    })
}

/// Folds the fiber phases `D = diag(e^{i phi})` into the re-injection path:
/// `u_le -> D u_le`, `u_ll -> D u_ll`.
pub fn apply_feedback_phases(blocks: &BlockPartition, phases: &[f64]) -> Result<BlockPartition> {
    if phases.len() != blocks.loops() {
        return Err(Error::Dimension(format!(
            "{} phases for {} loops",
            phases.len(),
            blocks.loops()
        )));
    }
    let rotate = |m: &ComplexMatrix| {
        ComplexMatrix::from_fn(m.rows(), m.cols(), |r, c| {
            m[(r, c)] * Complex64::from_polar(1.0, phases[r])
        })
    };
    Ok(BlockPartition {
        u_ee: blocks.u_ee.clone(),
        u_el: blocks.u_el.clone(),
        u_le: rotate(&blocks.u_le),
        u_ll: rotate(&blocks.u_ll),
    })
}

/// `u_ll^k u_le` for `k = 0..count`.
fn loop_chain(blocks: &BlockPartition, count: usize) -> Result<Vec<ComplexMatrix>> {
    let mut chain = Vec::with_capacity(count);
    let mut cur = blocks.u_le.clone();
    for _ in 0..count {
        let next = blocks.u_ll.matmul(&cur)?;
        chain.push(cur);
        cur = next;
    }
    Ok(chain)
}

fn check_iterations(iterations: usize) -> Result<()> {
    if iterations == 0 {
        return Err(Error::Count("at least one iteration is required".into()));
    }
    Ok(())
}

/// Block lower-triangular Toeplitz matrix over the detected modes of all
/// iterations: block `(t, t')` is `u_ee` on the diagonal and
/// `u_el u_ll^{t-t'-1} u_le` below it.
pub fn build_total_matrix(blocks: &BlockPartition, iterations: usize) -> Result<ComplexMatrix> {
    check_iterations(iterations)?;
    let e = blocks.external_modes();
    let chain = loop_chain(blocks, iterations.saturating_sub(1))?;
    let lags: Vec<ComplexMatrix> = std::iter::once(Ok(blocks.u_ee.clone()))
        .chain(chain.iter().map(|c| blocks.u_el.matmul(c)))
        .collect::<Result<_>>()?;
    let mut total = ComplexMatrix::zeros(e * iterations, e * iterations);
    for t in 0..iterations {
        for tp in 0..=t {
            total.set_block(t * e, tp * e, &lags[t - tp])?;
        }
    }
    Ok(total)
}

/// [`build_total_matrix`] with the final looped outputs appended as `L`
/// extra rows, block `(T, t')` being `u_ll^{T-t'} u_le`. The result is an
/// isometry.
pub fn build_extended_matrix(blocks: &BlockPartition, iterations: usize) -> Result<ComplexMatrix> {
    let total = build_total_matrix(blocks, iterations)?;
    let (e, l) = (blocks.external_modes(), blocks.loops());
    let mut ext = ComplexMatrix::zeros(e * iterations + l, e * iterations);
    ext.set_block(0, 0, &total)?;
    let chain = loop_chain(blocks, iterations)?;
    for tp in 0..iterations {
        ext.set_block(e * iterations, tp * e, &chain[iterations - 1 - tp])?;
    }
    Ok(ext)
}

/// Transfer matrix with the feedback fibers blocked: every iteration sees
/// `u_ee` on the detected outputs and loses `u_le` into its looped outputs.
/// Rows follow [`output_layout`] for [`Feedback::Unlooped`].
pub fn build_unlooped_matrix(blocks: &BlockPartition, iterations: usize) -> Result<ComplexMatrix> {
    check_iterations(iterations)?;
    let (e, l) = (blocks.external_modes(), blocks.loops());
    let mut m = ComplexMatrix::zeros((e + l) * iterations, e * iterations);
    for t in 0..iterations {
        m.set_block(t * e, t * e, &blocks.u_ee)?;
        m.set_block(e * iterations + t * l, t * e, &blocks.u_le)?;
    }
    Ok(m)
}

/// Size of the equivalent conventional boson sampler.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectiveSize {
    pub photons: usize,
    pub modes: usize,
    /// log2 of the bosonic Fock-space dimension.
    pub qubit_equivalent: f64,
}

impl EffectiveSize {
    /// From the total number of photons injected over all iterations.
    pub fn from_total(photons: usize, modes: usize, loops: usize, iterations: usize) -> Self {
        let st_modes = (modes - loops) * iterations + loops;
        let qubit_equivalent = if photons == 0 || st_modes == 0 {
            0.0
        } else {
            log2_binomial(st_modes + photons - 1, photons)
        };
        Self {
            photons,
            modes: st_modes,
            qubit_equivalent,
        }
    }

    /// Outcome count `C(modes + photons - 1, photons)`, saturating.
    pub fn outcome_count(&self) -> u128 {
        crate::fock::fock_space_dimension(self.modes, self.photons)
    }
}

/// `photons` per iteration, `T` iterations: `NT` photons over `(M-L)T + L` modes.
pub fn effective_size(photons: usize, modes: usize, loops: usize, iterations: usize) -> Result<EffectiveSize> {
    if loops >= modes && modes > 0 {
        return Err(Error::InvalidSpec(format!("loop count {loops} >= mode count {modes}")));
    }
    Ok(EffectiveSize::from_total(
        photons * iterations,
        modes,
        loops,
        iterations,
    ))
}

fn log2_binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (1..=k).map(|i| ((n - k + i) as f64 / i as f64).log2()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_unitary;

    fn spec(m: usize, l: usize, seed: u64) -> InterferometerSpec {
        InterferometerSpec::new(random_unitary(m, seed).unwrap(), l).unwrap()
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(InterferometerSpec::new(ComplexMatrix::identity(2), 2).is_err());
        assert!(InterferometerSpec::new(ComplexMatrix::zeros(2, 3), 0).is_err());
        let mut not_unitary = ComplexMatrix::identity(2);
        not_unitary[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(InterferometerSpec::new(not_unitary, 1).is_err());
        let s = spec(3, 1, 1);
        assert!(s.clone().with_phases(vec![0.0, 1.0]).is_err());
        assert!(s.clone().with_injection(vec![FockState::new(vec![1, 0, 0])]).is_err());
        let wrapped = s.with_phases(vec![-std::f64::consts::FRAC_PI_2]).unwrap();
        assert!((wrapped.feedback_phases()[0] - 1.5 * std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn no_loops_leaves_empty_blocks() {
        let s = spec(2, 0, 3);
        let b = partition_unitary(&s).unwrap();
        assert_eq!(&b.u_ee, s.unitary());
        assert_eq!(b.u_el.shape(), (2, 0));
        assert_eq!(b.u_le.shape(), (0, 2));
        assert_eq!(b.u_ll.shape(), (0, 0));
    }

    #[test]
    fn identity_partition() {
        let s = InterferometerSpec::new(ComplexMatrix::identity(2), 1).unwrap();
        let b = partition_unitary(&s).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        assert_eq!(
            (b.u_ee[(0, 0)], b.u_el[(0, 0)], b.u_le[(0, 0)], b.u_ll[(0, 0)]),
            (one, zero, zero, one)
        );
    }

    #[test]
    fn reassembly_is_exact() {
        let s = spec(5, 2, 8);
        assert_eq!(&partition_unitary(&s).unwrap().assemble(), s.unitary());
    }

    #[test]
    fn zero_phases_leave_blocks() {
        let b = partition_unitary(&spec(4, 2, 5)).unwrap();
        assert_eq!(apply_feedback_phases(&b, &[0.0, 0.0]).unwrap(), b);
        assert!(apply_feedback_phases(&b, &[0.0]).is_err());
    }

    #[test]
    fn pi_phase_negates_loop_rows() {
        let b = partition_unitary(&spec(3, 1, 6)).unwrap();
        let p = apply_feedback_phases(&b, &[std::f64::consts::PI]).unwrap();
        assert!(p.u_le.max_abs_diff(&b.u_le.scale(Complex64::new(-1.0, 0.0))).unwrap() < 1e-15);
        assert!(p.u_ll.max_abs_diff(&b.u_ll.scale(Complex64::new(-1.0, 0.0))).unwrap() < 1e-15);
        assert_eq!(p.u_ee, b.u_ee);
        assert_eq!(p.u_el, b.u_el);
    }

    #[test]
    fn single_iteration_matrices() {
        let b = partition_unitary(&spec(4, 1, 2)).unwrap();
        assert_eq!(build_total_matrix(&b, 1).unwrap(), b.u_ee);
        let ext = build_extended_matrix(&b, 1).unwrap();
        assert_eq!(ext.block(0, 0, 3, 3).unwrap(), b.u_ee);
        assert_eq!(ext.block(3, 0, 1, 3).unwrap(), b.u_le);
        assert!(matches!(build_total_matrix(&b, 0), Err(Error::Count(_))));
        assert!(matches!(build_extended_matrix(&b, 0), Err(Error::Count(_))));
    }

    #[test]
    fn no_loops_gives_block_diagonal() {
        let s = spec(3, 0, 4);
        let b = partition_unitary(&s).unwrap();
        let total = build_total_matrix(&b, 3).unwrap();
        for t in 0..3 {
            for tp in 0..3 {
                let blk = total.block(3 * t, 3 * tp, 3, 3).unwrap();
                let want = if t == tp {
                    s.unitary().clone()
                } else {
                    ComplexMatrix::zeros(3, 3)
                };
                assert_eq!(blk, want);
            }
        }
    }

    #[test]
    fn unlooped_matrix_is_isometry() {
        let b = partition_unitary(&spec(5, 2, 9)).unwrap();
        let m = build_unlooped_matrix(&b, 3).unwrap();
        assert_eq!(m.shape(), (15, 9));
        assert!(check_isometry(&m, 1e-12).unwrap().is_isometry);
        assert_eq!(output_layout(3, 2, 3, Feedback::Unlooped).len(), 15);
    }

    #[test]
    fn rewire_permutes() {
        let u = random_unitary(3, 1).unwrap();
        let w = rewire(&u, &[2, 0, 1], &[1, 2, 0]).unwrap();
        assert_eq!(w[(0, 0)], u[(1, 2)]);
        assert!(rewire(&u, &[0, 0, 1], &[0, 1, 2]).is_err());
        assert_eq!(rewire(&u, &[0, 1, 2], &[0, 1, 2]).unwrap(), u);
    }

    #[test]
    fn mode_labels_round_trip() {
        for label in output_layout(2, 1, 2, Feedback::Unlooped) {
            assert_eq!(label.to_string().parse::<SpatioTemporalMode>().unwrap(), label);
        }
        assert!("X1.0".parse::<SpatioTemporalMode>().is_err());
    }

    #[test]
    fn effective_size_examples() {
        let s = effective_size(5, 25, 5, 1).unwrap();
        assert_eq!((s.photons, s.modes), (5, 25));
        // C(29, 5) = 118755
        assert!((s.qubit_equivalent - 118755f64.log2()).abs() < 1e-12);
        let vac = effective_size(0, 25, 5, 3).unwrap();
        assert_eq!((vac.photons, vac.modes, vac.qubit_equivalent), (0, 65, 0.0));
    }
}
