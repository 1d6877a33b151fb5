//! The three-step deterministic joint remote state preparation protocol
//! over a GHZ resource, with optional weak-measurement protection of the
//! transmitted qubits, plus the JRSP and RSP reduction modes.
//!
//! Roles and qubit order: the first preparer (amplitude knowledge) holds
//! qubit 0 (A), the second preparer (phase knowledge) holds qubit 1 (B),
//! and the receiver holds qubit 2 (C). Qubits B and C transit the noisy
//! channels; A never leaves the source lab.

use num_complex::Complex;

use crate::channels::{
    apply_channel, apply_selective, kraus_set, reversal_op, weak_op, NoiseKind, ProtectionConfig,
};
use crate::error::{Error, Result};
use crate::qmath::{
    apply, embed, fidelity_pure, partial_trace, pauli_x, pauli_z, ComplexMatrix, DensityOperator,
    PureState,
};
use crate::scalar::{real, Scalar};

/// The single-qubit state a0|0⟩ + a1·e^{iθ}|1⟩ to be prepared remotely,
/// with a0, a1 real and non-negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetState<S: Scalar> {
    a0: S,
    a1: S,
    theta: S,
}

impl<S: Scalar> TargetState<S> {
    pub fn new(a0: S, a1: S, theta: S) -> Result<Self> {
        if a0 < S::zero() || a1 < S::zero() {
            return Err(Error::InvalidState(
                "target amplitudes must be non-negative".to_string(),
            ));
        }
        let norm = a0 * a0 + a1 * a1;
        if (norm - S::one()).abs() > S::structural_tol() {
            return Err(Error::InvalidState(format!(
                "target amplitudes have squared norm {norm}, expected 1"
            )));
        }
        let two_pi = S::PI() + S::PI();
        if theta < S::zero() || theta > two_pi {
            return Err(Error::domain("theta", theta, "[0, 2*pi]"));
        }
        Ok(Self { a0, a1, theta })
    }

    /// Builds the target from the excited-state population a1² ∈ [0, 1],
    /// the variable the state-independent average integrates over.
    pub fn from_excited_population(a1_sq: S, theta: S) -> Result<Self> {
        if a1_sq < S::zero() || a1_sq > S::one() {
            return Err(Error::domain("a1_sq", a1_sq, "[0, 1]"));
        }
        Self::new((S::one() - a1_sq).sqrt(), a1_sq.sqrt(), theta)
    }

    pub fn a0(&self) -> S {
        self.a0
    }

    pub fn a1(&self) -> S {
        self.a1
    }

    pub fn theta(&self) -> S {
        self.theta
    }

    /// The target as a one-qubit pure state.
    pub fn ket(&self) -> PureState<S> {
        let phase = Complex::new(self.theta.cos(), self.theta.sin());
        PureState::new(
            1,
            vec![
                Complex::new(self.a0, S::zero()),
                phase * Complex::new(self.a1, S::zero()),
            ],
        )
        .expect("unit-norm target amplitudes")
    }
}

/// Which reduction of the protocol to run.
///
/// * `Djrsp`: both preparers measure; all four (m, n) branches count.
/// * `JrspM0`: joint RSP conditioned on the first preparer reading m = 0;
///   the two surviving branches are reweighted by Bob's conditional
///   probabilities.
/// * `Rsp`: a single preparer performs both measurements and only the
///   receiver's qubit C sees noise (and protection, when enabled).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProtocolMode {
    Djrsp,
    JrspM0,
    Rsp,
}

impl ProtocolMode {
    pub const ALL: [ProtocolMode; 3] =
        [ProtocolMode::Djrsp, ProtocolMode::JrspM0, ProtocolMode::Rsp];

    /// Qubits that transit noisy channels in this mode.
    pub fn noisy_qubits(&self) -> &'static [usize] {
        match self {
            ProtocolMode::Rsp => &[2],
            _ => &[1, 2],
        }
    }

    fn measured_m_values(&self) -> &'static [u8] {
        match self {
            ProtocolMode::JrspM0 => &[0],
            _ => &[0, 1],
        }
    }
}

impl std::fmt::Display for ProtocolMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ProtocolMode::Djrsp => "djrsp",
            ProtocolMode::JrspM0 => "jrsp",
            ProtocolMode::Rsp => "rsp",
        })
    }
}

/// One measurement-outcome history (m, n) of the protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchOutcome<S: Scalar> {
    pub m: u8,
    pub n: u8,
    /// Within-ensemble weight of this branch; the four DJRSP branches sum
    /// to 1, and so do the two conditioned JRSP branches.
    pub probability: S,
    /// Receiver-side state after recovery.
    pub output: DensityOperator<S>,
    /// Fidelity of `output` against the target.
    pub fidelity: S,
    /// Set when the branch has vanishing probability; its fidelity is
    /// recorded as 0 and its output is a placeholder mixed state.
    pub degenerate: bool,
}

/// Full outcome of one protocol execution.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolResult<S: Scalar> {
    pub branches: Vec<BranchOutcome<S>>,
    /// Probability-weighted fidelity over the branches.
    pub average_fidelity: S,
    /// Total post-selection success probability p_W0 · p_V0; exactly 1
    /// when protection is disabled.
    pub success_probability: S,
    /// Success probability of the weak-measurement pair.
    pub weak_probability: S,
    /// Success probability of the reversal pair.
    pub reversal_probability: S,
    /// Probability of the conditioning outcome m = 0, reported in
    /// `JrspM0` mode only.
    pub alice_m0_probability: Option<S>,
}

/// The shared three-qubit GHZ resource (|000⟩ + |111⟩)/√2 in A, B, C order.
pub fn ghz3<S: Scalar>() -> PureState<S> {
    let half_sqrt = (S::one() / real::<S>(2)).sqrt();
    let zero = Complex::new(S::zero(), S::zero());
    let mut amps = vec![zero; 8];
    amps[0] = Complex::new(half_sqrt, S::zero());
    amps[7] = Complex::new(half_sqrt, S::zero());
    PureState::new(3, amps).expect("GHZ is normalized")
}

/// The amplitude preparer's measurement basis as rank-1 projectors onto
/// |P0⟩ = a0|0⟩ + a1|1⟩ and |P1⟩ = a1|0⟩ - a0|1⟩.
pub fn alice_projectors<S: Scalar>(
    target: &TargetState<S>,
) -> (ComplexMatrix<S>, ComplexMatrix<S>) {
    let zero = S::zero();
    let p0 = ComplexMatrix::outer(&[Complex::new(target.a0, zero), Complex::new(target.a1, zero)]);
    let p1 = ComplexMatrix::outer(&[
        Complex::new(target.a1, zero),
        Complex::new(-target.a0, zero),
    ]);
    (p0, p1)
}

/// The phase preparer's measurement basis for announced outcome `m`,
/// as rank-1 projectors. For m = 0 the basis is (|0⟩ ± e^{-iθ}|1⟩)/√2;
/// for m = 1 the e^{-iθ} factor moves onto |0⟩ and the sign onto it.
pub fn bob_projectors<S: Scalar>(theta: S, m: u8) -> Result<(ComplexMatrix<S>, ComplexMatrix<S>)> {
    if m > 1 {
        return Err(Error::domain("m", real::<S>(m as i32), "{0, 1}"));
    }
    let half_sqrt = (S::one() / real::<S>(2)).sqrt();
    let amp = Complex::new(half_sqrt, S::zero());
    let phase = Complex::new(theta.cos(), -theta.sin()); // e^{-iθ}
    let (k0, k1) = if m == 0 {
        (vec![amp, amp * phase], vec![amp, -(amp * phase)])
    } else {
        (vec![amp * phase, amp], vec![-(amp * phase), amp])
    };
    Ok((ComplexMatrix::outer(&k0), ComplexMatrix::outer(&k1)))
}

/// Receiver-side recovery unitary for outcomes (m, n): I, σz, -σz·σx and
/// -σx. The global signs are physically irrelevant and only preserved to
/// mirror the protocol definition.
pub fn recovery<S: Scalar>(m: u8, n: u8) -> Result<ComplexMatrix<S>> {
    let one = Complex::new(S::one(), S::zero());
    match (m, n) {
        (0, 0) => Ok(ComplexMatrix::identity(2)),
        (0, 1) => Ok(pauli_z()),
        (1, 0) => Ok(pauli_z::<S>()
            .mul(&pauli_x())
            .expect("2x2 product")
            .scale(-one)),
        (1, 1) => Ok(pauli_x::<S>().scale(-one)),
        _ => Err(Error::domain(
            "(m, n)",
            real::<S>(10 * m as i32 + n as i32),
            "{0,1}x{0,1}",
        )),
    }
}

/// Prepares the shared resource: GHZ, optionally weakened on the
/// transmitted qubits, sent through the noise channel, and optionally
/// reversed. Returns the normalized resource together with the two
/// post-selection probabilities (each 1 where the stage is disabled).
pub fn noisy_resource<S: Scalar>(
    kind: NoiseKind,
    lambda: S,
    protection: ProtectionConfig<S>,
    mode: ProtocolMode,
) -> Result<(DensityOperator<S>, S, S)> {
    let mut rho = ghz3::<S>().density();
    let targets = mode.noisy_qubits();

    let mut p_w0 = S::one();
    if protection.s() > S::zero() {
        let w = weak_op(protection.s())?;
        let (next, p) = apply_selective(&w, targets, &rho)?;
        rho = next;
        p_w0 = p;
    }

    let channel = kraus_set(kind, lambda)?;
    for &t in targets {
        rho = apply_channel(&channel, t, &rho)?;
    }

    let mut p_v0 = S::one();
    if protection.r() > S::zero() {
        let v = reversal_op(protection.r())?;
        let (next, p) = apply_selective(&v, targets, &rho)?;
        rho = next;
        p_v0 = p;
    }

    Ok((rho, p_w0, p_v0))
}

/// Runs the full protocol: resource preparation followed by the
/// measurement cascade of [`run_with_resource`].
pub fn run<S: Scalar>(
    kind: NoiseKind,
    lambda: S,
    protection: ProtectionConfig<S>,
    target: &TargetState<S>,
    mode: ProtocolMode,
) -> Result<ProtocolResult<S>> {
    let (resource, p_w0, p_v0) = noisy_resource(kind, lambda, protection, mode)?;
    run_with_resource(&resource, p_w0, p_v0, target, mode)
}

/// Executes the measurement cascade against an already-prepared resource:
/// the amplitude preparer's projective measurement, the phase preparer's
/// basis measurement, and the receiver's recovery, for every branch the
/// mode enumerates. Exposed separately so parameter sweeps can reuse one
/// resource across many targets.
pub fn run_with_resource<S: Scalar>(
    resource: &DensityOperator<S>,
    p_w0: S,
    p_v0: S,
    target: &TargetState<S>,
    mode: ProtocolMode,
) -> Result<ProtocolResult<S>> {
    let cutoff = S::zero_probability_cutoff();
    let phi = target.ket();
    let (alice_p0, alice_p1) = alice_projectors(target);
    let mut branches = Vec::with_capacity(4);
    let mut alice_m0_probability = None;

    for &m in mode.measured_m_values() {
        let projector = if m == 0 { &alice_p0 } else { &alice_p1 };
        let lifted = embed(projector, 0, 3)?;
        let selected = apply(&lifted, resource)?;
        let p_a = selected.trace_real();
        if mode == ProtocolMode::JrspM0 && m == 0 {
            alice_m0_probability = Some(p_a);
        }
        if p_a < cutoff {
            for n in 0..2u8 {
                branches.push(degenerate_branch(m, n));
            }
            continue;
        }
        let bc = partial_trace(&selected, 0)?.renormalized(p_a)?;

        let (bob_p0, bob_p1) = bob_projectors(target.theta, m)?;
        for n in 0..2u8 {
            let projector = if n == 0 { &bob_p0 } else { &bob_p1 };
            let lifted = embed(projector, 0, 2)?;
            let selected = apply(&lifted, &bc)?;
            let p_b = selected.trace_real();
            if p_b < cutoff {
                branches.push(degenerate_branch(m, n));
                continue;
            }
            let c_state = partial_trace(&selected, 0)?.renormalized(p_b)?;
            let output = apply(&recovery(m, n)?, &c_state)?;
            let fidelity = fidelity_pure(&phi, &output)?;
            let probability = match mode {
                ProtocolMode::JrspM0 => p_b,
                _ => p_a * p_b,
            };
            branches.push(BranchOutcome {
                m,
                n,
                probability,
                output,
                fidelity,
                degenerate: false,
            });
        }
    }

    let average_fidelity = branches
        .iter()
        .map(|b| b.probability * b.fidelity)
        .fold(S::zero(), |acc, x| acc + x);
    Ok(ProtocolResult {
        branches,
        average_fidelity,
        success_probability: p_w0 * p_v0,
        weak_probability: p_w0,
        reversal_probability: p_v0,
        alice_m0_probability,
    })
}

fn degenerate_branch<S: Scalar>(m: u8, n: u8) -> BranchOutcome<S> {
    BranchOutcome {
        m,
        n,
        probability: S::zero(),
        output: DensityOperator::maximally_mixed(1),
        fidelity: S::zero(),
        degenerate: true,
    }
}
