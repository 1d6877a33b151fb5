//! Kraus-operator sets for the four standard single-qubit noise channels,
//! and the weak-measurement / reversal operators used to protect the
//! entangled resource.
//!
//! The weak measurement keeps only its no-click outcome; the discarded
//! branch is accounted for through the success probability returned by
//! [`apply_selective`], never simulated.

use crate::error::{Error, Result};
use crate::qmath::{apply, embed, pauli_x, pauli_y, pauli_z, ComplexMatrix, DensityOperator};
use crate::scalar::{real, Scalar};

/// The four noise kinds. Phase flip is the same channel as phase damping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    AmplitudeDamping,
    BitFlip,
    PhaseFlip,
    Depolarizing,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 4] = [
        NoiseKind::AmplitudeDamping,
        NoiseKind::BitFlip,
        NoiseKind::PhaseFlip,
        NoiseKind::Depolarizing,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            NoiseKind::AmplitudeDamping => "amplitude-damping",
            NoiseKind::BitFlip => "bit-flip",
            NoiseKind::PhaseFlip => "phase-flip",
            NoiseKind::Depolarizing => "depolarizing",
        }
    }
}

impl std::fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// An indexed Kraus set {E_j} for one noise kind at rate `lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel<S: Scalar> {
    kind: NoiseKind,
    lambda: S,
    operators: Vec<ComplexMatrix<S>>,
}

impl<S: Scalar> KrausChannel<S> {
    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn lambda(&self) -> S {
        self.lambda
    }

    pub fn operators(&self) -> &[ComplexMatrix<S>] {
        &self.operators
    }

    /// Largest entry of |Σ E†E - I|; zero for a complete Kraus set.
    pub fn completeness_defect(&self) -> S {
        let mut sum = ComplexMatrix::zeros(2, 2);
        for e in &self.operators {
            sum = sum
                .add(&e.adjoint().mul(e).expect("2x2 product"))
                .expect("2x2 sum");
        }
        sum.max_abs_diff(&ComplexMatrix::identity(2))
    }
}

/// Builds the Kraus set of `kind` at noise rate `lambda` ∈ [0, 1].
///
/// Amplitude damping uses {diag(1, √(1-λ)), √λ |0⟩⟨1|}; bit flip and phase
/// flip mix the identity with σx and σz at weight √λ; depolarizing spreads
/// weight √(λ/3) over σx, σz, σy.
pub fn kraus_set<S: Scalar>(kind: NoiseKind, lambda: S) -> Result<KrausChannel<S>> {
    if lambda < S::zero() || lambda > S::one() {
        return Err(Error::domain("lambda", lambda, "[0, 1]"));
    }
    let zero = S::zero();
    let one = S::one();
    let operators = match kind {
        NoiseKind::AmplitudeDamping => {
            let e0 = ComplexMatrix::from_real_2x2([one, zero, zero, (one - lambda).sqrt()]);
            let e1 = ComplexMatrix::from_real_2x2([zero, lambda.sqrt(), zero, zero]);
            vec![e0, e1]
        }
        NoiseKind::BitFlip => {
            let e0 = ComplexMatrix::identity(2).scale_real((one - lambda).sqrt());
            let e1 = pauli_x::<S>().scale_real(lambda.sqrt());
            vec![e0, e1]
        }
        NoiseKind::PhaseFlip => {
            let e0 = ComplexMatrix::identity(2).scale_real((one - lambda).sqrt());
            let e1 = pauli_z::<S>().scale_real(lambda.sqrt());
            vec![e0, e1]
        }
        NoiseKind::Depolarizing => {
            let w = (lambda / real::<S>(3)).sqrt();
            let e0 = ComplexMatrix::identity(2).scale_real((one - lambda).sqrt());
            vec![
                e0,
                pauli_x::<S>().scale_real(w),
                pauli_z::<S>().scale_real(w),
                pauli_y::<S>().scale_real(w),
            ]
        }
    };
    Ok(KrausChannel {
        kind,
        lambda,
        operators,
    })
}

/// Weak-measurement strength `s` and reversal strength `r`, both in [0, 1).
/// `s = r = 0` disables protection entirely.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtectionConfig<S: Scalar> {
    s: S,
    r: S,
}

impl<S: Scalar> ProtectionConfig<S> {
    pub fn new(s: S, r: S) -> Result<Self> {
        if s < S::zero() || s >= S::one() {
            return Err(Error::domain("s", s, "[0, 1)"));
        }
        if r < S::zero() || r >= S::one() {
            return Err(Error::domain("r", r, "[0, 1)"));
        }
        Ok(Self { s, r })
    }

    pub fn disabled() -> Self {
        Self {
            s: S::zero(),
            r: S::zero(),
        }
    }

    pub fn s(&self) -> S {
        self.s
    }

    pub fn r(&self) -> S {
        self.r
    }

    pub fn is_disabled(&self) -> bool {
        self.s == S::zero() && self.r == S::zero()
    }
}

/// No-click weak measurement operator diag(1, √(1-s)).
pub fn weak_op<S: Scalar>(s: S) -> Result<ComplexMatrix<S>> {
    if s < S::zero() || s >= S::one() {
        return Err(Error::domain("s", s, "[0, 1)"));
    }
    Ok(ComplexMatrix::from_real_2x2([
        S::one(),
        S::zero(),
        S::zero(),
        (S::one() - s).sqrt(),
    ]))
}

/// Reversal measurement operator diag(√(1-r), 1).
pub fn reversal_op<S: Scalar>(r: S) -> Result<ComplexMatrix<S>> {
    if r < S::zero() || r >= S::one() {
        return Err(Error::domain("r", r, "[0, 1)"));
    }
    Ok(ComplexMatrix::from_real_2x2([
        (S::one() - r).sqrt(),
        S::zero(),
        S::zero(),
        S::one(),
    ]))
}

/// Applies the channel to one qubit of `rho`: Σ_j E_j ρ E_j†, embedded on
/// `target`. Trace-preserving for a complete Kraus set.
pub fn apply_channel<S: Scalar>(
    channel: &KrausChannel<S>,
    target: usize,
    rho: &DensityOperator<S>,
) -> Result<DensityOperator<S>> {
    let n = rho.num_qubits();
    let mut sum = ComplexMatrix::zeros(rho.dim(), rho.dim());
    for e in &channel.operators {
        let lifted = embed(e, target, n)?;
        let term = apply(&lifted, rho)?;
        sum = sum.add(term.matrix())?;
    }
    DensityOperator::new(n, sum)
}

/// Conjugates `rho` by `op` embedded on every qubit in `targets`, returning
/// the renormalized post-selected state and the success probability (the
/// trace before renormalization).
///
/// Probabilities below the scalar's zero-probability cutoff signal an
/// impossible branch and come back as [`Error::ZeroProbability`].
pub fn apply_selective<S: Scalar>(
    op: &ComplexMatrix<S>,
    targets: &[usize],
    rho: &DensityOperator<S>,
) -> Result<(DensityOperator<S>, S)> {
    let n = rho.num_qubits();
    for (i, &t) in targets.iter().enumerate() {
        if targets[..i].contains(&t) {
            return Err(Error::InvalidState(format!(
                "apply_selective targets must be distinct, {t} repeats"
            )));
        }
    }
    let mut full = ComplexMatrix::identity(rho.dim());
    for &t in targets {
        full = full.mul(&embed(op, t, n)?)?;
    }
    let unnormalized = apply(&full, rho)?;
    let probability = unnormalized.trace_real();
    if probability < S::zero_probability_cutoff() {
        return Err(Error::ZeroProbability);
    }
    Ok((unnormalized.renormalized(probability)?, probability))
}
