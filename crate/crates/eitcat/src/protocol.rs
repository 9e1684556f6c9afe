//! End-to-end protocol: beam splitting, the two transfer channels, the
//! Bell-state measurement on the light modes, and assembly of the swapped
//! entangled atom-laser states.
//!
//! Channel 1 turns probe 1 into a matter wave and keeps probe 2 as light;
//! channel 2 mirrors the roles. Measuring the two light modes in the Bell
//! basis built from their even/odd cat states leaves the two never-interacting
//! atom lasers entangled.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::fock::{coherent_amplitudes, FockVector};
use crate::params::ChannelConfig;
use crate::states::{CatBasis, CatSign, CoherentSuperposition};
use crate::transfer::{KerrGateSpec, ModeOutput};

/// Ideal 50/50 coherent split: |alpha> -> components alpha/sqrt(2) on each arm.
pub fn split(input_amp: C64) -> (C64, C64) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (input_amp * s, input_amp * s)
}

/// Run one transfer channel on a pair of coherent inputs.
///
/// Applies the (calibrated) Kerr gate symbolically and the gate's output
/// amplitude factors; the returned two-mode state keeps the probe order
/// (mode 0 = probe 1 output, mode 1 = probe 2 output).
pub fn run_channel(
    config: &ChannelConfig,
    in1: C64,
    in2: C64,
    gate: &KerrGateSpec,
) -> Result<CoherentSuperposition> {
    let expect = |j: usize| {
        if config.transfers_to_matter(j) {
            ModeOutput::ToAtomLaser
        } else {
            ModeOutput::StaysLight
        }
    };
    if gate.transfer_1 != expect(0) || gate.transfer_2 != expect(1) {
        return Err(Error::ChannelMismatch(format!(
            "gate transfer flags ({:?}, {:?}) do not match the channel plan {:?}",
            gate.transfer_1, gate.transfer_2, config.plan
        )));
    }
    let input = CoherentSuperposition::coherent_product(&[in1, in2]);
    crate::states::apply_kerr_symbolic(gate, &input)
}

/// The four Bell outcomes on the two light modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellOutcome {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
}

impl BellOutcome {
    pub const ALL: [BellOutcome; 4] = [
        BellOutcome::PsiPlus,
        BellOutcome::PsiMinus,
        BellOutcome::PhiPlus,
        BellOutcome::PhiMinus,
    ];

    pub fn label(self) -> &'static str {
        match self {
            BellOutcome::PsiPlus => "psi_plus",
            BellOutcome::PsiMinus => "psi_minus",
            BellOutcome::PhiPlus => "phi_plus",
            BellOutcome::PhiMinus => "phi_minus",
        }
    }
}

/// Orthonormal Bell basis on two light modes, built from the even/odd cat
/// bases of each mode:
/// psi+- = (|+>|-> +- |->|+>)/sqrt(2), phi+- = (|+>|+> +- |->|->)/sqrt(2).
#[derive(Debug, Clone)]
pub struct BellBasis {
    pub psi_plus: CoherentSuperposition,
    pub psi_minus: CoherentSuperposition,
    pub phi_plus: CoherentSuperposition,
    pub phi_minus: CoherentSuperposition,
}

impl BellBasis {
    pub fn new(cat1: &CatBasis, cat2: &CatBasis) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let combine = |s1: CatSign, s2: CatSign, sign: f64, o1: CatSign, o2: CatSign| {
            let first = cat1.ket(s1).tensor(&cat2.ket(s2));
            let second = cat1.ket(o1).tensor(&cat2.ket(o2));
            let mut terms: Vec<(C64, Vec<C64>)> = Vec::new();
            for t in first.terms() {
                terms.push((t.coeff * s, t.amps.clone()));
            }
            for t in second.terms() {
                terms.push((t.coeff * s * sign, t.amps.clone()));
            }
            let mut st = CoherentSuperposition::from_terms(2, terms);
            st.normalize().expect("Bell states are normalizable");
            st
        };
        use CatSign::{Minus, Plus};
        Self {
            psi_plus: combine(Plus, Minus, 1.0, Minus, Plus),
            psi_minus: combine(Plus, Minus, -1.0, Minus, Plus),
            phi_plus: combine(Plus, Plus, 1.0, Minus, Minus),
            phi_minus: combine(Plus, Plus, -1.0, Minus, Minus),
        }
    }

    pub fn state(&self, outcome: BellOutcome) -> &CoherentSuperposition {
        match outcome {
            BellOutcome::PsiPlus => &self.psi_plus,
            BellOutcome::PsiMinus => &self.psi_minus,
            BellOutcome::PhiPlus => &self.phi_plus,
            BellOutcome::PhiMinus => &self.phi_minus,
        }
    }
}

/// One branch of the Bell measurement.
#[derive(Debug, Clone)]
pub struct SwapOutcome {
    pub outcome: BellOutcome,
    pub probability: f64,
    /// Post-measurement state of the two atom modes (1A, 2A), normalized.
    pub atom_state: CoherentSuperposition,
    /// Entanglement entropy of the atom state, in ebits.
    pub entropy: f64,
}

// The +-v support of one mode; errors if the mode is not a two-component cat.
fn support_pair(state: &CoherentSuperposition, mode: usize) -> Result<C64> {
    let support = state.mode_support(mode);
    if support.len() != 2 {
        return Err(Error::BasisMismatch(format!(
            "mode {mode} carries {} distinct amplitudes, need a +-v pair",
            support.len()
        )));
    }
    let v = if support[0].norm() >= support[1].norm() {
        support[0]
    } else {
        support[1]
    };
    if (support[0] + support[1]).norm() > 1e-9 * v.norm().max(1.0) {
        return Err(Error::BasisMismatch(format!(
            "mode {mode} amplitudes {} and {} are not opposite",
            support[0], support[1]
        )));
    }
    Ok(v)
}

/// Bell-measure the light modes of the two channel outputs.
///
/// `ch1` must hold (atom, light) modes, `ch2` (light, atom), as produced by
/// [`run_channel`] with the first-only / second-only transfer plans. Returns
/// all four outcomes with probabilities, normalized atom states and entropies.
pub fn swap(
    ch1: &CoherentSuperposition,
    ch2: &CoherentSuperposition,
) -> Result<Vec<SwapOutcome>> {
    if ch1.n_modes() != 2 || ch2.n_modes() != 2 {
        return Err(Error::ChannelMismatch(
            "swap expects two two-mode channel states".to_string(),
        ));
    }
    let light1 = support_pair(ch1, 1)?;
    let light2 = support_pair(ch2, 0)?;
    let cat1 = CatBasis::new(light1)?;
    let cat2 = CatBasis::new(light2)?;
    let bell = BellBasis::new(&cat1, &cat2);
    // Product state over (1A, 1L, 2L, 2A); light modes are 1 and 2.
    let product = ch1.tensor(ch2);
    let mut outcomes = Vec::with_capacity(4);
    for outcome in BellOutcome::ALL {
        let (probability, atom_state) = product.project_onto(&[1, 2], bell.state(outcome))?;
        let entropy = if probability > 1e-20 {
            crate::states::entanglement_entropy(&atom_state, 1)?
        } else {
            0.0
        };
        outcomes.push(SwapOutcome {
            outcome,
            probability,
            atom_state,
            entropy,
        });
    }
    Ok(outcomes)
}

/// Draw one Bell outcome according to the branch probabilities.
pub fn sample_swap<R: Rng + ?Sized>(outcomes: &[SwapOutcome], rng: &mut R) -> BellOutcome {
    let total: f64 = outcomes.iter().map(|o| o.probability).sum();
    let mut x: f64 = rng.gen::<f64>() * total;
    for o in outcomes {
        if x < o.probability {
            return o.outcome;
        }
        x -= o.probability;
    }
    outcomes.last().map(|o| o.outcome).unwrap_or(BellOutcome::PhiMinus)
}

/// One branch of the Bell measurement computed entirely on the Fock grid.
#[derive(Debug, Clone)]
pub struct FockSwapOutcome {
    pub outcome: BellOutcome,
    pub probability: f64,
    /// Post-measurement state of the two atom modes, normalized.
    pub atom_state: FockVector,
}

fn bell_matrix(outcome: BellOutcome, b1: C64, b2: C64, cutoff: usize) -> Result<DMatrix<C64>> {
    let cat = |b: C64, sign: f64, norm: f64| {
        let v = coherent_amplitudes(b, cutoff);
        let w = coherent_amplitudes(-b, cutoff);
        (v + w.scale(sign)).scale(1.0 / norm.sqrt())
    };
    let n1 = CatBasis::new(b1)?;
    let n2 = CatBasis::new(b2)?;
    let p1 = cat(b1, 1.0, n1.plus_norm);
    let m1 = cat(b1, -1.0, n1.minus_norm);
    let p2 = cat(b2, 1.0, n2.plus_norm);
    let m2 = cat(b2, -1.0, n2.minus_norm);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let outer = |x: &nalgebra::DVector<C64>, y: &nalgebra::DVector<C64>| x * y.transpose();
    Ok(match outcome {
        BellOutcome::PsiPlus => (outer(&p1, &m2) + outer(&m1, &p2)).scale(s),
        BellOutcome::PsiMinus => (outer(&p1, &m2) - outer(&m1, &p2)).scale(s),
        BellOutcome::PhiPlus => (outer(&p1, &p2) + outer(&m1, &m2)).scale(s),
        BellOutcome::PhiMinus => (outer(&p1, &p2) - outer(&m1, &m2)).scale(s),
    })
}

/// Fock-grid counterpart of [`swap`]: contracts the two channel tensors with
/// each Bell projector. `ch1` holds (atom, light), `ch2` (light, atom);
/// `light1`/`light2` are the +-amplitudes carried by the light modes.
pub fn swap_fock(
    ch1: &FockVector,
    ch2: &FockVector,
    light1: C64,
    light2: C64,
) -> Result<Vec<FockSwapOutcome>> {
    if ch1.cutoff() != ch2.cutoff() {
        return Err(Error::ChannelMismatch(
            "channel tensors must share a cutoff".to_string(),
        ));
    }
    let d = ch1.cutoff();
    let mut outcomes = Vec::with_capacity(4);
    for outcome in BellOutcome::ALL {
        let b = bell_matrix(outcome, light1, light2, d)?;
        let b_conj = b.map(|x| x.conj());
        // post[a, d'] = sum_{l, m} ch1[a, l] conj(B[l, m]) ch2[m, d']
        let post = ch1.amps() * b_conj * ch2.amps();
        let mut state = FockVector::from_amps(post);
        let probability = state.norm_sq();
        if probability > 1e-20 {
            state.normalize()?;
        }
        outcomes.push(FockSwapOutcome {
            outcome,
            probability,
            atom_state: state,
        });
    }
    Ok(outcomes)
}
