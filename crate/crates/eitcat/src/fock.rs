//! Truncated Fock-space engine: the numeric oracle for the coherent-state
//! algebra.
//!
//! Two-mode states live in a D x D complex amplitude matrix (rows index mode
//! 1, columns mode 2). Every symbolic result in this crate has a counterpart
//! here built from nothing but the definition of a coherent state in the
//! number basis, so agreement between the two paths is a genuine cross-check.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::states::CoherentSuperposition;
use crate::transfer::KerrGateSpec;

/// Per-term probability mass allowed beyond the cutoff.
pub const TAIL_TOL: f64 = 1e-12;

/// Two-mode state on a truncated photon-number grid.
#[derive(Debug, Clone)]
pub struct FockVector {
    cutoff: usize,
    amps: DMatrix<C64>,
    tail_mass: f64,
}

/// Number-basis amplitudes of |a> up to `cutoff` (exclusive):
/// c_n = e^{-|a|^2/2} a^n / sqrt(n!).
pub fn coherent_amplitudes(a: C64, cutoff: usize) -> DVector<C64> {
    let mut v = DVector::from_element(cutoff, C64::new(0.0, 0.0));
    let mut c = C64::new((-0.5 * a.norm_sqr()).exp(), 0.0);
    for n in 0..cutoff {
        v[n] = c;
        c *= a / ((n + 1) as f64).sqrt();
    }
    v
}

/// Probability mass of |a> beyond the cutoff.
pub fn poisson_tail(a: C64, cutoff: usize) -> f64 {
    let v = coherent_amplitudes(a, cutoff);
    (1.0 - v.iter().map(|c| c.norm_sqr()).sum::<f64>()).max(0.0)
}

/// Smallest cutoff that keeps the tail of |a> below [`TAIL_TOL`], starting
/// from the |a|^2 + 8|a| + 12 heuristic and verifying.
pub fn required_cutoff(a_max: f64) -> usize {
    let mut d = (a_max * a_max + 8.0 * a_max + 12.0).ceil() as usize;
    while poisson_tail(C64::new(a_max, 0.0), d) >= TAIL_TOL && d < 4096 {
        d += 4;
    }
    d
}

impl FockVector {
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn amps(&self) -> &DMatrix<C64> {
        &self.amps
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn from_amps(amps: DMatrix<C64>) -> Self {
        assert_eq!(amps.nrows(), amps.ncols(), "Fock tensor must be square");
        Self {
            cutoff: amps.nrows(),
            amps,
            tail_mass: 0.0,
        }
    }

    /// Two-mode coherent product built directly in the number basis.
    pub fn coherent_product(a: C64, b: C64, cutoff: usize) -> Result<Self> {
        check_tail(&[a, b], cutoff)?;
        let va = coherent_amplitudes(a, cutoff);
        let vb = coherent_amplitudes(b, cutoff);
        let amps = &va * vb.transpose();
        let tail = (1.0 - amps.iter().map(|c| c.norm_sqr()).sum::<f64>()).max(0.0);
        Ok(Self {
            cutoff,
            amps,
            tail_mass: tail,
        })
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n2 = self.norm_sq();
        if n2.is_nan() || n2 <= 1e-300 {
            return Err(Error::NotNormalized { norm_sq: n2 });
        }
        self.amps.scale_mut(1.0 / n2.sqrt());
        Ok(())
    }

    pub fn inner(&self, other: &Self) -> C64 {
        assert_eq!(self.cutoff, other.cutoff, "cutoff mismatch");
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(x, y)| x.conj() * y)
            .sum()
    }

    /// |<self|other>|^2 / (<self|self> <other|other>).
    pub fn fidelity(&self, other: &Self) -> f64 {
        let ov = self.inner(other).norm_sqr();
        ov / (self.norm_sq() * other.norm_sq())
    }

    /// Reduced density matrix of mode 1 (mode 2 traced out).
    pub fn partial_trace_mode2(&self) -> DMatrix<C64> {
        &self.amps * self.amps.adjoint()
    }

    /// Project mode 2 onto the number-basis ket `ket`; returns the outcome
    /// probability and the unnormalized post state of mode 1.
    pub fn project_mode2(&self, ket: &DVector<C64>) -> (f64, DVector<C64>) {
        assert_eq!(ket.len(), self.cutoff);
        let conj = DVector::from_fn(self.cutoff, |i, _| ket[i].conj());
        let post = &self.amps * conj;
        let p = post.iter().map(|c| c.norm_sqr()).sum();
        (p, post)
    }

    /// Entanglement entropy across the mode-1 | mode-2 cut, in ebits, from
    /// the eigenvalues of the reduced density matrix.
    pub fn entanglement_entropy(&self) -> Result<f64> {
        let n2 = self.norm_sq();
        if (n2 - 1.0).abs() > 1e-8 {
            return Err(Error::NotNormalized { norm_sq: n2 });
        }
        let rho = self.partial_trace_mode2();
        let eig = nalgebra::SymmetricEigen::new(rho);
        let total: f64 = eig.eigenvalues.iter().sum();
        let mut entropy = 0.0;
        for lam in eig.eigenvalues.iter() {
            let p = lam / total;
            if p > 1e-300 {
                entropy -= p * p.log2();
            }
        }
        Ok(entropy)
    }

    /// Serialize as a dense tensor dump with a cutoff header.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "fock-vector cutoff={} tail={:.17e}\n",
            self.cutoff, self.tail_mass
        );
        for n in 0..self.cutoff {
            for m in 0..self.cutoff {
                let a = self.amps[(n, m)];
                s.push_str(&format!("{n} {m} {:.17e} {:.17e}\n", a.re, a.im));
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Config {
            key: "fock".into(),
            msg: "empty tensor text".into(),
        })?;
        let mut cutoff = None;
        let mut tail = 0.0;
        for tok in header.split_whitespace().skip(1) {
            if let Some(v) = tok.strip_prefix("cutoff=") {
                cutoff = v.parse::<usize>().ok();
            } else if let Some(v) = tok.strip_prefix("tail=") {
                tail = v.parse::<f64>().unwrap_or(0.0);
            }
        }
        let cutoff = cutoff.ok_or_else(|| Error::Config {
            key: "fock".into(),
            msg: "missing cutoff= in header".into(),
        })?;
        let mut amps = DMatrix::from_element(cutoff, cutoff, C64::new(0.0, 0.0));
        for line in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 4 {
                return Err(Error::Config {
                    key: "fock".into(),
                    msg: "expected: n m re im".into(),
                });
            }
            let parse_idx = |s: &str| {
                s.parse::<usize>().map_err(|e| Error::Config {
                    key: "fock".into(),
                    msg: format!("bad index: {e}"),
                })
            };
            let parse_f = |s: &str| {
                s.parse::<f64>().map_err(|e| Error::Config {
                    key: "fock".into(),
                    msg: format!("bad number: {e}"),
                })
            };
            let (n, m) = (parse_idx(toks[0])?, parse_idx(toks[1])?);
            if n >= cutoff || m >= cutoff {
                return Err(Error::Config {
                    key: "fock".into(),
                    msg: format!("index ({n},{m}) outside cutoff {cutoff}"),
                });
            }
            amps[(n, m)] = C64::new(parse_f(toks[2])?, parse_f(toks[3])?);
        }
        Ok(Self {
            cutoff,
            amps,
            tail_mass: tail,
        })
    }
}

fn check_tail(amps: &[C64], cutoff: usize) -> Result<()> {
    for &a in amps {
        let tail = poisson_tail(a, cutoff);
        if tail >= TAIL_TOL {
            return Err(Error::CutoffTooSmall {
                cutoff,
                tail,
                tol: TAIL_TOL,
                required: required_cutoff(a.norm()),
            });
        }
    }
    Ok(())
}

/// Expand a symbolic two-mode superposition on the truncated number grid.
///
/// Fails if any term's coherent tail beyond the cutoff exceeds [`TAIL_TOL`].
pub fn to_fock(state: &CoherentSuperposition, cutoff: usize) -> Result<FockVector> {
    assert_eq!(state.n_modes(), 2, "Fock tensor is two-mode");
    for t in state.terms() {
        check_tail(&t.amps, cutoff)?;
    }
    let mut amps = DMatrix::from_element(cutoff, cutoff, C64::new(0.0, 0.0));
    for t in state.terms() {
        let va = coherent_amplitudes(t.amps[0], cutoff);
        let vb = coherent_amplitudes(t.amps[1], cutoff);
        for n in 0..cutoff {
            let cn = t.coeff * va[n];
            for m in 0..cutoff {
                amps[(n, m)] += cn * vb[m];
            }
        }
    }
    let sym_norm = state.norm_sq();
    let fock_norm: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
    Ok(FockVector {
        cutoff,
        amps,
        tail_mass: (sym_norm - fock_norm).max(0.0),
    })
}

/// Apply the number-diagonal Kerr gate: amps[n,m] *= exp(-i (phi_11 n^2 +
/// phi_22 m^2 + phi_12 n m)). Output amplitude factors are a coherent-basis
/// relabelling and have no truncated-grid counterpart, so they are not
/// applied here.
pub fn apply_kerr_fock(gate: &KerrGateSpec, state: &FockVector) -> FockVector {
    let d = state.cutoff;
    let mut amps = state.amps.clone();
    for n in 0..d {
        for m in 0..d {
            let phase = gate.phi_11 * (n * n) as f64
                + gate.phi_22 * (m * m) as f64
                + gate.phi_12 * (n * m) as f64;
            amps[(n, m)] *= C64::new(0.0, -phase).exp();
        }
    }
    FockVector {
        cutoff: d,
        amps,
        tail_mass: state.tail_mass,
    }
}
