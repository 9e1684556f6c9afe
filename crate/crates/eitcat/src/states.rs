//! Symbolic two-mode (and general N-mode) quantum states in the coherent
//! basis.
//!
//! A state is a finite superposition of products of coherent states,
//! Sum_i c_i |a_i1> x |a_i2> x ... All inner products reduce to the coherent
//! overlap <a|b> = exp(-|a|^2/2 - |b|^2/2 + conj(a) b), so norms, projections
//! and Schmidt decompositions are exact up to floating point. The truncated
//! Fock engine in [`crate::fock`] provides the independent numeric cross-check
//! for everything computed here.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::transfer::{KerrGateSpec, ModeOutput};

/// Tolerance for merging coherent amplitudes during deduplication.
pub const AMP_TOL: f64 = 1e-12;
/// Maximum allowed overlap deficit when projecting onto a finite coherent span.
pub const SPAN_DEFICIT_TOL: f64 = 1e-8;
/// Eigenvalue floor (relative to the largest) for Gram-matrix
/// orthogonalization; spans more degenerate than this are rank-reduced.
pub const GRAM_EIGEN_FLOOR: f64 = 1e-14;

/// Coherent-state inner product <a|b>.
pub fn coherent_overlap(a: C64, b: C64) -> C64 {
    (-0.5 * a.norm_sqr() - 0.5 * b.norm_sqr() + a.conj() * b).exp()
}

/// One product term coeff * |amps[0]> x |amps[1]> x ...
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: C64,
    pub amps: Vec<C64>,
}

/// A finite superposition of products of coherent states.
#[derive(Debug, Clone)]
pub struct CoherentSuperposition {
    terms: Vec<Term>,
    n_modes: usize,
    normalized: bool,
}

fn amps_close(a: &[C64], b: &[C64]) -> bool {
    a.iter().zip(b).all(|(x, y)| {
        let scale = x.norm().max(y.norm()).max(1.0);
        (x - y).norm() <= AMP_TOL * scale
    })
}

impl CoherentSuperposition {
    /// Single product term |amps[0]> x |amps[1]> x ... with coefficient 1.
    pub fn coherent_product(amps: &[C64]) -> Self {
        Self {
            terms: vec![Term {
                coeff: C64::new(1.0, 0.0),
                amps: amps.to_vec(),
            }],
            n_modes: amps.len(),
            normalized: true,
        }
    }

    /// Build from raw terms; merges duplicate amplitude tuples and drops
    /// negligible coefficients. The result is not normalized.
    pub fn from_terms(n_modes: usize, terms: impl IntoIterator<Item = (C64, Vec<C64>)>) -> Self {
        let mut state = Self {
            terms: Vec::new(),
            n_modes,
            normalized: false,
        };
        for (coeff, amps) in terms {
            assert_eq!(amps.len(), n_modes, "term arity mismatch");
            state.push_term(coeff, amps);
        }
        state.prune();
        state
    }

    fn push_term(&mut self, coeff: C64, amps: Vec<C64>) {
        for t in &mut self.terms {
            if amps_close(&t.amps, &amps) {
                t.coeff += coeff;
                return;
            }
        }
        self.terms.push(Term { coeff, amps });
    }

    fn prune(&mut self) {
        let scale = self
            .terms
            .iter()
            .map(|t| t.coeff.norm())
            .fold(0.0f64, f64::max)
            .max(1e-300);
        self.terms.retain(|t| t.coeff.norm() > 1e-14 * scale);
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_normalized_flag(&self) -> bool {
        self.normalized
    }

    /// Full inner product <self|other>.
    pub fn inner(&self, other: &Self) -> C64 {
        assert_eq!(self.n_modes, other.n_modes, "mode count mismatch");
        let mut acc = C64::new(0.0, 0.0);
        for ti in &self.terms {
            for tj in &other.terms {
                let mut ov = ti.coeff.conj() * tj.coeff;
                for m in 0..self.n_modes {
                    ov *= coherent_overlap(ti.amps[m], tj.amps[m]);
                }
                acc += ov;
            }
        }
        acc
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self).re
    }

    /// Normalize in place; errors on the zero state.
    pub fn normalize(&mut self) -> Result<()> {
        let n2 = self.norm_sq();
        if n2.is_nan() || n2 <= 1e-300 {
            return Err(Error::NotNormalized { norm_sq: n2 });
        }
        let s = 1.0 / n2.sqrt();
        for t in &mut self.terms {
            t.coeff *= s;
        }
        self.normalized = true;
        Ok(())
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    fn require_normalized(&self) -> Result<()> {
        let n2 = self.norm_sq();
        if (n2 - 1.0).abs() > 1e-8 {
            return Err(Error::NotNormalized { norm_sq: n2 });
        }
        Ok(())
    }

    /// Tensor product; `self`'s modes come first.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for ti in &self.terms {
            for tj in &other.terms {
                let mut amps = Vec::with_capacity(self.n_modes + other.n_modes);
                amps.extend_from_slice(&ti.amps);
                amps.extend_from_slice(&tj.amps);
                terms.push((ti.coeff * tj.coeff, amps));
            }
        }
        let mut s = Self::from_terms(self.n_modes + other.n_modes, terms);
        s.normalized = self.normalized && other.normalized;
        s
    }

    /// Rescale every coherent amplitude of mode `mode` by a real factor.
    /// This is the matter-wave relabelling (alpha -> sqrt(c/v0) alpha), not a
    /// unitary on the fixed mode.
    pub fn scale_mode_amplitude(&mut self, mode: usize, factor: f64) {
        for t in &mut self.terms {
            t.amps[mode] *= factor;
        }
    }

    /// Distinct coherent amplitudes appearing on one mode.
    pub fn mode_support(&self, mode: usize) -> Vec<C64> {
        let mut vals: Vec<C64> = Vec::new();
        for t in &self.terms {
            let a = t.amps[mode];
            let dup = vals.iter().any(|v| {
                let scale = v.norm().max(a.norm()).max(1.0);
                (v - a).norm() <= 1e-9 * scale
            });
            if !dup {
                vals.push(a);
            }
        }
        vals
    }

    /// Projection onto a (normalized) target state over a subset of modes.
    ///
    /// Returns the outcome probability and the renormalized post-measurement
    /// state on the remaining modes. The support of the projected modes must
    /// lie in the coherent span of the target (deficit <= 1e-8), otherwise a
    /// basis-mismatch error is returned.
    pub fn project_onto(&self, modes: &[usize], target: &Self) -> Result<(f64, Self)> {
        assert_eq!(modes.len(), target.n_modes, "target arity mismatch");
        target.require_normalized().map_err(|_| {
            Error::BasisMismatch("projection target is not normalized".to_string())
        })?;
        // Span check per projected mode.
        for (pos, &mode) in modes.iter().enumerate() {
            let span: Vec<C64> = target.mode_support(pos);
            for t in &self.terms {
                let d = span_deficit(&span, t.amps[mode]);
                if d > SPAN_DEFICIT_TOL {
                    return Err(Error::BasisMismatch(format!(
                        "mode {mode} amplitude {} lies outside the projection span (deficit {d:.3e})",
                        t.amps[mode]
                    )));
                }
            }
        }
        let keep: Vec<usize> = (0..self.n_modes).filter(|m| !modes.contains(m)).collect();
        let mut out_terms: Vec<(C64, Vec<C64>)> = Vec::new();
        for ts in &self.terms {
            for tt in &target.terms {
                let mut w = ts.coeff * tt.coeff.conj();
                for (pos, &mode) in modes.iter().enumerate() {
                    w *= coherent_overlap(tt.amps[pos], ts.amps[mode]);
                }
                let amps: Vec<C64> = keep.iter().map(|&m| ts.amps[m]).collect();
                out_terms.push((w, amps));
            }
        }
        let mut post = Self::from_terms(keep.len(), out_terms);
        let p = post.norm_sq();
        if p > 1e-30 {
            post.normalize()?;
        }
        Ok((p, post))
    }

    /// Serialize to a line-oriented text format.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "coherent-superposition modes={} terms={}\n",
            self.n_modes,
            self.terms.len()
        );
        for t in &self.terms {
            s.push_str(&format!("{:.17e} {:.17e}", t.coeff.re, t.coeff.im));
            for a in &t.amps {
                s.push_str(&format!(" {:.17e} {:.17e}", a.re, a.im));
            }
            s.push('\n');
        }
        s
    }

    /// Parse the format produced by [`Self::to_text`].
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Config {
            key: "state".into(),
            msg: "empty state text".into(),
        })?;
        let mut n_modes = None;
        for tok in header.split_whitespace().skip(1) {
            if let Some(v) = tok.strip_prefix("modes=") {
                n_modes = v.parse::<usize>().ok();
            }
        }
        let n_modes = n_modes.ok_or_else(|| Error::Config {
            key: "state".into(),
            msg: "missing modes= in header".into(),
        })?;
        let mut terms = Vec::new();
        for line in lines {
            let nums: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Config {
                    key: "state".into(),
                    msg: format!("bad number: {e}"),
                })?;
            if nums.len() != 2 + 2 * n_modes {
                return Err(Error::Config {
                    key: "state".into(),
                    msg: format!("expected {} numbers per term", 2 + 2 * n_modes),
                });
            }
            let coeff = C64::new(nums[0], nums[1]);
            let amps = (0..n_modes)
                .map(|m| C64::new(nums[2 + 2 * m], nums[3 + 2 * m]))
                .collect();
            terms.push((coeff, amps));
        }
        Ok(Self::from_terms(n_modes, terms))
    }
}

/// Overlap deficit of |a> against span{|s_1>, ..., |s_k>}:
/// 1 - ||P_span |a>||^2, computed through the span's Gram matrix.
fn span_deficit(span: &[C64], a: C64) -> f64 {
    let k = span.len();
    let gram = DMatrix::from_fn(k, k, |i, j| coherent_overlap(span[i], span[j]));
    let v = DVector::from_fn(k, |i, _| coherent_overlap(span[i], a));
    let eig = nalgebra::SymmetricEigen::new(gram);
    let lmax = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let floor = GRAM_EIGEN_FLOOR * lmax.max(1.0);
    // ||P|a>||^2 = v^dag G^+ v through the eigenbasis.
    let mut proj = 0.0;
    for (idx, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam > floor {
            let u = eig.eigenvectors.column(idx);
            let z: C64 = u.iter().zip(v.iter()).map(|(ui, vi)| ui.conj() * vi).sum();
            proj += z.norm_sqr() / lam;
        }
    }
    (1.0 - proj).max(0.0)
}

/// Even/odd cat basis over {|amp>, |-amp>}.
///
/// |+/-> = (|amp> +/- |-amp>) / sqrt(N+/-) with N+/- = 2 +/- 2 exp(-2|amp|^2).
/// For a beam of amplitude beta split 50/50, pass amp = beta/sqrt(2); the norm
/// factors then read 2 +/- 2 exp(-|beta|^2).
#[derive(Debug, Clone, Copy)]
pub struct CatBasis {
    pub amp: C64,
    pub plus_norm: f64,
    pub minus_norm: f64,
}

/// Which cat-basis element to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatSign {
    Plus,
    Minus,
}

impl CatBasis {
    pub fn new(amp: C64) -> Result<Self> {
        if amp.norm() < 1e-12 {
            return Err(Error::BasisMismatch(
                "cat basis degenerate at zero amplitude".to_string(),
            ));
        }
        let ov = (-2.0 * amp.norm_sqr()).exp();
        Ok(Self {
            amp,
            plus_norm: 2.0 + 2.0 * ov,
            minus_norm: 2.0 - 2.0 * ov,
        })
    }

    /// The normalized basis ket |+> or |-> as a one-mode superposition.
    pub fn ket(&self, sign: CatSign) -> CoherentSuperposition {
        let (norm, s) = match sign {
            CatSign::Plus => (self.plus_norm, 1.0),
            CatSign::Minus => (self.minus_norm, -1.0),
        };
        let c = C64::new(1.0 / norm.sqrt(), 0.0);
        let mut st = CoherentSuperposition::from_terms(
            1,
            [(c, vec![self.amp]), (s * c, vec![-self.amp])],
        );
        st.normalized = true;
        st
    }
}

/// Project one mode of a state onto a cat-basis element.
///
/// Returns the outcome probability and the renormalized post-measurement
/// state on the remaining modes.
pub fn project(
    state: &CoherentSuperposition,
    mode: usize,
    basis: &CatBasis,
    sign: CatSign,
) -> Result<(f64, CoherentSuperposition)> {
    state.project_onto(&[mode], &basis.ket(sign))
}

/// Apply a number-diagonal Kerr gate on the symbolic path.
///
/// Valid when the cross phase is 0 or pi (mod 2pi) and both self phases are
/// multiples of 2pi; anything else needs the Fock path. A pi cross phase acts
/// per product term as
/// |a,b> -> (|a,b> + |-a,b> + |a,-b> - |-a,-b>) / 2,
/// after which the gate's output amplitude factors are applied as coherent
/// relabellings.
pub fn apply_kerr_symbolic(
    gate: &KerrGateSpec,
    state: &CoherentSuperposition,
) -> Result<CoherentSuperposition> {
    if state.n_modes() != 2 {
        return Err(Error::ChannelMismatch(format!(
            "Kerr gate acts on two modes, state has {}",
            state.n_modes()
        )));
    }
    const PHASE_TOL: f64 = 1e-8;
    let tau = std::f64::consts::TAU;
    let wrap = |p: f64| p.rem_euclid(tau);
    let is_zero = |p: f64| {
        let w = wrap(p);
        w < PHASE_TOL || (tau - w) < PHASE_TOL
    };
    let is_pi = |p: f64| (wrap(p) - std::f64::consts::PI).abs() < PHASE_TOL;
    if !is_zero(gate.phi_11) || !is_zero(gate.phi_22) || !(is_zero(gate.phi_12) || is_pi(gate.phi_12))
    {
        return Err(Error::UnsupportedGatePhases {
            phi_11: gate.phi_11,
            phi_22: gate.phi_22,
            phi_12: gate.phi_12,
        });
    }
    let cross_pi = is_pi(gate.phi_12);
    let mut terms: Vec<(C64, Vec<C64>)> = Vec::new();
    for t in state.terms() {
        let (a, b) = (t.amps[0], t.amps[1]);
        if cross_pi {
            let half = t.coeff * 0.5;
            terms.push((half, vec![a, b]));
            terms.push((half, vec![-a, b]));
            terms.push((half, vec![a, -b]));
            terms.push((-half, vec![-a, -b]));
        } else {
            terms.push((t.coeff, vec![a, b]));
        }
    }
    let mut out = CoherentSuperposition::from_terms(2, terms);
    out.scale_mode_amplitude(0, gate.amp_1);
    out.scale_mode_amplitude(1, gate.amp_2);
    out.normalized = state.is_normalized_flag();
    Ok(out)
}

/// Idealized gate output amplitudes: sqrt(c/v0) for matter-wave ends, 1 for
/// light ends, ignoring residual transfer deficits.
pub fn ideal_amp_factors(gate: &KerrGateSpec, c_over_v0: f64) -> (f64, f64) {
    let f = |m: ModeOutput| match m {
        ModeOutput::ToAtomLaser => c_over_v0.sqrt(),
        ModeOutput::StaysLight => 1.0,
    };
    (f(gate.transfer_1), f(gate.transfer_2))
}

/// Entanglement entropy (in ebits) across the bipartition
/// modes[..split] | modes[split..].
///
/// Gram matrices of the two sides' coherent components are orthogonalized
/// (symmetric orthogonalization with an eigenvalue floor), the coefficient
/// matrix is Schmidt-decomposed, and the entropy of the squared Schmidt
/// coefficients is returned.
pub fn entanglement_entropy(state: &CoherentSuperposition, split: usize) -> Result<f64> {
    state.require_normalized()?;
    assert!(
        split > 0 && split < state.n_modes(),
        "split must cut between modes"
    );
    let k = state.terms().len();
    if k == 0 {
        return Err(Error::NotNormalized { norm_sq: 0.0 });
    }
    let side_gram = |lo: usize, hi: usize| {
        DMatrix::from_fn(k, k, |i, j| {
            let mut ov = C64::new(1.0, 0.0);
            for m in lo..hi {
                ov *= coherent_overlap(state.terms()[i].amps[m], state.terms()[j].amps[m]);
            }
            ov
        })
    };
    let xl = orthonormal_factor(side_gram(0, split));
    let xr = orthonormal_factor(side_gram(split, state.n_modes()));
    let coeffs = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            state.terms()[i].coeff
        } else {
            C64::new(0.0, 0.0)
        }
    });
    // M = X_L diag(c) X_R^T (plain transpose: the Schmidt matrix couples the
    // two sides' expansion coefficients, not their conjugates).
    let m = &xl * coeffs * xr.transpose();
    let svd = m.svd(false, false);
    let total: f64 = svd.singular_values.iter().map(|s| s * s).sum();
    let mut entropy = 0.0;
    for s in svd.singular_values.iter() {
        let p = s * s / total;
        if p > 1e-300 {
            entropy -= p * p.log2();
        }
    }
    Ok(entropy)
}

/// Factor X with X^dag X = G (Hermitian PSD), rank-reduced at the eigenvalue
/// floor. Rows of X express the original vectors in an orthonormal basis.
fn orthonormal_factor(gram: DMatrix<C64>) -> DMatrix<C64> {
    let k = gram.nrows();
    let eig = nalgebra::SymmetricEigen::new(gram);
    let lmax = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let floor = GRAM_EIGEN_FLOOR * lmax.max(1.0);
    let kept: Vec<usize> = (0..k).filter(|&i| eig.eigenvalues[i] > floor).collect();
    let mut x = DMatrix::from_element(kept.len(), k, C64::new(0.0, 0.0));
    for (row, &idx) in kept.iter().enumerate() {
        let lam_sqrt = eig.eigenvalues[idx].sqrt();
        for col in 0..k {
            // X = Lambda^{1/2} U^dag
            x[(row, col)] = eig.eigenvectors[(col, idx)].conj() * lam_sqrt;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transfer::KerrGateSpec;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn overlap_identities() {
        let a = c(0.7, -0.3);
        assert!((coherent_overlap(a, a) - c(1.0, 0.0)).norm() < 1e-15);
        // <1|-1> = e^{-2}
        let ov = coherent_overlap(c(1.0, 0.0), c(-1.0, 0.0));
        assert!((ov.re - 0.135_335_283_236_612_7).abs() < 1e-15);
        assert!(ov.im.abs() < 1e-18);
        // <0|beta> = e^{-|beta|^2/2}
        let b = c(0.4, 1.1);
        let ov = coherent_overlap(c(0.0, 0.0), b);
        assert!((ov.norm() - (-0.5 * b.norm_sqr()).exp()).abs() < 1e-15);
    }

    #[test]
    fn dedup_merges_equal_amplitudes() {
        let s = CoherentSuperposition::from_terms(
            2,
            [
                (c(0.5, 0.0), vec![c(1.0, 0.0), c(0.0, 0.0)]),
                (c(0.5, 0.0), vec![c(1.0, 0.0), c(-0.0, 0.0)]),
            ],
        );
        assert_eq!(s.terms().len(), 1);
        assert!((s.terms()[0].coeff - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn normalization_via_gram() {
        let b = c(0.9, 0.2);
        let mut s = CoherentSuperposition::from_terms(
            1,
            [(c(1.0, 0.0), vec![b]), (c(1.0, 0.0), vec![-b])],
        );
        s.normalize().unwrap();
        assert!((s.norm_sq() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cat_basis_orthonormal() {
        let basis = CatBasis::new(c(0.8, 0.5)).unwrap();
        let plus = basis.ket(CatSign::Plus);
        let minus = basis.ket(CatSign::Minus);
        assert!((plus.norm_sq() - 1.0).abs() < 1e-12);
        assert!((minus.norm_sq() - 1.0).abs() < 1e-12);
        assert!(plus.inner(&minus).norm() < 1e-14);
        assert!((basis.plus_norm + basis.minus_norm - 4.0).abs() < 1e-14);
    }

    #[test]
    fn cat_basis_rejects_zero() {
        assert!(CatBasis::new(c(0.0, 0.0)).is_err());
    }

    #[test]
    fn kerr_pi_cross_phase_gives_four_term_cat() {
        let gate = KerrGateSpec::bare(0.0, 0.0, PI);
        let input = CoherentSuperposition::coherent_product(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let out = apply_kerr_symbolic(&gate, &input).unwrap();
        assert_eq!(out.terms().len(), 4);
        assert!((out.norm_sq() - 1.0).abs() < 1e-12);
        // Sign pattern: the |-a,-b> term carries the minus.
        for t in out.terms() {
            let sign = if t.amps[0].re < 0.0 && t.amps[1].re < 0.0 {
                -0.5
            } else {
                0.5
            };
            assert!((t.coeff - c(sign, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn kerr_zero_phases_is_identity_with_scaling() {
        let mut gate = KerrGateSpec::bare(0.0, 0.0, 0.0);
        gate.amp_1 = 3.0;
        let input = CoherentSuperposition::coherent_product(&[c(1.0, 0.0), c(0.5, 0.0)]);
        let out = apply_kerr_symbolic(&gate, &input).unwrap();
        assert_eq!(out.terms().len(), 1);
        assert!((out.terms()[0].amps[0] - c(3.0, 0.0)).norm() < 1e-12);
        assert!((out.terms()[0].amps[1] - c(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn kerr_rejects_fractional_phases() {
        let gate = KerrGateSpec::bare(0.3, 0.0, PI);
        let input = CoherentSuperposition::coherent_product(&[c(1.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            apply_kerr_symbolic(&gate, &input),
            Err(Error::UnsupportedGatePhases { .. })
        ));
    }

    #[test]
    fn kerr_with_vacuum_partner_degenerates_to_product() {
        let gate = KerrGateSpec::bare(0.0, 0.0, PI);
        let input = CoherentSuperposition::coherent_product(&[c(1.5, 0.0), c(0.0, 0.0)]);
        let out = apply_kerr_symbolic(&gate, &input).unwrap();
        // (|a,0> + |-a,0> + |a,0> - |-a,0>)/2 = |a,0>
        assert_eq!(out.terms().len(), 1);
        assert!((out.terms()[0].coeff - c(1.0, 0.0)).norm() < 1e-12);
        let e = entanglement_entropy(&out, 1).unwrap();
        assert!(e.abs() < 1e-12);
    }

    #[test]
    fn entropy_product_state_is_zero() {
        let s = CoherentSuperposition::coherent_product(&[c(1.3, 0.4), c(-0.2, 0.9)]);
        assert!(entanglement_entropy(&s, 1).unwrap() < 1e-12);
    }

    #[test]
    fn entropy_antisymmetric_cat_is_one_ebit() {
        for &a in &[0.3, 1.0, 2.5] {
            let aa = c(a, 0.0);
            let s = CoherentSuperposition::from_terms(
                2,
                [
                    (c(1.0, 0.0), vec![aa, -aa]),
                    (c(-1.0, 0.0), vec![-aa, aa]),
                ],
            )
            .normalized()
            .unwrap();
            let e = entanglement_entropy(&s, 1).unwrap();
            assert!((e - 1.0).abs() < 1e-9, "a = {a}: entropy {e}");
        }
    }

    #[test]
    fn entropy_requires_normalization() {
        let s = CoherentSuperposition::from_terms(
            2,
            [(c(2.0, 0.0), vec![c(1.0, 0.0), c(1.0, 0.0)])],
        );
        assert!(matches!(
            entanglement_entropy(&s, 1),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn projection_on_plus_state_is_complete() {
        // |+> x |psi>, project mode 0 on |+>: probability 1, post |psi>.
        let basis = CatBasis::new(c(1.2, 0.0)).unwrap();
        let psi_amp = c(0.3, -0.7);
        let plus = basis.ket(CatSign::Plus);
        let state = plus.tensor(&CoherentSuperposition::coherent_product(&[psi_amp]));
        let (p, post) = project(&state, 0, &basis, CatSign::Plus).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        assert_eq!(post.terms().len(), 1);
        assert!((post.terms()[0].amps[0] - psi_amp).norm() < 1e-12);
        let (pm, _) = project(&state, 0, &basis, CatSign::Minus).unwrap();
        assert!(pm < 1e-20);
    }

    #[test]
    fn projection_probabilities_sum_to_one() {
        // Entangled atom-light state: (|x>|b> + |y>|-b>)/norm.
        let b = c(0.9, 0.0);
        let basis = CatBasis::new(b).unwrap();
        let state = CoherentSuperposition::from_terms(
            2,
            [
                (c(0.6, 0.1), vec![c(1.0, 0.0), b]),
                (c(0.4, -0.2), vec![c(-1.0, 0.0), -b]),
            ],
        )
        .normalized()
        .unwrap();
        let (pp, _) = project(&state, 1, &basis, CatSign::Plus).unwrap();
        let (pm, _) = project(&state, 1, &basis, CatSign::Minus).unwrap();
        assert!((pp + pm - 1.0).abs() < 1e-10);
    }

    #[test]
    fn projection_rejects_out_of_span_support() {
        let basis = CatBasis::new(c(1.0, 0.0)).unwrap();
        let state = CoherentSuperposition::coherent_product(&[c(0.4, 0.0), c(2.5, 0.0)]);
        assert!(matches!(
            project(&state, 1, &basis, CatSign::Plus),
            Err(Error::BasisMismatch(_))
        ));
    }

    #[test]
    fn text_round_trip() {
        let s = CoherentSuperposition::from_terms(
            2,
            [
                (c(0.5, -0.25), vec![c(1.0, 2.0), c(-0.5, 0.125)]),
                (c(-0.125, 0.75), vec![c(0.0, 0.0), c(3.0, -1.0)]),
            ],
        );
        let rt = CoherentSuperposition::from_text(&s.to_text()).unwrap();
        assert_eq!(rt.terms().len(), s.terms().len());
        assert!((s.inner(&rt).re - s.norm_sq()).abs() < 1e-12);
    }
}
