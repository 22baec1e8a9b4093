use crate::error::{Error, Result};

use super::{SurrogateForm, SurrogateLoss};

/// Regularizer strength used when none is configured.
pub const DEFAULT_ALPHA: f64 = 10.0;

/// FTRL over surrogate losses with regularizer
/// `r(η) = (Mα/2)(η − 1/M)² + I(η ∈ [0, 2/M])`.
///
/// The learner only needs `Σ⟨g_j, g'_j⟩` and `Σ‖g_j‖²` over past rounds; the
/// play is `clip((α + Σ⟨g, g'⟩) / (M(α + w·Σ‖g‖²)), 0, 2/M)` with `w = 1` for
/// [`SurrogateForm::HalfM`] and `w = 2` for [`SurrogateForm::FullM`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FtrlState {
    alpha: f64,
    m: f64,
    form: SurrogateForm,
    sum_inner: f64,
    sum_sq: f64,
    /// Round whose stepsize is played next (1-based).
    t: usize,
}

impl FtrlState {
    pub fn new(alpha: f64, m: f64) -> Result<Self> {
        Self::with_form(alpha, m, SurrogateForm::HalfM)
    }

    pub fn with_form(alpha: f64, m: f64, form: SurrogateForm) -> Result<Self> {
        validate(alpha, m)?;
        Ok(Self {
            alpha,
            m,
            form,
            sum_inner: 0.0,
            sum_sq: 0.0,
            t: 1,
        })
    }

    /// Rebuilds a state from stored sums.
    pub fn from_sums(alpha: f64, m: f64, sum_inner: f64, sum_sq: f64) -> Result<Self> {
        validate(alpha, m)?;
        if !(sum_inner.is_finite() && sum_sq.is_finite() && sum_sq >= 0.0) {
            return Err(Error::contract("FTRL sums must be finite with Σ‖g‖² >= 0"));
        }
        Ok(Self {
            alpha,
            m,
            form: SurrogateForm::HalfM,
            sum_inner,
            sum_sq,
            t: 1,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn form(&self) -> SurrogateForm {
        self.form
    }

    pub fn sum_inner(&self) -> f64 {
        self.sum_inner
    }

    pub fn sum_sq(&self) -> f64 {
        self.sum_sq
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Upper end of the feasible interval, `2/M`.
    pub fn max_stepsize(&self) -> f64 {
        2.0 / self.m
    }

    pub fn stepsize(&self) -> f64 {
        clipped_ratio(self.alpha, self.m, self.form, self.sum_inner, self.sum_sq)
    }

    pub fn observe(&mut self, loss: &SurrogateLoss) -> Result<()> {
        if loss.m() != self.m {
            return Err(Error::contract(format!(
                "loss built with M = {} fed to learner with M = {}",
                loss.m(),
                self.m
            )));
        }
        if loss.form() != self.form {
            return Err(Error::contract("surrogate form differs from the learner's"));
        }
        self.observe_stats(loss.inner(), loss.sq());
        Ok(())
    }

    pub(crate) fn observe_stats(&mut self, inner: f64, sq: f64) {
        self.sum_inner += inner;
        self.sum_sq += sq;
        self.t += 1;
    }

    /// `r(η)` restricted to the feasible interval (`+∞` outside it).
    pub fn regularizer(&self, eta: f64) -> f64 {
        if !(0.0..=self.max_stepsize()).contains(&eta) {
            return f64::INFINITY;
        }
        let d = eta - 1.0 / self.m;
        0.5 * self.m * self.alpha * d * d
    }
}

fn validate(alpha: f64, m: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::contract(format!(
            "alpha must be finite and > 0, got {alpha}"
        )));
    }
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::contract(format!(
            "M must be finite and > 0, got {m}"
        )));
    }
    Ok(())
}

/// The ratio is formed before dividing by `M` so that equal sums give
/// `1.0 / M` bit for bit.
pub(crate) fn clipped_ratio(alpha: f64, m: f64, form: SurrogateForm, inner: f64, sq: f64) -> f64 {
    let ratio = (alpha + inner) / (alpha + form.sq_weight() * sq);
    let raw = ratio / m;
    raw.min(2.0 / m).max(0.0)
}

pub fn ftrl_stepsize(state: &FtrlState) -> f64 {
    state.stepsize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::Vector;
    use proptest::prelude::*;

    fn v(x: &[f64]) -> Vector {
        Vector::new(x.to_vec()).unwrap()
    }

    #[test]
    fn fresh_state_plays_inverse_m() {
        for alpha in [0.1, 1.0, 10.0] {
            assert_eq!(FtrlState::new(alpha, 2.0).unwrap().stepsize(), 0.5);
        }
        assert_eq!(
            FtrlState::new(10.0, 1002.0).unwrap().stepsize(),
            1.0 / 1002.0
        );
    }

    #[test]
    fn clips_low() {
        let s = FtrlState::from_sums(1.0, 1.0, -5.0, 3.0).unwrap();
        assert_eq!(s.stepsize(), 0.0);
    }

    #[test]
    fn clips_high() {
        let s = FtrlState::from_sums(1.0, 0.1, 100.0, 1.0).unwrap();
        assert_eq!(s.stepsize(), 20.0);
    }

    #[test]
    fn observe_updates_sums() {
        let mut s = FtrlState::new(1.0, 1.0).unwrap();
        let l = SurrogateLoss::new(1.0, &v(&[1.0, 1.0]), &v(&[1.0, -1.0])).unwrap();
        s.observe(&l).unwrap();
        assert_eq!(s.sum_inner(), 0.0);
        assert_eq!(s.sum_sq(), 2.0);
        assert_eq!(s.t(), 2);
    }

    #[test]
    fn zero_gradient_leaves_stepsize() {
        let mut s = FtrlState::from_sums(3.0, 2.0, 1.5, 4.0).unwrap();
        let before = s.stepsize();
        let z = v(&[0.0, 0.0]);
        s.observe(&SurrogateLoss::new(2.0, &z, &z).unwrap())
            .unwrap();
        assert_eq!(s.stepsize(), before);
    }

    #[test]
    fn m_mismatch_rejected() {
        let mut s = FtrlState::new(1.0, 1.0).unwrap();
        let g = v(&[1.0]);
        assert!(s
            .observe(&SurrogateLoss::new(2.0, &g, &g).unwrap())
            .is_err());
        let full = SurrogateLoss::with_form(1.0, SurrogateForm::FullM, &g, &g).unwrap();
        assert!(s.observe(&full).is_err());
    }

    #[test]
    fn rejects_nonpositive_alpha() {
        assert!(FtrlState::new(0.0, 1.0).is_err());
        assert!(FtrlState::new(-1.0, 1.0).is_err());
        assert!(FtrlState::new(1.0, 0.0).is_err());
    }

    #[test]
    fn full_form_starts_at_inverse_m() {
        let s = FtrlState::with_form(10.0, 4.0, SurrogateForm::FullM).unwrap();
        assert_eq!(s.stepsize(), 0.25);
    }

    proptest! {
        #[test]
        fn order_independent(
            a in prop::collection::vec(-1.0f64..1.0, 3),
            b in prop::collection::vec(-1.0f64..1.0, 3),
            c in prop::collection::vec(-1.0f64..1.0, 3),
        ) {
            let (a, b, c) = (v(&a), v(&b), v(&c));
            let l1 = SurrogateLoss::new(1.0, &a, &b).unwrap();
            let l2 = SurrogateLoss::new(1.0, &c, &a).unwrap();
            let mut s1 = FtrlState::new(1.0, 1.0).unwrap();
            let mut s2 = s1;
            s1.observe(&l1).unwrap();
            s1.observe(&l2).unwrap();
            s2.observe(&l2).unwrap();
            s2.observe(&l1).unwrap();
            prop_assert_eq!(s1, s2);
        }

        #[test]
        fn noiseless_history_is_fixed_point(
            gs in prop::collection::vec(prop::collection::vec(-10.0f64..10.0, 4), 1..60),
            alpha in 0.01f64..100.0,
            m in 0.01f64..2000.0,
        ) {
            let mut s = FtrlState::new(alpha, m).unwrap();
            let mut prev_sq = 0.0;
            for g in gs {
                let g = v(&g);
                s.observe(&SurrogateLoss::new(m, &g, &g).unwrap()).unwrap();
                prop_assert!(s.sum_sq() >= prev_sq);
                prev_sq = s.sum_sq();
                prop_assert_eq!(s.stepsize(), 1.0 / m);
            }
        }

        #[test]
        fn stepsize_in_domain(
            inner in -1e6f64..1e6,
            sq in 0.0f64..1e6,
            alpha in 1e-3f64..1e3,
            m in 1e-3f64..1e4,
        ) {
            let s = FtrlState::from_sums(alpha, m, inner, sq).unwrap();
            let eta = s.stepsize();
            prop_assert!((0.0..=2.0 / m).contains(&eta));
        }
    }
}
