use crate::grid_ops::lemmas::{run_grid_lemma_suite, DifferenceMode, LemmaRow};
use crate::kernels::{second_difference_weights, BuiltinKernel, Support};

/// Allowance added to the weight bound for kernels truncated at finite `K`.
pub const TAIL_TOLERANCE: f64 = 1e-8;

// Half-width of the stencil, in x units, used for the weight bound.
const STENCIL_REACH: f64 = 200.0;

#[derive(Debug, Clone, PartialEq)]
pub struct BoundSuiteReport {
    pub h_list: Vec<f64>,
    pub rows: Vec<LemmaRow>,
}

impl BoundSuiteReport {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| !r.passed).count()
    }

    pub fn passed(&self) -> bool {
        self.violations() == 0
    }
}

/// `sum_k |b_k| <= 2 tv_mass` for every built-in kernel and mesh size.
pub fn kernel_bound_rows(h_list: &[f64]) -> Vec<LemmaRow> {
    let mut rows = Vec::new();
    for k in BuiltinKernel::ALL {
        let kernel = k.kernel();
        for &h in h_list {
            let half_width = (STENCIL_REACH / h).ceil() as usize;
            let (measured, passed_weights) = match second_difference_weights(&kernel, h, half_width) {
                Ok(w) => (w.abs_sum(), true),
                Err(_) => (f64::NAN, false),
            };
            let tail = match kernel.support() {
                Support::Compact(_) => 0.0,
                Support::Unbounded => TAIL_TOLERANCE,
            };
            let bound = 2.0 * kernel.tv_mass() + tail;
            rows.push(LemmaRow {
                check: "weight_abs_sum".into(),
                function: kernel.name().to_string(),
                h,
                measured,
                bound,
                rate: None,
                passed: passed_weights && measured <= bound * (1.0 + 1e-12),
            });
        }
    }
    rows
}

/// Grid-operator bounds on the test corpus plus the kernel weight bound.
pub fn run_bound_suite(h_list: &[f64], mode: DifferenceMode) -> BoundSuiteReport {
    let mut rows = run_grid_lemma_suite(h_list, mode);
    rows.extend(kernel_bound_rows(h_list));
    BoundSuiteReport {
        h_list: h_list.to_vec(),
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_bound_holds_and_matches_closed_form_for_exp() {
        let rows = kernel_bound_rows(&[1.0, 0.1]);
        assert!(rows.iter().all(|r| r.passed), "{rows:?}");
        // b_0 = (e^{-h} - 1)/h and the off-centre weights sum to -b_0
        for h in [1.0, 0.1] {
            let exp = rows.iter().find(|r| r.function == "exp" && r.h == h).unwrap();
            let exact = 2.0 * (1.0 - (-h).exp()) / h;
            assert!((exp.measured - exact).abs() < 1e-12, "{} vs {exact}", exp.measured);
        }
    }

    #[test]
    fn corrupted_mode_fails_the_suite() {
        assert!(!run_bound_suite(&[0.2, 0.1], DifferenceMode::Corrupted).passed());
    }
}
