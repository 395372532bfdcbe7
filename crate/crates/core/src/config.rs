use crate::tensor::Norm;

/// Default relative tolerance for identity residuals.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Tolerances and norm choice shared by the inverse constructors and the
/// perturbation reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    /// Norm used for gates, ratios and bounds.
    pub norm: Norm,
    /// Relative residual tolerance for identity checks.
    pub tol: f64,
    /// Relative singular-value cutoff for ranks and pseudoinverses;
    /// `None` means `max(rows, cols) * eps`.
    pub rank_tol: Option<f64>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            norm: Norm::Frobenius,
            tol: DEFAULT_TOL,
            rank_tol: None,
        }
    }
}

impl Config {
    pub fn with_norm(mut self, norm: Norm) -> Self {
        self.norm = norm;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_rank_tol(mut self, rank_tol: Option<f64>) -> Self {
        self.rank_tol = rank_tol;
        self
    }
}
