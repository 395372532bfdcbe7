//! Named pass/fail diagnostics carried by inverse and perturbation reports.

use serde::Serialize;

/// How a condition participates in a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    /// Hypothesis that must hold before a formula is trusted.
    Gate,
    /// Identity re-checked on the computed result.
    #[default]
    Check,
    /// Reported for diagnosis only.
    Info,
}

/// One checked hypothesis or identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition {
    pub name: String,
    pub role: Role,
    pub passed: bool,
    /// Measured defect. For rank conditions this is the rank gap; for norm
    /// gates it is the gated quantity itself.
    pub residual: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Condition {
    /// Passes when `residual <= tolerance`.
    pub fn at_most(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            role: Role::Check,
            passed: residual <= tolerance,
            residual,
            tolerance,
            detail: String::new(),
        }
    }

    /// Passes when `value < bound` (strict, as the norm gates require).
    pub fn below(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            role: Role::Check,
            passed: value < bound,
            residual: value,
            tolerance: bound,
            detail: String::new(),
        }
    }

    /// Passes when all listed ranks coincide. Residual is `max - min`.
    pub fn ranks_equal(name: impl Into<String>, ranks: &[(&str, usize)]) -> Self {
        let max = ranks.iter().map(|r| r.1).max().unwrap_or(0);
        let min = ranks.iter().map(|r| r.1).min().unwrap_or(0);
        let detail = ranks
            .iter()
            .map(|(label, r)| format!("rshrank({label})={r}"))
            .collect::<Vec<_>>()
            .join(", ");
        Self {
            name: name.into(),
            role: Role::Check,
            passed: max == min,
            residual: (max - min) as f64,
            tolerance: 0.0,
            detail,
        }
    }

    /// A condition that could not be evaluated.
    pub fn failed(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            role: Role::Check,
            passed: false,
            residual: 1.0,
            tolerance: 0.0,
            detail: detail.into(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn gate(mut self) -> Self {
        self.role = Role::Gate;
        self
    }

    pub fn info(mut self) -> Self {
        self.role = Role::Info;
        self
    }
}

/// Ordered collection of [`Condition`]s keyed by name.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ConditionReport {
    conditions: Vec<Condition>,
}

impl ConditionReport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds or replaces the entry with the same name.
    pub fn push(&mut self, condition: Condition) {
        match self.conditions.iter_mut().find(|c| c.name == condition.name) {
            Some(slot) => *slot = condition,
            None => self.conditions.push(condition),
        }
    }

    pub fn extend(&mut self, other: ConditionReport) {
        for c in other.conditions {
            self.push(c);
        }
    }

    pub fn get(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }

    /// `false` when the entry is missing.
    pub fn passed(&self, name: &str) -> bool {
        self.get(name).is_some_and(|c| c.passed)
    }

    pub fn all_passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    /// True when every entry with the given role passed.
    pub fn role_passed(&self, role: Role) -> bool {
        self.conditions.iter().filter(|c| c.role == role).all(|c| c.passed)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Condition> {
        self.conditions.iter()
    }

    pub fn len(&self) -> usize {
        self.conditions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.conditions.is_empty()
    }
}

impl From<Condition> for ConditionReport {
    fn from(c: Condition) -> Self {
        Self { conditions: vec![c] }
    }
}

impl FromIterator<Condition> for ConditionReport {
    fn from_iter<I: IntoIterator<Item = Condition>>(iter: I) -> Self {
        let mut report = Self::new();
        for c in iter {
            report.push(c);
        }
        report
    }
}

/// `num / den`, or `num` itself when `den` vanishes.
pub(crate) fn relative(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        num
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_replaces_by_name() {
        let mut r = ConditionReport::new();
        r.push(Condition::at_most("x", 1.0, 0.5));
        r.push(Condition::at_most("y", 0.0, 0.5));
        assert!(!r.all_passed());
        r.push(Condition::at_most("x", 0.1, 0.5));
        assert_eq!(r.len(), 2);
        assert!(r.all_passed());
        assert!(!r.passed("missing"));
    }

    #[test]
    fn rank_condition_detail_and_gap() {
        let c = Condition::ranks_equal("rank_chain", &[("A*B", 2), ("B", 3)]);
        assert!(!c.passed);
        assert_eq!(c.residual, 1.0);
        assert_eq!(c.detail, "rshrank(A*B)=2, rshrank(B)=3");
    }

    #[test]
    fn norm_gate_is_strict() {
        assert!(!Condition::below("g", 1.0, 1.0).passed);
        assert!(Condition::below("g", 0.999, 1.0).passed);
    }
}
