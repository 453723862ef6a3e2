//! Machine-readable verification records.
//!
//! Every identity checked by the library ends up as a [`VerificationReport`]:
//! the two sides that should agree, the residual between them, the tolerance
//! the residual is held to, and a pass flag that is exactly
//! `residual <= tolerance`.

use serde::Serialize;

/// Identity or property a report refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    Normalization,
    BoundaryDensity,
    BoundarySlope,
    ExpectationIdentity,
    EquilibriumCondition,
    FundamentalTheorem,
    AssociatedTheorem,
    ResponsePositivity,
    UncertaintyProduct,
    UncertaintyMatrix,
    ScoreMean,
    EstimatorScoreCorrelation,
    CramerRao,
    CramerRaoSaturation,
    CramerRaoStrict,
    FisherSelfConsistency,
    AsymptoticMean,
    AsymptoticCovariance,
    AmariFlat,
    AmariLeviCivita,
    ChartRoundTrip,
    ChartPushforward,
    ModeCumulant,
    DistanceProbabilityEquivalence,
    OccurrenceRatio,
    Monomodality,
    CovariantHessian,
    CovariantPde,
    GaussianDecomposition,
    GradientDistance,
    MetricCompatibility,
    UnitFieldGeodesic,
    GeodesicAffineNorm,
    GeodesicArcLength,
    GeodesicChartLength,
    DissipationLaw,
    DissipationRate,
    GeodesicReversibility,
    HydrodynamicTerminal,
    HydrodynamicLength,
    PotentialSphere,
    DensityReconstruction,
    RiemannTensor,
    ScalarCurvature,
    IntrinsicEntropy,
    JaynesGeometric,
    GeometricEntropyInvariance,
    NaiveEntropyShift,
    MaxEntropyComparison,
}

/// Side conditions attached to a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    /// Quadrature hit its subdivision limit before meeting tolerance.
    QuadratureNonConvergence,
    /// The family violates the vanishing-boundary conditions.
    NonConforming,
    /// The check does not apply to this input; it neither passes nor fails.
    NotApplicable,
    /// A trajectory left the support before its requested length.
    Truncated,
    /// Monte Carlo sample too small for the requested band.
    InsufficientTrials,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub identity: Identity,
    pub subject: String,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub shape: Vec<usize>,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub flags: Vec<Flag>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl VerificationReport {
    /// Compare two equally shaped arrays by max-abs difference.
    pub fn compare(
        identity: Identity,
        subject: impl Into<String>,
        lhs: Vec<f64>,
        rhs: Vec<f64>,
        shape: Vec<usize>,
        tolerance: f64,
    ) -> Self {
        assert_eq!(lhs.len(), rhs.len(), "report sides differ in length");
        let residual = lhs
            .iter()
            .zip(&rhs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, |m: f64, d| if d.is_nan() || m.is_nan() { f64::NAN } else { m.max(d) });
        Self::with_residual(identity, subject, lhs, rhs, shape, residual, tolerance)
    }

    pub fn scalar(
        identity: Identity,
        subject: impl Into<String>,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
    ) -> Self {
        Self::compare(identity, subject, vec![lhs], vec![rhs], vec![], tolerance)
    }

    /// Build a report from a residual computed by the caller (e.g. a relative
    /// or frame-normalized residual).
    pub fn with_residual(
        identity: Identity,
        subject: impl Into<String>,
        lhs: Vec<f64>,
        rhs: Vec<f64>,
        shape: Vec<usize>,
        residual: f64,
        tolerance: f64,
    ) -> Self {
        let residual = if residual.is_nan() { f64::INFINITY } else { residual };
        Self {
            identity,
            subject: subject.into(),
            lhs,
            rhs,
            shape,
            residual,
            tolerance,
            pass: residual <= tolerance,
            flags: Vec::new(),
            note: None,
        }
    }

    pub fn not_applicable(
        identity: Identity,
        subject: impl Into<String>,
        reason: impl Into<String>,
    ) -> Self {
        let mut r = Self::with_residual(identity, subject, vec![], vec![], vec![], 0.0, 0.0);
        r.flags.push(Flag::NotApplicable);
        r.note = Some(reason.into());
        r
    }

    pub fn flag(mut self, flag: Flag) -> Self {
        if !self.flags.contains(&flag) {
            self.flags.push(flag);
            self.flags.sort();
        }
        self
    }

    pub fn flag_if(self, cond: bool, flag: Flag) -> Self {
        if cond {
            self.flag(flag)
        } else {
            self
        }
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn has_flag(&self, flag: Flag) -> bool {
        self.flags.contains(&flag)
    }

    /// One-line human summary.
    pub fn summary_line(&self) -> String {
        let status = if self.has_flag(Flag::NotApplicable) {
            "n/a "
        } else if self.pass {
            "PASS"
        } else {
            "FAIL"
        };
        format!(
            "{status} {:?} [{}] residual={:.3e} tol={:.1e}",
            self.identity, self.subject, self.residual, self.tolerance
        )
    }
}

/// Aggregate block written next to the report list.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub max_residual: f64,
}

impl Summary {
    pub fn of(reports: &[VerificationReport]) -> Self {
        let applicable = reports.iter().filter(|r| !r.has_flag(Flag::NotApplicable));
        let max_residual = applicable
            .clone()
            .map(|r| r.residual)
            .filter(|r| r.is_finite())
            .fold(0.0, f64::max);
        Self {
            total: reports.len(),
            passed: reports.iter().filter(|r| r.pass).count(),
            max_residual,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_iff_residual_within_tolerance() {
        let r = VerificationReport::compare(
            Identity::Normalization,
            "x",
            vec![1.0, 2.0],
            vec![1.0, 2.5],
            vec![2],
            0.4,
        );
        assert_eq!(r.residual, 0.5);
        assert!(!r.pass);
        let r = VerificationReport::scalar(Identity::Normalization, "x", 1.0, 1.0 + 1e-12, 1e-10);
        assert!(r.pass);
    }

    #[test]
    fn nan_residual_fails() {
        let r = VerificationReport::scalar(Identity::Normalization, "x", f64::NAN, 1.0, 1.0);
        assert!(!r.pass);
    }

    #[test]
    fn summary_counts() {
        let a = VerificationReport::scalar(Identity::Normalization, "a", 1.0, 1.0, 1e-3);
        let b = VerificationReport::scalar(Identity::Normalization, "b", 1.0, 2.0, 1e-3);
        let c = VerificationReport::not_applicable(Identity::AsymptoticMean, "c", "m too small");
        let s = Summary::of(&[a, b, c]);
        assert_eq!(s.total, 3);
        assert_eq!(s.passed, 2);
        assert_eq!(s.max_residual, 1.0);
    }
}
