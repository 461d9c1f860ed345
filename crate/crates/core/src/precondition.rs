use thiserror::Error;

use crate::instance::Instance;

/// An instance feature the requested model or algorithm cannot handle.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PreconditionError {
    #[error("paired applications are not supported here")]
    PairedApplications,
    #[error("common quota sets are not supported here")]
    CommonQuotas,
    #[error("lower quotas are not supported here")]
    LowerQuotas,
    #[error("lower-quota groups are not supported here")]
    LowerGroups,
    #[error("tied scores at college {college}")]
    Ties { college: String },
    #[error("tied scores inside quota set {set}")]
    TiesInSet { set: String },
    #[error("incoherent policy: {0}")]
    Policy(String),
}

/// Fluent precondition checks used by builders and algorithms.
pub(crate) struct Require<'a>(pub &'a Instance);

impl Require<'_> {
    pub fn no_paired(self) -> Result<Self, PreconditionError> {
        if self.0.has_paired() {
            return Err(PreconditionError::PairedApplications);
        }
        Ok(self)
    }

    pub fn no_common(self) -> Result<Self, PreconditionError> {
        if !self.0.quota_sets().is_empty() {
            return Err(PreconditionError::CommonQuotas);
        }
        Ok(self)
    }

    pub fn no_lower(self) -> Result<Self, PreconditionError> {
        if self.0.colleges().iter().any(|c| c.lower > 0) {
            return Err(PreconditionError::LowerQuotas);
        }
        self.no_groups()
    }

    pub fn no_groups(self) -> Result<Self, PreconditionError> {
        if !self.0.lower_groups().is_empty() {
            return Err(PreconditionError::LowerGroups);
        }
        Ok(self)
    }

    pub fn no_ties(self) -> Result<Self, PreconditionError> {
        if let Some(j) = self.0.tied_college() {
            return Err(PreconditionError::Ties {
                college: self.0.college(j).id.clone(),
            });
        }
        Ok(self)
    }

    /// No ties at any college nor across the colleges of any quota set.
    pub fn no_ties_in_sets(self) -> Result<Self, PreconditionError> {
        let this = self.no_ties()?;
        if let Some(p) = this.0.tied_quota_set() {
            return Err(PreconditionError::TiesInSet {
                set: this.0.quota_sets()[p].id.clone(),
            });
        }
        Ok(this)
    }
}
