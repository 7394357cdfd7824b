//! Structured check outcomes shared by validators and campaigns.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Fail,
    /// A check that is known to fail for these parameters and did.
    ExpectedFail,
    /// A check that was expected to fail but passed.
    UnexpectedPass,
}

impl Outcome {
    pub fn is_ok(self) -> bool {
        matches!(self, Outcome::Pass | Outcome::ExpectedFail)
    }
}

/// One named check with its outcome and, on failure, a refuting witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<String>,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Check {
        Check { name: name.into(), outcome: Outcome::Pass, detail: None, witness: None }
    }

    pub fn fail(name: impl Into<String>, witness: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            outcome: Outcome::Fail,
            detail: None,
            witness: Some(witness.into()),
        }
    }

    /// Pass when `witness` is `None`.
    pub fn from_witness(name: impl Into<String>, witness: Option<String>) -> Check {
        match witness {
            None => Check::pass(name),
            Some(w) => Check::fail(name, w),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Check {
        self.detail = Some(detail.into());
        self
    }

    /// Reinterprets this check as one that should fail.
    pub fn expecting_failure(mut self) -> Check {
        self.outcome = match self.outcome {
            Outcome::Fail => Outcome::ExpectedFail,
            Outcome::Pass => Outcome::UnexpectedPass,
            o => o,
        };
        self
    }

    pub fn passed(&self) -> bool {
        self.outcome.is_ok()
    }
}
