//! Resource caps for enumerations.
//!
//! Exceeding a cap is always an explicit error. Defaults can be overridden by
//! the `DFORMS_CAPS` environment variable, e.g. `group=100000,monomials=5000`.

use crate::error::{Error, Result};

pub const ENV_VAR: &str = "DFORMS_CAPS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest group closure or orbit enumeration.
    pub group: usize,
    /// Largest number of monomials in one graded piece or expansion.
    pub monomials: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { group: 10_000_000, monomials: 1_000_000 }
    }
}

impl Caps {
    pub fn parse(spec: &str) -> Result<Caps> {
        let mut caps = Caps::default();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("cap entry {item:?} lacks '='")))?;
            let value: usize = value
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad cap value in {item:?}")))?;
            match key.trim() {
                "group" => caps.group = value,
                "monomials" => caps.monomials = value,
                other => return Err(Error::Parse(format!("unknown cap {other:?}"))),
            }
        }
        Ok(caps)
    }

    /// Defaults overridden by `DFORMS_CAPS` when set.
    pub fn from_env() -> Result<Caps> {
        match std::env::var(ENV_VAR) {
            Ok(s) => Caps::parse(&s),
            Err(_) => Ok(Caps::default()),
        }
    }

    pub(crate) fn check_group(&self, n: usize) -> Result<()> {
        if n > self.group {
            Err(Error::CapExceeded { what: "group", limit: self.group })
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_monomials(&self, n: usize) -> Result<()> {
        if n > self.monomials {
            Err(Error::CapExceeded { what: "monomials", limit: self.monomials })
        } else {
            Ok(())
        }
    }
}
