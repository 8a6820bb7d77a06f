// SPDX-License-Identifier: Apache-2.0
//! Optional JSON configuration accepted by every subcommand via `--config`.
//!
//! Keys mirror the long flags with underscores. A flag given on the command
//! line wins over the file; the file wins over built-in defaults.
//!
//! ```json
//! { "seed": 7, "backtrack_limit": "unlimited", "parallel": 4, "policy": "ffr", "k": 16 }
//! ```

use std::path::Path;

use serde::Deserialize;

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub backtrack_limit: Option<Limit>,
    pub parallel: Option<usize>,
    pub policy: Option<String>,
    pub endpoint: Option<String>,
    pub k: Option<usize>,
    pub target: Option<String>,
}

/// A backtrack budget: a count, or `"unlimited"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(try_from = "LimitRepr")]
pub struct Limit(pub Option<u64>);

#[derive(Deserialize)]
#[serde(untagged)]
enum LimitRepr {
    Count(u64),
    Word(String),
}

impl TryFrom<LimitRepr> for Limit {
    type Error = String;

    fn try_from(r: LimitRepr) -> Result<Limit, String> {
        match r {
            LimitRepr::Count(n) => Ok(Limit(Some(n))),
            LimitRepr::Word(w) => w.parse(),
        }
    }
}

impl std::str::FromStr for Limit {
    type Err = String;

    fn from_str(s: &str) -> Result<Limit, String> {
        if s.eq_ignore_ascii_case("unlimited") {
            Ok(Limit(None))
        } else {
            s.parse()
                .map(|n| Limit(Some(n)))
                .map_err(|_| format!("expected a count or 'unlimited', got '{s}'"))
        }
    }
}

impl Limit {
    /// The engine's budget, where unlimited is `u64::MAX`.
    pub fn budget(self) -> u64 {
        self.0.unwrap_or(u64::MAX)
    }
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<FileConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limits() {
        let c: FileConfig =
            serde_json::from_str(r#"{"backtrack_limit":"unlimited","seed":3}"#).unwrap();
        assert_eq!(c.backtrack_limit, Some(Limit(None)));
        assert_eq!(c.seed, Some(3));
        let c: FileConfig = serde_json::from_str(r#"{"backtrack_limit":50}"#).unwrap();
        assert_eq!(c.backtrack_limit.unwrap().budget(), 50);
        assert!(serde_json::from_str::<FileConfig>(r#"{"backtrack_limit":"lots"}"#).is_err());
        assert!(serde_json::from_str::<FileConfig>(r#"{"colour":1}"#).is_err());
    }
}
