//! The JSON tree schema shared by pseudo-derivations and derivations.
//!
//! ```json
//! {
//!   "rule": "app",
//!   "subject": "(λx.x) y",
//!   "env": { "y": "[a]" },
//!   "conclusion": "a",
//!   "children": [ ... ],
//!   "equations": [ "b = <c>→d" ]
//! }
//! ```
//!
//! `rule` is one of `var`, `abs`, `abs-I`, `abs-K`, `many`, `app`. Types use
//! the textual rendering (`[..]` multisets, `<..>` lists, `→` or `->`).
//! `equations` is only meaningful for pseudo-derivations and may be omitted.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeJson {
    pub rule: String,
    pub subject: String,
    #[serde(default)]
    pub env: BTreeMap<String, String>,
    pub conclusion: String,
    #[serde(default)]
    pub children: Vec<TreeJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub equations: Vec<String>,
}

impl TreeJson {
    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(TreeJson::size).sum::<usize>()
    }
}
