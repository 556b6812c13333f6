//! Name and role bookkeeping for events.
//!
//! Events are dense ids `1..=N`. Names of the shape `E<number>` are pinned
//! to that number, so `E7` is always id 7 and registering it materializes
//! any missing earlier ids with their default names. Any other identifier
//! takes the next free id. Each event carries a role: written by the user,
//! introduced as a supplementary definition, or introduced as a query
//! indicator. The two introduced roles are what projection hides again
//! after intersection.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::var::{IndexSet, VarId};
use crate::{Error, Result};

/// Role of a registered event.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum VarKind {
    /// Written by the user; survives projection.
    User,
    /// Introduced to name a subformula; hidden from results.
    Supplementary,
    /// Introduced to ask a query; hidden from results.
    Indicator,
}

/// How to treat identifiers that are not registered yet.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Default)]
pub enum UnknownVars {
    /// Register on first mention.
    #[default]
    AutoRegister,
    /// Refuse: only pre-registered names parse.
    Reject,
}

#[derive(Clone, Debug)]
struct Entry {
    name: String,
    kind: VarKind,
}

/// Bidirectional name table, ids dense from 1.
#[derive(Clone, Debug, Default)]
pub struct Registry {
    entries: Vec<Entry>,
    by_name: HashMap<String, VarId>,
}

fn pinned_id(name: &str) -> Option<u32> {
    let digits = name.strip_prefix('E')?;
    if digits.is_empty() || digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit())
    {
        return None;
    }
    digits.parse().ok()
}

impl Registry {
    pub fn new() -> Registry {
        Registry::default()
    }

    /// Number of registered events; the universe is `1..=len`.
    pub fn len(&self) -> u32 {
        self.entries.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        self.by_name.get(name).copied()
    }

    /// Name of a registered event.
    pub fn name(&self, v: VarId) -> Option<&str> {
        self.entries.get(v.index()).map(|e| e.name.as_str())
    }

    pub fn kind(&self, v: VarId) -> Option<VarKind> {
        self.entries.get(v.index()).map(|e| e.kind)
    }

    fn push(&mut self, name: String, kind: VarKind) -> VarId {
        let id = VarId::new(self.entries.len() as u32 + 1).expect("ids start at 1");
        self.by_name.insert(name.clone(), id);
        self.entries.push(Entry { name, kind });
        id
    }

    /// Registers every id up to `n`, with default names where missing.
    pub fn ensure_universe(&mut self, n: u32) {
        while self.len() < n {
            let name = format!("E{}", self.len() + 1);
            self.push(name, VarKind::User);
        }
    }

    /// Registers (or resolves) a user-visible name.
    ///
    /// `E<number>` names resolve to that id; anything else takes the next
    /// free id on first mention. Pinned names collide if their id is
    /// already held by a generated event.
    pub fn register(&mut self, name: &str) -> Result<VarId> {
        if let Some(id) = self.by_name.get(name) {
            return Ok(*id);
        }
        if let Some(n) = pinned_id(name) {
            self.ensure_universe(n);
            let v = VarId::new(n).expect("pinned ids start at 1");
            let existing = &self.entries[v.index()];
            if existing.name == name {
                Ok(v)
            } else {
                Err(Error::NameConflict {
                    name: name.to_string(),
                    existing: n,
                })
            }
        } else {
            Ok(self.push(name.to_string(), VarKind::User))
        }
    }

    /// Allocates a fresh hidden event of the given role.
    pub fn fresh(&mut self, kind: VarKind) -> VarId {
        let id = self.entries.len() as u32 + 1;
        let prefix = match kind {
            VarKind::Supplementary => "_s",
            VarKind::Indicator => "_k",
            VarKind::User => "_u",
        };
        let mut name = format!("{prefix}{id}");
        let mut bump = 0;
        while self.by_name.contains_key(&name) {
            bump += 1;
            name = format!("{prefix}{id}_{bump}");
        }
        self.push(name, kind)
    }

    /// Events written by the user.
    pub fn user_vars(&self) -> IndexSet {
        self.vars_where(|k| matches!(k, VarKind::User))
    }

    /// Events that projection removes: supplementaries and indicators.
    pub fn hidden_vars(&self) -> IndexSet {
        self.vars_where(|k| !matches!(k, VarKind::User))
    }

    fn vars_where(&self, pred: impl Fn(VarKind) -> bool) -> IndexSet {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| pred(e.kind))
            .map(|(i, _)| VarId::new(i as u32 + 1).expect("ids start at 1"))
            .collect()
    }
}
