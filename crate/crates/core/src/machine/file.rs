use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{BlockAction, BlockMachine, BlockPattern, MachinePair};
use crate::error::{HatError, Result};

/// On-disk block machine:
/// `{"block_size": 3, "overlap": 1, "table": {"WWB": 1, "WWW": "recurse", ...}, "symmetric": true}`
/// or `{"player1": {...}, "player2": {...}}` for an asymmetric pair.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineFile {
    pub block_size: usize,
    pub overlap: usize,
    pub table: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub symmetric: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairDoc {
    player1: MachineFile,
    player2: MachineFile,
}

impl MachineFile {
    pub fn from_machine(m: &BlockMachine) -> Self {
        let table = (0..1u8 << m.block_size())
            .map(|mask| {
                let pattern = BlockPattern::new(m.block_size(), mask).expect("in range");
                let v = match m.action(mask) {
                    BlockAction::Commit(t) => Value::from(t),
                    BlockAction::Recurse => Value::from("recurse"),
                };
                (pattern.to_string(), v)
            })
            .collect();
        MachineFile {
            block_size: m.block_size(),
            overlap: m.overlap(),
            table,
            symmetric: false,
        }
    }

    pub fn to_machine(&self) -> Result<BlockMachine> {
        let m = self.block_size;
        if !(1..=super::MAX_BLOCK_SIZE).contains(&m) {
            return Err(HatError::invalid(format!("unsupported block size {m}")));
        }
        let mut table: Vec<Option<BlockAction>> = vec![None; 1 << m];
        for (key, v) in &self.table {
            let pattern: BlockPattern = key.parse()?;
            if pattern.len() != m {
                return Err(HatError::invalid(format!(
                    "pattern {key:?} does not have length {m}"
                )));
            }
            let action = match v {
                Value::Number(n) => {
                    let t = n
                        .as_u64()
                        .filter(|&t| (1..=m as u64).contains(&t))
                        .ok_or_else(|| {
                            HatError::invalid(format!("bad commit index {n} for {key}"))
                        })?;
                    BlockAction::Commit(t as u8)
                }
                Value::String(s) if s.eq_ignore_ascii_case("recurse") => BlockAction::Recurse,
                other => {
                    return Err(HatError::invalid(format!("bad action {other} for {key}")));
                }
            };
            table[pattern.mask() as usize] = Some(action);
        }
        let table = table
            .into_iter()
            .enumerate()
            .map(|(mask, a)| {
                a.ok_or_else(|| {
                    let p = BlockPattern::new(m, mask as u8).expect("in range");
                    HatError::invalid(format!("table is missing pattern {p}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        BlockMachine::new(m, self.overlap, table)
    }

    pub fn parse(text: &str) -> Result<MachinePair> {
        let value: Value = serde_json::from_str(text)?;
        if value.get("player1").is_some() {
            let doc: PairDoc = serde_json::from_value(value)?;
            return MachinePair::new(doc.player1.to_machine()?, doc.player2.to_machine()?);
        }
        let single: MachineFile = serde_json::from_value(value)?;
        if !single.symmetric {
            return Err(HatError::invalid(
                "a single machine needs \"symmetric\": true; use player1/player2 otherwise",
            ));
        }
        Ok(MachinePair::symmetric(single.to_machine()?))
    }

    pub fn read(path: &Path) -> Result<MachinePair> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Pretty JSON; symmetric pairs are written as a single machine.
    pub fn render(mp: &MachinePair) -> String {
        let value = if mp.is_symmetric() {
            let mut f = Self::from_machine(mp.player1());
            f.symmetric = true;
            serde_json::to_value(f)
        } else {
            serde_json::to_value(BTreeMap::from([
                ("player1", Self::from_machine(mp.player1())),
                ("player2", Self::from_machine(mp.player2())),
            ]))
        }
        .expect("serializable");
        let mut s = serde_json::to_string_pretty(&value).expect("serializable");
        s.push('\n');
        s
    }
}
