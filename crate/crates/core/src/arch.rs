//! Multi-core platform model: equal-capacity cores with full intra-core
//! connectivity and a uniform, deterministic teleportation latency between
//! any pair of cores (shared EPR source, unlimited concurrency).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::circuit::GateTag;

pub const DEFAULT_TELEPORT_NS: u64 = 1000;
pub const DEFAULT_CYCLE_NS: u64 = 20;
pub const DEFAULT_SINGLE_QUBIT_NS: u64 = 20;
pub const DEFAULT_TWO_QUBIT_NS: u64 = 40;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ArchError {
    #[error("missing mandatory field '{0}'")]
    MissingField(&'static str),
    #[error("num_cores must be at least 1")]
    NoCores,
    #[error("capacity must be at least 2, got {0}")]
    CapacityTooSmall(usize),
    #[error("cycle_ns must be positive")]
    ZeroCycle,
    #[error("duration of {what} ({ns} ns) is not a positive multiple of cycle_ns = {cycle}")]
    Misaligned { what: String, ns: u64, cycle: u64 },
    #[error("unknown gate mnemonic '{0}' in durations")]
    UnknownGate(String),
    #[error("teleport duration is set through teleport_ns, not durations")]
    TeleswapDuration,
    #[error("physical qubit {id} out of range (platform has {total})")]
    OutOfRange { id: usize, total: usize },
    #[error("invalid architecture document: {0}")]
    Document(String),
}

/// Architecture description as read from JSON or the CLI shorthand.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArchConfig {
    pub num_cores: Option<usize>,
    pub capacity: Option<usize>,
    pub teleport_ns: Option<u64>,
    pub cycle_ns: Option<u64>,
    pub durations: Option<BTreeMap<String, u64>>,
}

impl ArchConfig {
    pub fn from_json(text: &str) -> Result<Self, ArchError> {
        serde_json::from_str(text).map_err(|e| ArchError::Document(e.to_string()))
    }

    /// Parses `cores=8,capacity=16[,teleport=1000][,cycle=20]`.
    pub fn from_shorthand(s: &str) -> Result<Self, ArchError> {
        let mut cfg = ArchConfig::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| ArchError::Document(format!("expected key=value, got '{part}'")))?;
            let num = |v: &str| {
                v.trim()
                    .parse::<u64>()
                    .map_err(|_| ArchError::Document(format!("'{k}' needs an integer, got '{v}'")))
            };
            match k.trim() {
                "cores" | "num_cores" => cfg.num_cores = Some(num(v)? as usize),
                "capacity" => cfg.capacity = Some(num(v)? as usize),
                "teleport" | "teleport_ns" => cfg.teleport_ns = Some(num(v)?),
                "cycle" | "cycle_ns" => cfg.cycle_ns = Some(num(v)?),
                other => {
                    return Err(ArchError::Document(format!("unknown key '{other}'")));
                }
            }
        }
        Ok(cfg)
    }

    pub fn new(num_cores: usize, capacity: usize) -> Self {
        ArchConfig {
            num_cores: Some(num_cores),
            capacity: Some(capacity),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Architecture {
    pub num_cores: usize,
    pub capacity: usize,
    pub teleport_ns: u64,
    pub cycle_ns: u64,
    pub durations: BTreeMap<GateTag, u64>,
}

/// A hardware site, identified by `id = core * capacity + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PhysicalQubit {
    pub id: usize,
    pub core: usize,
    pub offset: usize,
}

pub fn default_durations() -> BTreeMap<GateTag, u64> {
    let mut d = BTreeMap::new();
    for tag in GateTag::ALL {
        match tag {
            GateTag::Swap | GateTag::Teleswap => {}
            t if t.arity() == 1 => {
                d.insert(t, DEFAULT_SINGLE_QUBIT_NS);
            }
            t => {
                d.insert(t, DEFAULT_TWO_QUBIT_NS);
            }
        }
    }
    d
}

pub fn load_architecture(cfg: &ArchConfig) -> Result<Architecture, ArchError> {
    let num_cores = cfg.num_cores.ok_or(ArchError::MissingField("num_cores"))?;
    let capacity = cfg.capacity.ok_or(ArchError::MissingField("capacity"))?;
    if num_cores == 0 {
        return Err(ArchError::NoCores);
    }
    if capacity < 2 {
        return Err(ArchError::CapacityTooSmall(capacity));
    }
    let cycle_ns = cfg.cycle_ns.unwrap_or(DEFAULT_CYCLE_NS);
    if cycle_ns == 0 {
        return Err(ArchError::ZeroCycle);
    }
    let teleport_ns = cfg.teleport_ns.unwrap_or(DEFAULT_TELEPORT_NS);
    let mut durations = default_durations();
    if let Some(over) = &cfg.durations {
        for (name, &ns) in over {
            let tag = GateTag::from_mnemonic(&name.to_ascii_lowercase())
                .ok_or_else(|| ArchError::UnknownGate(name.clone()))?;
            if tag == GateTag::Teleswap {
                return Err(ArchError::TeleswapDuration);
            }
            durations.insert(tag, ns);
        }
    }
    let aligned = |ns: u64| ns > 0 && ns.is_multiple_of(cycle_ns);
    if !aligned(teleport_ns) {
        return Err(ArchError::Misaligned {
            what: "teleport".into(),
            ns: teleport_ns,
            cycle: cycle_ns,
        });
    }
    for (tag, &ns) in &durations {
        if !aligned(ns) {
            return Err(ArchError::Misaligned {
                what: tag.to_string(),
                ns,
                cycle: cycle_ns,
            });
        }
    }
    Ok(Architecture {
        num_cores,
        capacity,
        teleport_ns,
        cycle_ns,
        durations,
    })
}

impl Architecture {
    /// Platform with default timing.
    pub fn new(num_cores: usize, capacity: usize) -> Result<Self, ArchError> {
        load_architecture(&ArchConfig::new(num_cores, capacity))
    }

    pub fn total_qubits(&self) -> usize {
        self.num_cores * self.capacity
    }

    /// Duration of a gate; TELESWAP maps to `teleport_ns`. `None` when the
    /// table has no entry (SWAP unless configured).
    pub fn duration(&self, tag: GateTag) -> Option<u64> {
        if tag == GateTag::Teleswap {
            Some(self.teleport_ns)
        } else {
            self.durations.get(&tag).copied()
        }
    }

    pub fn core_of(&self, phys: usize) -> Result<usize, ArchError> {
        self.physical_qubit(phys).map(|p| p.core)
    }

    pub fn physical_qubit(&self, id: usize) -> Result<PhysicalQubit, ArchError> {
        if id >= self.total_qubits() {
            return Err(ArchError::OutOfRange {
                id,
                total: self.total_qubits(),
            });
        }
        Ok(PhysicalQubit {
            id,
            core: id / self.capacity,
            offset: id % self.capacity,
        })
    }

    pub fn physical_at(&self, core: usize, offset: usize) -> Option<PhysicalQubit> {
        (core < self.num_cores && offset < self.capacity).then(|| PhysicalQubit {
            id: core * self.capacity + offset,
            core,
            offset,
        })
    }

    pub fn to_config(&self) -> ArchConfig {
        ArchConfig {
            num_cores: Some(self.num_cores),
            capacity: Some(self.capacity),
            teleport_ns: Some(self.teleport_ns),
            cycle_ns: Some(self.cycle_ns),
            durations: Some(
                self.durations
                    .iter()
                    .map(|(t, &ns)| (t.mnemonic().to_string(), ns))
                    .collect(),
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eight_by_sixteen_defaults() {
        let a = load_architecture(&ArchConfig::new(8, 16)).unwrap();
        assert_eq!(a.total_qubits(), 128);
        assert_eq!(a.teleport_ns, 1000);
        assert_eq!(a.cycle_ns, 20);
        assert_eq!(a.duration(GateTag::H), Some(20));
        assert_eq!(a.duration(GateTag::Cphase), Some(40));
        assert_eq!(a.duration(GateTag::Teleswap), Some(1000));
        assert_eq!(a.duration(GateTag::Swap), None);
    }

    #[test]
    fn single_core_and_tiny_capacity() {
        assert_eq!(Architecture::new(1, 16).unwrap().total_qubits(), 16);
        assert_eq!(Architecture::new(8, 1), Err(ArchError::CapacityTooSmall(1)));
        assert_eq!(Architecture::new(0, 4), Err(ArchError::NoCores));
    }

    #[test]
    fn missing_fields() {
        let cfg = ArchConfig::from_json(r#"{"capacity": 4}"#).unwrap();
        assert_eq!(
            load_architecture(&cfg),
            Err(ArchError::MissingField("num_cores"))
        );
        let cfg = ArchConfig::from_json(r#"{"num_cores": 4}"#).unwrap();
        assert_eq!(
            load_architecture(&cfg),
            Err(ArchError::MissingField("capacity"))
        );
        assert!(ArchConfig::from_json(r#"{"num_cores": 4, "bogus": 1}"#).is_err());
    }

    #[test]
    fn duration_alignment() {
        let cfg =
            ArchConfig::from_json(r#"{"num_cores": 2, "capacity": 4, "durations": {"swap": 250}}"#)
                .unwrap();
        assert!(matches!(
            load_architecture(&cfg),
            Err(ArchError::Misaligned { .. })
        ));
        // A 10 ns cycle admits the 250 ns SWAP, keeping the 4x teleport ratio.
        let cfg = ArchConfig::from_json(
            r#"{"num_cores": 2, "capacity": 4, "cycle_ns": 10, "durations": {"swap": 250}}"#,
        )
        .unwrap();
        let a = load_architecture(&cfg).unwrap();
        assert_eq!(a.duration(GateTag::Swap), Some(250));
        assert_eq!(a.teleport_ns, 4 * 250);

        let cfg = ArchConfig {
            teleport_ns: Some(1010),
            ..ArchConfig::new(2, 4)
        };
        assert!(load_architecture(&cfg).is_err());
        let cfg = ArchConfig::from_json(
            r#"{"num_cores": 2, "capacity": 4, "durations": {"teleswap": 1000}}"#,
        )
        .unwrap();
        assert_eq!(load_architecture(&cfg), Err(ArchError::TeleswapDuration));
    }

    #[test]
    fn shorthand() {
        let cfg = ArchConfig::from_shorthand("cores=8,capacity=16").unwrap();
        assert_eq!(cfg, ArchConfig::new(8, 16));
        let cfg =
            ArchConfig::from_shorthand("cores=2, capacity=4, teleport=2000, cycle=10").unwrap();
        let a = load_architecture(&cfg).unwrap();
        assert_eq!((a.teleport_ns, a.cycle_ns), (2000, 10));
        assert!(ArchConfig::from_shorthand("cores=x").is_err());
        assert!(ArchConfig::from_shorthand("colors=3").is_err());
    }

    #[test]
    fn core_of_examples() {
        let a = Architecture::new(8, 16).unwrap();
        assert_eq!(a.core_of(0).unwrap(), 0);
        assert_eq!(a.core_of(17).unwrap(), 1);
        assert_eq!(a.core_of(127).unwrap(), 7);
        assert!(a.core_of(128).is_err());
    }

    #[test]
    fn core_offset_bijection() {
        let a = Architecture::new(5, 3).unwrap();
        for core in 0..5 {
            for offset in 0..3 {
                let p = a.physical_at(core, offset).unwrap();
                assert_eq!(a.core_of(p.id).unwrap(), core);
                assert_eq!(a.physical_qubit(p.id).unwrap(), p);
            }
        }
        assert!(a.physical_at(5, 0).is_none());
    }

    #[test]
    fn config_round_trip() {
        let a = Architecture::new(3, 4).unwrap();
        assert_eq!(load_architecture(&a.to_config()).unwrap(), a);
    }
}
