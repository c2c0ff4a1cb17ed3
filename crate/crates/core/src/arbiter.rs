//! Priority multiplexing of the planner and wearer command streams.
//!
//! `A(t) = 1` iff the freshest wearer command has magnitude strictly above
//! the deadband `ε`; the executed command is then exactly that command,
//! otherwise exactly the planner's. There is never any blending.

use std::sync::{Arc, Mutex};

use crate::planner::{CommandSource, VelocityCommand};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArbiterConfig {
    /// Deadband on the wearer command magnitude.
    pub epsilon: f64,
    pub staleness_timeout: f64,
    pub tick_rate: f64,
    /// Length scale turning yaw rate into a speed for the magnitude test.
    pub l_char: f64,
}

impl Default for ArbiterConfig {
    fn default() -> Self {
        Self { epsilon: 0.01, staleness_timeout: 0.5, tick_rate: 20.0, l_char: 0.5 }
    }
}

/// Which stream the executed command came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Selection {
    Apf,
    Human,
    /// Neither stream was usable; fail safe to a standstill.
    Stop,
}

impl Selection {
    pub fn as_str(self) -> &'static str {
        match self {
            Selection::Apf => "apf",
            Selection::Human => "human",
            Selection::Stop => "stop",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArbitrationDecision {
    /// Value of `A(t)`.
    pub a: bool,
    pub selected: VelocityCommand,
    pub selection: Selection,
    pub stamp: f64,
}

/// Selects between two fresh commands.
pub fn arbitrate(v_apf: &VelocityCommand, v_human: &VelocityCommand, cfg: &ArbiterConfig) -> ArbitrationDecision {
    let a = v_human.magnitude(cfg.l_char) > cfg.epsilon;
    let (selected, selection) = if a { (*v_human, Selection::Human) } else { (*v_apf, Selection::Apf) };
    ArbitrationDecision { a, selected, selection, stamp: v_human.stamp.max(v_apf.stamp) }
}

/// Keep-last-one slot per branch.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LatestCommands {
    pub apf: Option<VelocityCommand>,
    pub human: Option<VelocityCommand>,
}

impl LatestCommands {
    pub fn publish(&mut self, cmd: VelocityCommand) {
        let slot = match cmd.source {
            CommandSource::Apf => &mut self.apf,
            CommandSource::Human => &mut self.human,
        };
        // Out-of-order deliveries never overwrite a newer intent.
        if slot.is_none_or(|old| old.stamp <= cmd.stamp) {
            *slot = Some(cmd);
        }
    }
}

fn fresh(cmd: Option<VelocityCommand>, now: f64, timeout: f64) -> Option<VelocityCommand> {
    cmd.filter(|c| now - c.stamp <= timeout)
}

/// One arbiter tick over the latest commands of each branch.
pub fn tick(latest: &LatestCommands, now: f64, cfg: &ArbiterConfig) -> ArbitrationDecision {
    let apf = fresh(latest.apf, now, cfg.staleness_timeout);
    let human = fresh(latest.human, now, cfg.staleness_timeout);
    let stop = VelocityCommand::zero(CommandSource::Apf, now);
    match (apf, human) {
        (Some(a), Some(h)) => ArbitrationDecision { stamp: now, ..arbitrate(&a, &h, cfg) },
        (None, Some(h)) if h.magnitude(cfg.l_char) > cfg.epsilon => {
            ArbitrationDecision { a: true, selected: h, selection: Selection::Human, stamp: now }
        }
        (Some(a), None) => ArbitrationDecision { a: false, selected: a, selection: Selection::Apf, stamp: now },
        _ => ArbitrationDecision { a: false, selected: stop, selection: Selection::Stop, stamp: now },
    }
}

/// Many-producer, single-consumer latest-value channel.
#[derive(Debug, Clone, Default)]
pub struct CommandChannel {
    inner: Arc<Mutex<LatestCommands>>,
}

impl CommandChannel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn publish(&self, cmd: VelocityCommand) {
        self.inner.lock().expect("command channel poisoned").publish(cmd);
    }

    pub fn snapshot(&self) -> LatestCommands {
        *self.inner.lock().expect("command channel poisoned")
    }

    pub fn tick(&self, now: f64, cfg: &ArbiterConfig) -> ArbitrationDecision {
        tick(&self.snapshot(), now, cfg)
    }
}
