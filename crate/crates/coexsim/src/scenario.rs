//! Channel-grid scenarios: slot layout, quantum-channel placement, classical
//! loading, and guardbands.
//!
//! Slots are numbered 1..=n_slots from the low-frequency end of the band.
//! All operations return new values; plans are cheap to clone and never
//! mutated in place, so sweep code can derive many variants from one base.

use thiserror::Error;

/// Errors produced while building or editing a channel plan.
#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    /// Grid must hold at least two slots so a quantum and a classical
    /// channel can coexist.
    #[error("grid needs at least 2 slots, got {0}")]
    GridTooSmall(usize),
    /// Slot spacing and band start must be positive frequencies.
    #[error("{name} must be positive, got {value}")]
    NonPositiveFrequency { name: &'static str, value: f64 },
    /// Slot index outside 1..=n_slots.
    #[error("slot {slot} outside grid 1..={n_slots}")]
    SlotOutOfRange { slot: usize, n_slots: usize },
    /// Operation requires the quantum slot to be assigned first.
    #[error("quantum slot not assigned")]
    QuantumSlotUnset,
    /// Launch power must be non-negative and finite.
    #[error("launch power must be finite and >= 0, got {0}")]
    InvalidPower(f64),
    /// Excess kurtosis below -2 is not realizable by any field statistics.
    #[error("excess kurtosis must be >= -2, got {0}")]
    InvalidKurtosis(f64),
    /// Modulation format label not in the built-in table.
    #[error("unknown modulation format {0:?}")]
    UnknownFormat(String),
}

/// Direction of classical propagation relative to the quantum channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Classical and quantum signals travel the same way.
    Co,
    /// Classical signals travel against the quantum channel.
    Counter,
}

impl Direction {
    /// Short label used in CSV output and CLI flags.
    pub fn label(self) -> &'static str {
        match self {
            Direction::Co => "co",
            Direction::Counter => "counter",
        }
    }
}

impl std::str::FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "co" | "forward" | "co-propagating" => Ok(Direction::Co),
            "counter" | "backward" | "counter-propagating" => Ok(Direction::Counter),
            other => Err(format!("unknown direction {other:?}, expected co|counter")),
        }
    }
}

/// Where the quantum channel sits on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    /// Highest-frequency slot; guardband clearing can only eat one side.
    BandEdge,
    /// Middle slot; guardband clearing eats both sides.
    BandCenter,
    /// Explicit slot index.
    Custom(usize),
}

impl Placement {
    /// Resolve the placement to a concrete slot index on an n-slot grid.
    pub fn slot(self, n_slots: usize) -> usize {
        match self {
            Placement::BandEdge => n_slots,
            Placement::BandCenter => n_slots / 2,
            Placement::Custom(slot) => slot,
        }
    }
}

/// One classical DWDM channel occupying a grid slot.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalChannel {
    /// Grid slot, 1-based.
    pub slot: usize,
    /// Launch power in watts.
    pub power_w: f64,
    /// Excess kurtosis of the modulated field; 0 for Gaussian-like
    /// statistics, -2/M for M-point constant-amplitude constellations.
    pub kurtosis: f64,
    /// Human-readable modulation label, carried through to output.
    pub format: String,
}

/// Excess kurtosis for common modulation formats.
///
/// PSK constellations and QAM in the large-dispersion regime behave as
/// Gaussian noise (kurtosis 0); constant-amplitude M-PSK without dispersion
/// would give -2/M, listed here for completeness.
pub fn format_kurtosis(label: &str) -> Result<f64, ScenarioError> {
    match label.to_ascii_lowercase().as_str() {
        "gaussian" | "qam" | "16qam" | "64qam" | "dispersed" => Ok(0.0),
        "qpsk" => Ok(-0.5),
        "8psk" => Ok(-0.25),
        "16psk" => Ok(-0.125),
        "cw" => Ok(-2.0),
        other => Err(ScenarioError::UnknownFormat(other.to_string())),
    }
}

/// A DWDM grid with one quantum slot, classical channels, and a guardband.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelPlan {
    /// Number of grid slots.
    pub n_slots: usize,
    /// Slot spacing in Hz.
    pub spacing_hz: f64,
    /// Center frequency of slot 1 in Hz.
    pub band_start_hz: f64,
    /// Slot carrying the quantum channel, if assigned.
    pub quantum_slot: Option<usize>,
    /// Classical channels, kept sorted by slot.
    pub classical: Vec<ClassicalChannel>,
    /// Guardband half-width in slots on each side of the quantum slot.
    pub guardband: usize,
    /// Placement policy the quantum slot was derived from.
    pub placement: Placement,
}

impl ChannelPlan {
    /// Build an empty grid: no quantum slot, no classical channels.
    pub fn build_grid(
        n_slots: usize,
        spacing_hz: f64,
        band_start_hz: f64,
    ) -> Result<Self, ScenarioError> {
        if n_slots < 2 {
            return Err(ScenarioError::GridTooSmall(n_slots));
        }
        if !(spacing_hz > 0.0) {
            return Err(ScenarioError::NonPositiveFrequency {
                name: "spacing_hz",
                value: spacing_hz,
            });
        }
        if !(band_start_hz > 0.0) {
            return Err(ScenarioError::NonPositiveFrequency {
                name: "band_start_hz",
                value: band_start_hz,
            });
        }
        Ok(ChannelPlan {
            n_slots,
            spacing_hz,
            band_start_hz,
            quantum_slot: None,
            classical: Vec::new(),
            guardband: 0,
            placement: Placement::BandEdge,
        })
    }

    /// Center frequency of a slot in Hz. Slots are 1-based.
    pub fn slot_frequency(&self, slot: usize) -> Result<f64, ScenarioError> {
        self.check_slot(slot)?;
        Ok(self.band_start_hz + (slot - 1) as f64 * self.spacing_hz)
    }

    /// Frequency of the quantum slot, if assigned.
    pub fn quantum_frequency(&self) -> Result<f64, ScenarioError> {
        let slot = self.quantum_slot.ok_or(ScenarioError::QuantumSlotUnset)?;
        self.slot_frequency(slot)
    }

    /// Assign the quantum channel according to a placement policy.
    pub fn place_quantum(self, placement: Placement) -> Result<Self, ScenarioError> {
        let slot = placement.slot(self.n_slots);
        self.check_slot(slot)?;
        let mut plan = self;
        plan.quantum_slot = Some(slot);
        plan.placement = placement;
        // A slot cannot carry both signals; evict any classical occupant.
        plan.classical.retain(|c| c.slot != slot);
        Ok(plan)
    }

    /// Fill every slot that is neither the quantum slot nor inside the
    /// guardband with one classical channel at uniform power.
    pub fn load_uniform(
        self,
        power_w: f64,
        kurtosis: f64,
        format: &str,
    ) -> Result<Self, ScenarioError> {
        let quantum = self.quantum_slot.ok_or(ScenarioError::QuantumSlotUnset)?;
        if !power_w.is_finite() || power_w < 0.0 {
            return Err(ScenarioError::InvalidPower(power_w));
        }
        if !kurtosis.is_finite() || kurtosis < -2.0 {
            return Err(ScenarioError::InvalidKurtosis(kurtosis));
        }
        let mut plan = self;
        plan.classical = (1..=plan.n_slots)
            .filter(|&slot| slot != quantum && !plan.in_guardband(slot, quantum))
            .map(|slot| ClassicalChannel {
                slot,
                power_w,
                kurtosis,
                format: format.to_string(),
            })
            .collect();
        Ok(plan)
    }

    /// Clear `n_gb` slots on each side of the quantum channel.
    ///
    /// Ranges falling off the grid are clipped, not an error, so a band-edge
    /// quantum slot only loses channels on one side. Idempotent: reapplying
    /// the same width changes nothing.
    pub fn apply_guardband(self, n_gb: usize) -> Result<Self, ScenarioError> {
        let quantum = self.quantum_slot.ok_or(ScenarioError::QuantumSlotUnset)?;
        let mut plan = self;
        plan.guardband = n_gb;
        plan.classical
            .retain(|c| !Self::slot_in_guardband(c.slot, quantum, n_gb));
        Ok(plan)
    }

    /// Fraction of grid slots sacrificed to the guardband, in percent.
    ///
    /// Counts slots actually cleared after clipping at the band edges, so an
    /// edge placement costs roughly half as much as a center placement.
    pub fn capacity_loss_percent(&self) -> Result<f64, ScenarioError> {
        let quantum = self.quantum_slot.ok_or(ScenarioError::QuantumSlotUnset)?;
        let below = (quantum - 1).min(self.guardband);
        let above = (self.n_slots - quantum).min(self.guardband);
        Ok((below + above) as f64 / self.n_slots as f64 * 100.0)
    }

    /// Total classical launch power in watts.
    pub fn total_classical_power(&self) -> f64 {
        self.classical.iter().map(|c| c.power_w).sum()
    }

    /// Classical channel occupying a slot, if any.
    pub fn channel_at(&self, slot: usize) -> Option<&ClassicalChannel> {
        self.classical.iter().find(|c| c.slot == slot)
    }

    fn in_guardband(&self, slot: usize, quantum: usize) -> bool {
        Self::slot_in_guardband(slot, quantum, self.guardband)
    }

    fn slot_in_guardband(slot: usize, quantum: usize, n_gb: usize) -> bool {
        slot != quantum && slot.abs_diff(quantum) <= n_gb
    }

    fn check_slot(&self, slot: usize) -> Result<(), ScenarioError> {
        if slot < 1 || slot > self.n_slots {
            return Err(ScenarioError::SlotOutOfRange {
                slot,
                n_slots: self.n_slots,
            });
        }
        Ok(())
    }
}
