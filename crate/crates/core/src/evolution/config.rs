use serde::{Deserialize, Serialize};

use crate::primitives::PrimitiveCatalog;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Spectral data: all tunable terminals, 30 registers, 20-register head.
    Fish,
    /// Tabular data: LR plus raw inputs, 8 registers, 4-register head.
    Srbench,
    /// Explicit primitive lists.
    Custom,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fish" => Ok(Mode::Fish),
            "srbench" => Ok(Mode::Srbench),
            "custom" => Ok(Mode::Custom),
            other => Err(format!("unknown mode `{other}` (fish | srbench | custom)")),
        }
    }
}

/// Probabilities of the four variation operators; must sum to 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorRates {
    pub macro_mutation: f64,
    pub micro_mutation: f64,
    pub crossover: f64,
    pub swap: f64,
}

impl Default for OperatorRates {
    fn default() -> Self {
        Self {
            macro_mutation: 0.3,
            micro_mutation: 0.3,
            crossover: 0.3,
            swap: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub mode: Mode,
    pub population_size: usize,
    pub generations: usize,
    pub max_program_size: usize,
    pub register_count: usize,
    /// Whether programs end in the linear head; without it `R0` is the output.
    pub mvlr: bool,
    /// Registers `0..mvlr_inputs` feed the head.
    pub mvlr_inputs: usize,
    pub operator_rates: OperatorRates,
    pub tournament_size: usize,
    pub elitism: usize,
    pub gd_steps: usize,
    pub gd_step_size: f64,
    /// Largest terminal range as a fraction of the feature count.
    pub cap_fraction: f64,
    /// Initial program lengths are uniform in `1..=init_max_length`.
    pub init_max_length: usize,
    pub crossover_max_segment: usize,
    /// Probability that a fresh operand reads the input rather than a register.
    pub input_rate: f64,
    pub primitives: PrimitiveCatalog,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid `{key}`: {reason}")]
pub struct ConfigError {
    pub key: &'static str,
    pub reason: String,
}

fn invalid(key: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError {
        key,
        reason: reason.into(),
    }
}

impl EvolutionConfig {
    pub fn fish() -> Self {
        Self {
            mode: Mode::Fish,
            population_size: 250,
            generations: 100,
            max_program_size: 50,
            register_count: 30,
            mvlr: true,
            mvlr_inputs: 20,
            operator_rates: OperatorRates::default(),
            tournament_size: 7,
            elitism: 1,
            gd_steps: crate::numeric::DEFAULT_GD_STEPS,
            gd_step_size: crate::numeric::DEFAULT_STEP_SIZE,
            cap_fraction: 0.5,
            init_max_length: 10,
            crossover_max_segment: 10,
            input_rate: 0.5,
            primitives: PrimitiveCatalog::fish(),
            seed: 0,
        }
    }

    pub fn srbench() -> Self {
        Self {
            mode: Mode::Srbench,
            population_size: 500,
            generations: 200,
            register_count: 8,
            mvlr_inputs: 4,
            cap_fraction: 0.1,
            primitives: PrimitiveCatalog::srbench(),
            ..Self::fish()
        }
    }

    pub fn for_mode(mode: Mode) -> Self {
        match mode {
            Mode::Fish => Self::fish(),
            Mode::Srbench => Self::srbench(),
            Mode::Custom => Self {
                mode: Mode::Custom,
                ..Self::fish()
            },
        }
    }

    /// Plain LGP over raw inputs with no tunable primitives and no head,
    /// otherwise shaped like `self`.
    pub fn without_tunables(&self) -> Self {
        Self {
            mode: Mode::Custom,
            mvlr: false,
            primitives: PrimitiveCatalog {
                basic: self.primitives.basic.clone(),
                terminals: Vec::new(),
                functions: Vec::new(),
                raw_inputs: true,
            },
            ..self.clone()
        }
    }

    /// Widest terminal range allowed for `features` input columns.
    pub fn max_terminal_width(&self, features: usize) -> usize {
        ((self.cap_fraction * features as f64).ceil() as usize).clamp(1, features.max(1))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.population_size == 0 {
            return Err(invalid("population_size", "must be at least 1"));
        }
        if self.max_program_size == 0 {
            return Err(invalid("max_program_size", "must be at least 1"));
        }
        if self.register_count == 0 {
            return Err(invalid("register_count", "must be at least 1"));
        }
        if self.mvlr && (self.mvlr_inputs == 0 || self.mvlr_inputs > self.register_count) {
            return Err(invalid(
                "mvlr_inputs",
                format!("must be in 1..={}", self.register_count),
            ));
        }
        if self.tournament_size == 0 {
            return Err(invalid("tournament_size", "must be at least 1"));
        }
        if self.elitism > self.population_size {
            return Err(invalid("elitism", "exceeds population_size"));
        }
        if self.init_max_length == 0 {
            return Err(invalid("init_max_length", "must be at least 1"));
        }
        if self.crossover_max_segment == 0 {
            return Err(invalid("crossover_max_segment", "must be at least 1"));
        }
        if !(self.cap_fraction > 0.0 && self.cap_fraction <= 1.0) {
            return Err(invalid("cap_fraction", "must be in (0, 1]"));
        }
        if !(self.gd_step_size > 0.0 && self.gd_step_size.is_finite()) {
            return Err(invalid("gd_step_size", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.input_rate) {
            return Err(invalid("input_rate", "must be in [0, 1]"));
        }
        let r = &self.operator_rates;
        let rates = [r.macro_mutation, r.micro_mutation, r.crossover, r.swap];
        if rates.iter().any(|p| p.is_nan() || *p < 0.0)
            || (rates.iter().sum::<f64>() - 1.0).abs() > 1e-9
        {
            return Err(invalid(
                "operator_rates",
                "must be non-negative and sum to 1",
            ));
        }
        if self.primitives.function_count() == 0 {
            return Err(invalid("primitives", "no functions enabled"));
        }
        if !self.primitives.has_inputs() {
            return Err(invalid(
                "primitives",
                "no input source: enable raw_inputs or a terminal kind",
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        let f = EvolutionConfig::fish();
        assert_eq!(
            (
                f.population_size,
                f.generations,
                f.max_program_size,
                f.register_count,
                f.mvlr_inputs
            ),
            (250, 100, 50, 30, 20)
        );
        assert_eq!(f.cap_fraction, 0.5);
        assert_eq!(f.primitives.terminals.len(), 10);
        assert!(!f.primitives.raw_inputs);
        f.validate().unwrap();

        let s = EvolutionConfig::srbench();
        assert_eq!(
            (
                s.population_size,
                s.generations,
                s.max_program_size,
                s.register_count,
                s.mvlr_inputs
            ),
            (500, 200, 50, 8, 4)
        );
        assert_eq!(s.cap_fraction, 0.1);
        assert_eq!(
            s.primitives.terminals,
            vec![crate::primitives::TerminalKind::Lr]
        );
        assert!(s.primitives.raw_inputs);
        s.validate().unwrap();

        EvolutionConfig::fish()
            .without_tunables()
            .validate()
            .unwrap();
    }

    #[test]
    fn terminal_width_cap() {
        let f = EvolutionConfig::fish();
        assert_eq!(f.max_terminal_width(427), 214);
        assert_eq!(EvolutionConfig::srbench().max_terminal_width(13), 2);
        assert_eq!(EvolutionConfig::srbench().max_terminal_width(1), 1);
    }

    #[test]
    fn validation_names_the_key() {
        let mut c = EvolutionConfig::fish();
        c.operator_rates.swap = 0.5;
        assert_eq!(c.validate().unwrap_err().key, "operator_rates");
        let mut c = EvolutionConfig::fish();
        c.mvlr_inputs = 31;
        assert_eq!(c.validate().unwrap_err().key, "mvlr_inputs");
        let mut c = EvolutionConfig::fish();
        c.primitives.terminals.clear();
        assert_eq!(c.validate().unwrap_err().key, "primitives");
    }
}
