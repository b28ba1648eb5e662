//! Quantities with optional unit suffixes, normalized to SI.

use crate::error::CliError;

/// What kind of physical quantity a value is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Length,
    Time,
    Diffusivity,
    Velocity,
    /// Molecules per area (free diffusion) or per length (drift).
    Concentration,
    Count,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConcentrationUnit {
    PerArea,
    PerLength,
}

/// How a suffix converts to SI: a decimal shift, or a plain factor.
#[derive(Debug, Clone, Copy)]
enum Scale {
    Pow10(i32),
    Factor(f64),
}

use Scale::{Factor, Pow10};

const LENGTH: &[(&str, Scale)] = &[
    ("um", Pow10(-6)),
    ("µm", Pow10(-6)),
    ("mm", Pow10(-3)),
    ("cm", Pow10(-2)),
    ("m", Pow10(0)),
];
const TIME: &[(&str, Scale)] = &[
    ("ms", Pow10(-3)),
    ("min", Factor(60.0)),
    ("s", Pow10(0)),
    ("h", Factor(3600.0)),
];
const DIFFUSIVITY: &[(&str, Scale)] = &[
    ("um2/s", Pow10(-12)),
    ("mm2/s", Pow10(-6)),
    ("cm2/s", Pow10(-4)),
    ("m2/s", Pow10(0)),
];
const VELOCITY: &[(&str, Scale)] = &[
    ("um/s", Pow10(-6)),
    ("mm/s", Pow10(-3)),
    ("cm/s", Pow10(-2)),
    ("m/s", Pow10(0)),
];
const PER_AREA: &[(&str, Scale)] = &[
    ("/um2", Pow10(12)),
    ("/mm2", Pow10(6)),
    ("/cm2", Pow10(4)),
    ("/m2", Pow10(0)),
];
const PER_LENGTH: &[(&str, Scale)] = &[
    ("/um", Pow10(6)),
    ("/mm", Pow10(3)),
    ("/cm", Pow10(2)),
    ("/m", Pow10(0)),
];

impl Scale {
    /// Decimal shifts go through the shortest decimal form, so `3mm` is
    /// exactly the double nearest 0.003 and `1e-5cm2/s` exactly `1e-9`.
    fn apply(self, value: f64) -> Option<f64> {
        match self {
            Factor(f) => Some(value * f),
            Pow10(k) => {
                let text = format!("{value:e}");
                let (mantissa, exp) = text.split_once('e')?;
                let exp: i32 = exp.parse().ok()?;
                bare(&format!("{mantissa}e{}", exp + k))
            }
        }
    }
}

fn table(dim: Dimension) -> Vec<&'static [(&'static str, Scale)]> {
    match dim {
        Dimension::Length => vec![LENGTH],
        Dimension::Time => vec![TIME],
        Dimension::Diffusivity => vec![DIFFUSIVITY],
        Dimension::Velocity => vec![VELOCITY],
        Dimension::Concentration => vec![PER_AREA, PER_LENGTH],
        Dimension::Count => vec![],
    }
}

/// A parsed value in SI units. For concentrations, `unit` records which
/// family the suffix belonged to (none for a bare number).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub unit: Option<ConcentrationUnit>,
}

fn bare(text: &str) -> Option<f64> {
    text.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Parses `text` such as `3mm`, `1e-5 cm2/s` or `0.01/mm2`. A bare number is
/// already SI.
pub fn parse_quantity(key: &str, text: &str, dim: Dimension) -> Result<Quantity, CliError> {
    let text = text.trim();
    let compact: String = text.split_whitespace().collect();
    let compact = compact.replace("^", "");
    if let Some(value) = bare(&compact) {
        return Ok(Quantity { value, unit: None });
    }
    for (family, units) in table(dim).into_iter().enumerate() {
        let mut sorted: Vec<&(&str, Scale)> = units.iter().collect();
        sorted.sort_by_key(|(suffix, _)| std::cmp::Reverse(suffix.len()));
        for (suffix, scale) in sorted {
            if let Some(number) = compact.strip_suffix(suffix) {
                if let Some(value) = bare(number).and_then(|v| scale.apply(v)) {
                    let unit = match (dim, family) {
                        (Dimension::Concentration, 0) => Some(ConcentrationUnit::PerArea),
                        (Dimension::Concentration, _) => Some(ConcentrationUnit::PerLength),
                        _ => None,
                    };
                    return Ok(Quantity { value, unit });
                }
            }
        }
    }
    Err(CliError::config(format!(
        "cannot read `{text}` as a value for `{key}`"
    )))
}
