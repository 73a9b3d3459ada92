//! Scenarios compiled into the binary.

use crate::error::{invalid, CliResult};
use crate::output::{Table, Value};
use crate::scenario::{PeriodValue, RawScenario, WaveguideKind};

macro_rules! bundle {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../scenarios/", $name, ".toml")))),*]
    };
}

pub static SCENARIOS: &[(&str, &str)] = bundle!(
    "fig2a",
    "fig2b",
    "fig2c",
    "fig2d",
    "fig3a",
    "fig3b",
    "fig3c",
    "fig3d",
    "fig4a",
    "fig4b",
    "fig4c",
    "fig4d",
    "fig5a",
    "fig5b",
    "fig5c",
    "fig5d",
    "fig5e",
    "fig5f",
    "fig6a",
    "fig6b",
    "fig6a-le",
    "fig6b-le",
    "fig6vis-a",
    "fig6vis-b",
    "fig6vis-c",
    "fig7a",
);

pub fn names() -> impl Iterator<Item = &'static str> {
    SCENARIOS.iter().map(|(n, _)| *n)
}

pub fn source(name: &str) -> Option<&'static str> {
    SCENARIOS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Text(String::new()), |v| Value::Text(v.to_string()))
}

/// One row per bundled scenario with its headline parameters.
pub fn list_table() -> CliResult<Table> {
    let mut t = Table::new(
        "scenarios",
        &[
            "name",
            "task",
            "interaction",
            "waveguide",
            "h_um",
            "a_um",
            "lambda_p_um",
            "period0_um",
            "period_l_um",
            "L_um",
            "description",
        ],
    );
    for (name, text) in SCENARIOS {
        let raw: RawScenario = toml::from_str(text).map_err(|e| invalid(format!("bundled scenario {name}: {e}")))?;
        let kind = match raw.waveguide.kind {
            WaveguideKind::Planar => "planar",
            WaveguideKind::Fiber => "fiber",
        };
        let (period0, period_l, length) = match &raw.poling {
            Some(p) => (
                match &p.period0_um {
                    PeriodValue::Value(v) => Value::Text(v.to_string()),
                    PeriodValue::Keyword(k) => Value::Text(k.clone()),
                },
                opt(p.period_l_um),
                Value::Text(p.l_um.to_string()),
            ),
            None => (Value::Text(String::new()), Value::Text(String::new()), Value::Text(String::new())),
        };
        t.push(vec![
            (*name).into(),
            raw.task.label().into(),
            raw.interaction.label().into(),
            kind.into(),
            opt(raw.waveguide.h_um),
            opt(raw.waveguide.a_um),
            Value::Text(raw.pump.lambda_um.to_string()),
            period0,
            period_l,
            length,
            raw.description.clone().into(),
        ]);
    }
    Ok(t)
}
