//! TOML surface descriptions.
//!
//! ```toml
//! label = "H1"
//! template = "flute"
//!
//! [lengths]
//! rule = "harmonic"
//! scale = 1.0
//!
//! [twists]
//! rule = "table"
//! default = 0.0
//! entries = [["3", 0.5], ["4'", -1.0]]
//! ```
//!
//! `template = "custom"` takes `[[cells]]` with `id = "0"` and
//! `slots = ["glued:0", "glued:0", "boundary:1"]`; slots may also be `"cusp"`.

use std::str::FromStr;

use infsurf_core::surface::{
    build_template, Cell, CellId, CurveId, Rule, Slot, Surface, TemplateKind,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RuleDoc {
    Const { value: f64 },
    Harmonic { scale: f64 },
    Power { scale: f64, exponents: [f64; 3] },
    Table { default: f64, entries: Vec<(String, f64)> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellDoc {
    pub id: String,
    pub slots: [String; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceDoc {
    #[serde(default)]
    pub label: String,
    pub template: String,
    pub lengths: RuleDoc,
    pub twists: RuleDoc,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub offsets: Vec<(String, f64)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cells: Vec<CellDoc>,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::SurfaceFile(msg.into())
}

fn curve(s: &str) -> Result<CurveId> {
    CurveId::from_str(s).map_err(|_| bad(format!("bad curve id `{s}`")))
}

fn rule_from(doc: &RuleDoc) -> Result<Rule> {
    Ok(match doc {
        RuleDoc::Const { value } => Rule::Const(*value),
        RuleDoc::Harmonic { scale } => Rule::Harmonic { scale: *scale },
        RuleDoc::Power { scale, exponents } => Rule::Power { scale: *scale, exponents: *exponents },
        RuleDoc::Table { default, entries } => Rule::Table {
            default: *default,
            entries: entries.iter().map(|(k, v)| Ok((curve(k)?, *v))).collect::<Result<_>>()?,
        },
    })
}

fn rule_doc(rule: &Rule) -> RuleDoc {
    match rule {
        Rule::Const(v) => RuleDoc::Const { value: *v },
        Rule::Harmonic { scale } => RuleDoc::Harmonic { scale: *scale },
        Rule::Power { scale, exponents } => RuleDoc::Power { scale: *scale, exponents: *exponents },
        Rule::Table { default, entries } => RuleDoc::Table {
            default: *default,
            entries: entries.iter().map(|(c, v)| (c.to_string(), *v)).collect(),
        },
    }
}

fn slot_from(s: &str) -> Result<Slot> {
    match s.split_once(':') {
        Some(("glued", c)) => Ok(Slot::Glued(curve(c)?)),
        Some(("boundary", c)) => Ok(Slot::Boundary(curve(c)?)),
        None if s == "cusp" => Ok(Slot::Cusp),
        _ => Err(bad(format!("bad slot `{s}`"))),
    }
}

fn slot_doc(s: &Slot) -> String {
    match s {
        Slot::Glued(c) => format!("glued:{c}"),
        Slot::Boundary(c) => format!("boundary:{c}"),
        Slot::Cusp => "cusp".to_string(),
    }
}

impl SurfaceDoc {
    pub fn to_surface(&self) -> Result<Surface> {
        let kind = match self.template.as_str() {
            "flute" => TemplateKind::Flute,
            "ladder" => TemplateKind::Ladder,
            "tripod" => TemplateKind::Tripod,
            "four-holed-sphere" => TemplateKind::FourHoledSphere,
            "custom" => {
                let mut cells = Vec::with_capacity(self.cells.len());
                for c in &self.cells {
                    let id = curve(&c.id)?;
                    let slots = [slot_from(&c.slots[0])?, slot_from(&c.slots[1])?, slot_from(&c.slots[2])?];
                    cells.push(Cell { id: CellId { family: id.family, index: id.index }, slots });
                }
                TemplateKind::Custom(cells)
            }
            other => return Err(bad(format!("unknown template `{other}`"))),
        };
        if !matches!(kind, TemplateKind::Custom(_)) && !self.cells.is_empty() {
            return Err(bad("`cells` is only allowed with template = \"custom\""));
        }
        let mut s = build_template(kind, rule_from(&self.lengths)?, rule_from(&self.twists)?)?;
        s.label = self.label.clone();
        for (k, v) in &self.offsets {
            s.fn_data.offsets.insert(curve(k)?, *v);
        }
        Ok(s)
    }

    pub fn from_surface(s: &Surface) -> Self {
        let kind = s.graph.kind();
        let cells = match kind {
            TemplateKind::Custom(cells) => cells
                .iter()
                .map(|c| CellDoc {
                    id: CurveId::new(c.id.family, c.id.index).to_string(),
                    slots: [slot_doc(&c.slots[0]), slot_doc(&c.slots[1]), slot_doc(&c.slots[2])],
                })
                .collect(),
            _ => Vec::new(),
        };
        SurfaceDoc {
            label: s.label.clone(),
            template: kind.name().to_string(),
            lengths: rule_doc(&s.fn_data.lengths),
            twists: rule_doc(&s.fn_data.twists),
            offsets: s.fn_data.offsets.iter().map(|(c, v)| (c.to_string(), *v)).collect(),
            cells,
        }
    }
}

pub fn parse_surface(text: &str) -> Result<Surface> {
    let doc: SurfaceDoc = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
    doc.to_surface()
}

pub fn serialize_surface(s: &Surface) -> Result<String> {
    Ok(toml::to_string(&SurfaceDoc::from_surface(s))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use infsurf_core::surface::twist_deform;

    #[test]
    fn parses_documented_example() {
        let s = parse_surface(
            r#"
label = "H1"
template = "flute"

[lengths]
rule = "harmonic"
scale = 1.0

[twists]
rule = "table"
default = 0.0
entries = [["3", 0.5], ["4'", -1.0]]
"#,
        )
        .unwrap();
        assert_eq!(s.length(CurveId::c(4)).unwrap(), 0.25);
        assert_eq!(s.twist(CurveId::c(3)), 0.5);
        assert_eq!(s.label, "H1");
    }

    #[test]
    fn round_trip_templates() {
        let surfaces = [
            build_template(TemplateKind::Flute, Rule::Const(1.0), Rule::Const(0.0)).unwrap(),
            build_template(TemplateKind::Ladder, Rule::Harmonic { scale: 2.0 }, Rule::Const(0.3)).unwrap(),
            build_template(
                TemplateKind::Tripod,
                Rule::Power { scale: 1.0, exponents: [-1.0, 1.0, 2.0] },
                Rule::Const(0.0),
            )
            .unwrap(),
            twist_deform(
                &build_template(
                    TemplateKind::FourHoledSphere,
                    Rule::Table { default: 1.0, entries: vec![(CurveId::c(0), 0.7), (CurveId::c(3), 1.25)] },
                    Rule::Const(0.1),
                )
                .unwrap(),
                CurveId::c(0),
                0.123456789012345,
            )
            .unwrap(),
        ];
        for s in &surfaces {
            let text = serialize_surface(s).unwrap();
            assert_eq!(&parse_surface(&text).unwrap(), s, "{text}");
        }
    }

    #[test]
    fn round_trip_custom() {
        let text = r#"
template = "custom"
[lengths]
rule = "const"
value = 1.5
[twists]
rule = "const"
value = 0.0
[[cells]]
id = "0"
slots = ["glued:0", "glued:0", "boundary:1"]
"#;
        let s = parse_surface(text).unwrap();
        assert!(s.graph.is_finite());
        assert_eq!(parse_surface(&serialize_surface(&s).unwrap()).unwrap(), s);
    }

    #[test]
    fn rejects_bad_input() {
        let base = "[lengths]\nrule = \"const\"\nvalue = 1.0\n[twists]\nrule = \"const\"\nvalue = 0.0\n";
        let e = parse_surface(&format!("template = \"moebius\"\n{base}")).unwrap_err();
        assert_eq!(e.code(), "ElX03");
        let neg = "template = \"flute\"\n[lengths]\nrule = \"const\"\nvalue = -1.0\n[twists]\nrule = \"const\"\nvalue = 0.0\n";
        assert_eq!(parse_surface(neg).unwrap_err().code(), "El010");
        let unknown = format!("template = \"flute\"\ncolour = 3\n{base}");
        assert_eq!(parse_surface(&unknown).unwrap_err().code(), "ElX03");
    }
}
