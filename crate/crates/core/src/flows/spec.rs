//! JSON flow specifications selecting and transforming catalog entries.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flows::{by_name, AncientFlow, ParabolicMap};
use crate::vector::AmbientVec;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Recenter {
    pub x0: AmbientVec,
    pub t0: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlowParameters {
    /// Intrinsic dimension; only checked against the entry (planes pick by it).
    pub n: Option<usize>,
    /// Ambient dimension; selects R^N for planes.
    #[serde(rename = "N")]
    pub ambient: Option<usize>,
    /// Distance of a plane from the origin.
    pub offset: Option<f64>,
    /// Parabolic rescaling factor `r`.
    pub rescale: Option<f64>,
    pub recenter: Option<Recenter>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSpec {
    pub name: String,
    #[serde(default)]
    pub parameters: FlowParameters,
}

impl FlowSpec {
    pub fn named(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            parameters: FlowParameters::default(),
        }
    }

    pub fn build(&self) -> Result<AncientFlow> {
        let p = &self.parameters;
        let is_plane = matches!(self.name.as_str(), "plane" | "plane2" | "shifted_plane");
        if !is_plane && (p.offset.is_some() || p.ambient.is_some()) {
            return Err(Error::InvalidArgument(format!(
                "`offset` and `N` apply to planes only, not {}",
                self.name
            )));
        }
        let mut flow = if is_plane {
            let n = p.n.unwrap_or(if self.name == "plane2" { 2 } else { 1 });
            let default_offset = if self.name == "shifted_plane" {
                super::catalog::SHIFTED_PLANE_OFFSET
            } else {
                0.0
            };
            let offset = p.offset.unwrap_or(default_offset);
            match n {
                1 => super::catalog::line(p.ambient.unwrap_or(2), offset)?,
                2 => {
                    if p.ambient.unwrap_or(3) != 3 {
                        return Err(Error::InvalidArgument("2-planes are supported in R^3 only".into()));
                    }
                    super::catalog::plane2(offset)
                }
                _ => return Err(Error::InvalidArgument(format!("planes of dimension {n} are not supported"))),
            }
        } else {
            let flow = by_name(&self.name)?;
            if let Some(n) = p.n {
                if n != flow.n {
                    return Err(Error::InvalidArgument(format!(
                        "{} has intrinsic dimension {}, spec asks for {n}",
                        self.name, flow.n
                    )));
                }
            }
            flow
        };
        if let Some(r) = p.rescale {
            flow = flow.parabolic_rescale(r)?;
        }
        if let Some(c) = p.recenter {
            if !c.t0.is_finite() || !c.x0.is_finite() {
                return Err(Error::InvalidArgument("recenter must be finite".into()));
            }
            flow = flow.transformed(&ParabolicMap {
                scale: 1.0,
                shift_x: c.x0,
                shift_t: c.t0,
            });
        }
        Ok(flow)
    }
}
