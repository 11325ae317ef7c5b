//! Text specifications shared by the command line and foreign callers.

use crate::error::{Result, SernError};
use crate::geometry::{Polygon, Region};
use crate::model::{Deterrence, ModelParams};

/// `rect:W,H`, `ellipse:A,B` or `polygon:PATH`.
pub fn parse_region(spec: &str) -> Result<Region> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| SernError::param(format!("region '{spec}' must look like kind:args")))?;
    let pair = |s: &str| -> Result<(f64, f64)> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| SernError::param(format!("expected two comma-separated numbers, got '{s}'")))?;
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| SernError::param(format!("'{t}' is not a number")))
        };
        Ok((num(a)?, num(b)?))
    };
    match kind.to_ascii_lowercase().as_str() {
        "rect" | "rectangle" => {
            let (w, h) = pair(rest)?;
            Region::rectangle(w, h)
        }
        "ellipse" => {
            let (a, b) = pair(rest)?;
            Region::ellipse(a, b)
        }
        "polygon" => Ok(Region::Polygon(Polygon::from_path(rest)?)),
        other => Err(SernError::param(format!(
            "unknown region kind '{other}', expected rect, ellipse or polygon"
        ))),
    }
}

/// Named deterrence model with its parameters.
pub fn parse_model(name: &str, params: &ModelParams) -> Result<Deterrence> {
    let d = Deterrence::from_name(name, params)?;
    d.validate()?;
    Ok(d)
}
