use crate::error::{Error, Result};
use crate::flows::{angenent, bowl, cylinder, grim_reaper, plane, sphere, AncientFlow};

pub const CATALOG_NAMES: &[&str] = &[
    "plane",
    "plane2",
    "shifted_plane",
    "circle",
    "sphere2",
    "cylinder",
    "grim_reaper",
    "bowl",
    "angenent_oval",
];

/// Offset of the `shifted_plane` entry.
pub const SHIFTED_PLANE_OFFSET: f64 = 1.0;

pub fn by_name(name: &str) -> Result<AncientFlow> {
    Ok(match name {
        "plane" => plane::line(2, 0.0),
        "plane2" => plane::plane2(0.0),
        "shifted_plane" => plane::line(2, SHIFTED_PLANE_OFFSET),
        "circle" => sphere::circle(),
        "sphere2" => sphere::sphere2(),
        "cylinder" => cylinder::cylinder(),
        "grim_reaper" => grim_reaper::grim_reaper(),
        "bowl" => bowl::bowl(),
        "angenent_oval" => angenent::angenent_oval(),
        other => return Err(Error::UnknownFlow(other.to_string())),
    })
}

pub fn catalog() -> Vec<AncientFlow> {
    CATALOG_NAMES
        .iter()
        .map(|n| by_name(n).expect("catalog names resolve"))
        .collect()
}

/// A line (`n = 1`) in R^`ambient` at distance `offset` from the origin.
pub fn line(ambient: usize, offset: f64) -> Result<AncientFlow> {
    if !(1..=crate::vector::MAX_AMBIENT).contains(&ambient) {
        return Err(Error::InvalidArgument(format!(
            "ambient dimension must be in 1..={}, got {ambient}",
            crate::vector::MAX_AMBIENT
        )));
    }
    Ok(plane::line(ambient, offset))
}

/// A 2-plane in R^3 at height `offset`.
pub fn plane2(offset: f64) -> AncientFlow {
    plane::plane2(offset)
}
