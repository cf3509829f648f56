use serde::{Deserialize, Serialize};

use super::{MapError, PlanarMap};

/// On-disk map description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapFile {
    pub vertices: usize,
    pub rotations: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conductances: Vec<(usize, usize, f64)>,
    /// Oriented edge `[u, v]` with the outer face on its left.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer_face: Option<(usize, usize)>,
}

impl MapFile {
    pub fn into_map(self) -> Result<PlanarMap, MapError> {
        if self.rotations.len() != self.vertices {
            return Err(MapError::Parse(format!(
                "{} rotation lists for {} vertices",
                self.rotations.len(),
                self.vertices
            )));
        }
        let map = PlanarMap::from_rotations(&self.rotations, &self.conductances)?;
        match self.outer_face {
            Some((u, v)) => {
                let e = map
                    .find_dart(u, v)
                    .ok_or_else(|| MapError::Parse(format!("outer face edge {u}-{v} is not an edge")))?;
                map.with_outer_dart(e)
            }
            None => Ok(map),
        }
    }

    pub fn from_map(map: &PlanarMap) -> Self {
        let mut conductances = Vec::new();
        if (0..map.dart_count()).any(|e| map.conductance(e) != 1.0) {
            for e in (0..map.dart_count()).step_by(2) {
                conductances.push((map.origin(e), map.head(e), map.conductance(e)));
            }
        }
        Self {
            vertices: map.vertex_count(),
            rotations: map.rotations(),
            conductances,
            outer_face: map.outer_dart().map(|e| (map.origin(e), map.head(e))),
        }
    }
}

pub fn map_from_json(text: &str) -> Result<PlanarMap, MapError> {
    let file: MapFile = serde_json::from_str(text).map_err(|e| MapError::Parse(e.to_string()))?;
    file.into_map()
}

pub fn map_to_json(map: &PlanarMap) -> String {
    serde_json::to_string_pretty(&MapFile::from_map(map)).expect("map file serializes")
}
