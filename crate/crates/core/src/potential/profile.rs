use std::sync::Arc;

use serde::Serialize;

use super::{capacity, PotentialError};
use crate::map::Truncation;

/// Relative growth between the last two rows above which a profile counts
/// as growing.
pub const GROWTH_THRESHOLD: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileTrend {
    Bounded,
    Growing,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileRow {
    pub radius: Option<usize>,
    pub vertices: usize,
    pub level_set_size: usize,
    pub capacity: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Profile {
    pub epsilon: f64,
    pub rows: Vec<ProfileRow>,
    pub trend: ProfileTrend,
}

/// Capacity of `{v interior: |φ(v)| ≥ ε}` in each truncation of a nested
/// sequence. `phi` is indexed by vertices of the common parent map.
pub fn quasi_asymptotic_profile(
    truncations: &[Truncation],
    phi: impl Fn(usize) -> f64,
    epsilon: f64,
) -> Result<Profile, PotentialError> {
    if !(epsilon > 0.0) {
        return Err(PotentialError::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    for w in truncations.windows(2) {
        if !Arc::ptr_eq(w[0].parent(), w[1].parent()) || w[0].vertex_count() > w[1].vertex_count() {
            return Err(PotentialError::InvalidArgument("truncations must be nested in one parent map".into()));
        }
    }
    let mut rows = Vec::with_capacity(truncations.len());
    for t in truncations {
        let set: Vec<usize> = t.interior().iter().copied().filter(|&v| phi(t.to_parent(v)).abs() >= epsilon).collect();
        let cap = if set.is_empty() { 0.0 } else { capacity(t, &set)?.value };
        rows.push(ProfileRow { radius: t.radius(), vertices: t.vertex_count(), level_set_size: set.len(), capacity: cap });
    }
    let trend = match rows.as_slice() {
        [.., a, b] if b.capacity > (1.0 + GROWTH_THRESHOLD) * a.capacity => ProfileTrend::Growing,
        _ => ProfileTrend::Bounded,
    };
    Ok(Profile { epsilon, rows, trend })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::{generate_tiling, truncate};

    fn family() -> Vec<Truncation> {
        let m = Arc::new(generate_tiling(7, 3, 5).unwrap());
        (2..=5).map(|r| truncate(m.clone(), 0, r).unwrap()).collect()
    }

    #[test]
    fn zero_function_has_zero_profile() {
        let p = quasi_asymptotic_profile(&family(), |_| 0.0, 0.1).unwrap();
        assert!(p.rows.iter().all(|r| r.capacity == 0.0));
        assert_eq!(p.trend, ProfileTrend::Bounded);
    }

    #[test]
    fn constant_one_grows() {
        let p = quasi_asymptotic_profile(&family(), |_| 1.0, 0.5).unwrap();
        assert!(p.rows.windows(2).all(|w| w[1].capacity > w[0].capacity));
        assert_eq!(p.trend, ProfileTrend::Growing);
    }

    #[test]
    fn mismatched_parents_rejected() {
        let a = truncate(Arc::new(generate_tiling(7, 3, 3).unwrap()), 0, 2).unwrap();
        let b = truncate(Arc::new(generate_tiling(7, 3, 3).unwrap()), 0, 3).unwrap();
        assert!(quasi_asymptotic_profile(&[a, b], |_| 1.0, 0.5).is_err());
    }
}
