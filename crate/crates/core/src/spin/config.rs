use std::fmt;
use std::sync::Arc;

use super::Window;

/// Occupancy bits over a window; `true` means the site belongs to `P`.
#[derive(Clone)]
pub struct SpinConfiguration {
    window: Arc<Window>,
    occupied: Vec<bool>,
}

impl SpinConfiguration {
    pub fn from_bits(window: Arc<Window>, occupied: Vec<bool>) -> Self {
        assert_eq!(window.len(), occupied.len(), "occupancy length must match window");
        SpinConfiguration { window, occupied }
    }

    pub fn empty(window: Arc<Window>) -> Self {
        let w = window.len();
        Self::from_bits(window, vec![false; w])
    }

    pub fn full(window: Arc<Window>) -> Self {
        let w = window.len();
        Self::from_bits(window, vec![true; w])
    }

    /// Configuration occupying exactly the given site indices.
    pub fn from_sites(window: Arc<Window>, sites: impl IntoIterator<Item = usize>) -> Self {
        let mut occupied = vec![false; window.len()];
        for i in sites {
            occupied[i] = true;
        }
        Self::from_bits(window, occupied)
    }

    /// Configuration occupying lattice points given by coordinates. Points
    /// outside the window are ignored.
    pub fn from_coords(window: Arc<Window>, points: &[&[i64]]) -> Self {
        let sites: Vec<usize> = points.iter().filter_map(|c| window.lookup(c)).collect();
        Self::from_sites(window, sites)
    }

    /// Configuration from the low bits of `mask` (site `i` ↔ bit `i`).
    pub fn from_mask(window: Arc<Window>, mask: u64) -> Self {
        let occupied = (0..window.len()).map(|i| mask >> i & 1 == 1).collect();
        Self::from_bits(window, occupied)
    }

    pub fn window(&self) -> &Arc<Window> {
        &self.window
    }

    pub fn len(&self) -> usize {
        self.occupied.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occupied.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.occupied
    }

    pub fn is_occupied(&self, i: usize) -> bool {
        self.occupied[i]
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.occupied[i] = value;
    }

    /// `|supp(μ)|`.
    pub fn count(&self) -> usize {
        self.occupied.iter().filter(|&&b| b).count()
    }

    pub fn support(&self) -> Vec<usize> {
        self.occupied
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }

    pub fn complement(&self) -> Self {
        SpinConfiguration {
            window: self.window.clone(),
            occupied: self.occupied.iter().map(|b| !b).collect(),
        }
    }

    /// Occupancy of the lattice point `coords`; points outside the window
    /// read as empty, matching the window-truncated `P_n`.
    pub fn occupied_at(&self, coords: &[i64]) -> bool {
        self.window.lookup(coords).is_some_and(|i| self.occupied[i])
    }
}

impl PartialEq for SpinConfiguration {
    fn eq(&self, other: &Self) -> bool {
        self.window.kind() == other.window.kind()
            && self.window.radius() == other.window.radius()
            && self.occupied == other.occupied
    }
}

impl fmt::Debug for SpinConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpinConfiguration")
            .field("graph", &self.window.kind())
            .field("n", &self.window.radius())
            .field("support", &self.support())
            .finish()
    }
}
