//! Two-height configurations on a ring or an interval, and the closed-form
//! operators acting on them: spin flip, sandpile addition, anti-addition.

mod generator;
mod site_set;
mod toppling;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use generator::{
    decency_statistic, explicit_generator_height0, pointwise_generator_height0,
    rene_closed_form, wrap_safety,
};
pub use site_set::SiteSet;
pub use toppling::{
    ring_operator_by_unrolling, stabilize_by_toppling, stabilize_with_order, ToppleMode,
    ToppleOrder, UnstableConfiguration,
};

/// Height of a site. `One` is called inactive, `Two` active.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum Height {
    One = 1,
    Two = 2,
}

impl Height {
    pub fn value(self) -> u8 {
        self as u8
    }

    pub fn toggled(self) -> Height {
        match self {
            Height::One => Height::Two,
            Height::Two => Height::One,
        }
    }

    pub fn from_value(v: u8) -> Result<Height> {
        match v {
            1 => Ok(Height::One),
            2 => Ok(Height::Two),
            other => Err(Error::HeightOutOfRange(other)),
        }
    }
}

/// Finite stand-in for the integer lattice.
///
/// `Interval` behaves as if sites `-1` and `n` (in zero-based indexing) were
/// permanently at height 1; those virtual sites are never stored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Topology {
    Ring { n: usize },
    Interval { n: usize },
}

impl Topology {
    pub fn ring(n: usize) -> Result<Topology> {
        if n < 3 {
            return Err(Error::LatticeTooSmall(n));
        }
        Ok(Topology::Ring { n })
    }

    pub fn interval(n: usize) -> Result<Topology> {
        if n < 3 {
            return Err(Error::LatticeTooSmall(n));
        }
        Ok(Topology::Interval { n })
    }

    pub fn len(&self) -> usize {
        match *self {
            Topology::Ring { n } | Topology::Interval { n } => n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_ring(&self) -> bool {
        matches!(self, Topology::Ring { .. })
    }

    /// Site reached by moving `offset` steps from `site`; `None` if that
    /// leaves an interval.
    pub fn shift(&self, site: usize, offset: isize) -> Option<usize> {
        let n = self.len() as isize;
        let target = site as isize + offset;
        match self {
            Topology::Ring { .. } => Some(target.rem_euclid(n) as usize),
            Topology::Interval { .. } => (0..n).contains(&target).then_some(target as usize),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Left,
    Right,
}

/// Result of a nearest-site search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Nearest {
    Site(usize),
    /// The virtual height-1 site just outside an interval.
    Boundary,
}

/// Net change produced by one operator application: at most three sites.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Effect {
    changes: [(usize, Height); 3],
    len: u8,
}

impl Effect {
    pub const IDENTITY: Effect = Effect {
        changes: [(0, Height::One); 3],
        len: 0,
    };

    fn single(site: usize, h: Height) -> Effect {
        let mut e = Effect::IDENTITY;
        e.push(site, h);
        e
    }

    fn push(&mut self, site: usize, h: Height) {
        self.changes[self.len as usize] = (site, h);
        self.len += 1;
    }

    pub fn changes(&self) -> &[(usize, Height)] {
        &self.changes[..self.len as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.len == 0
    }

    /// Height at `site` after the effect, given the height before.
    pub fn height_after(&self, site: usize, before: Height) -> Height {
        self.changes()
            .iter()
            .rev()
            .find(|(s, _)| *s == site)
            .map_or(before, |&(_, h)| h)
    }
}

/// A stable two-height configuration together with ordered indexes of its
/// height-1 and height-2 sites.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    topology: Topology,
    heights: Vec<Height>,
    ones: SiteSet,
    twos: SiteSet,
}

pub fn make_config(topology: Topology, heights: &[u8]) -> Result<Configuration> {
    Configuration::from_values(topology, heights)
}

impl Configuration {
    pub fn from_values(topology: Topology, values: &[u8]) -> Result<Configuration> {
        let heights = values
            .iter()
            .map(|&v| Height::from_value(v))
            .collect::<Result<Vec<_>>>()?;
        Configuration::from_heights(topology, heights)
    }

    pub fn from_heights(topology: Topology, heights: Vec<Height>) -> Result<Configuration> {
        if heights.len() != topology.len() {
            return Err(Error::LengthMismatch {
                expected: topology.len(),
                got: heights.len(),
            });
        }
        let n = heights.len();
        let mut ones = SiteSet::new(n);
        let mut twos = SiteSet::new(n);
        for (x, h) in heights.iter().enumerate() {
            match h {
                Height::One => ones.insert(x),
                Height::Two => twos.insert(x),
            };
        }
        Ok(Configuration {
            topology,
            heights,
            ones,
            twos,
        })
    }

    pub fn constant(topology: Topology, h: Height) -> Configuration {
        let n = topology.len();
        let (ones, twos) = match h {
            Height::One => (SiteSet::full(n), SiteSet::new(n)),
            Height::Two => (SiteSet::new(n), SiteSet::full(n)),
        };
        Configuration {
            topology,
            heights: vec![h; n],
            ones,
            twos,
        }
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn len(&self) -> usize {
        self.heights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heights.is_empty()
    }

    pub fn height(&self, x: usize) -> Height {
        self.heights[x]
    }

    pub fn heights(&self) -> &[Height] {
        &self.heights
    }

    pub fn values(&self) -> Vec<u8> {
        self.heights.iter().map(|h| h.value()).collect()
    }

    /// Ordered index of height-1 sites.
    pub fn inactive_index(&self) -> &SiteSet {
        &self.ones
    }

    /// Ordered index of height-2 sites.
    pub fn active_index(&self) -> &SiteSet {
        &self.twos
    }

    pub fn sites_at(&self, h: Height) -> &SiteSet {
        match h {
            Height::One => &self.ones,
            Height::Two => &self.twos,
        }
    }

    pub fn count_ones(&self) -> usize {
        self.ones.len()
    }

    pub fn count_twos(&self) -> usize {
        self.twos.len()
    }

    fn check_site(&self, x: usize) -> Result<()> {
        if x >= self.len() {
            return Err(Error::InvalidSite {
                site: x,
                len: self.len(),
            });
        }
        Ok(())
    }

    /// Checks that both indexes agree with the height array.
    pub fn audit(&self) -> Result<()> {
        let ones_ok = self.ones.len()
            == self.heights.iter().filter(|&&h| h == Height::One).count()
            && self.ones.iter().all(|x| self.heights[x] == Height::One);
        let twos_ok = self.ones.len() + self.twos.len() == self.len()
            && self.twos.iter().all(|x| self.heights[x] == Height::Two);
        if ones_ok && twos_ok {
            Ok(())
        } else {
            Err(Error::Numerical("site index out of sync with heights".into()))
        }
    }

    pub fn set(&mut self, x: usize, h: Height) {
        if self.heights[x] == h {
            return;
        }
        self.heights[x] = h;
        match h {
            Height::One => {
                self.twos.remove(x);
                self.ones.insert(x);
            }
            Height::Two => {
                self.ones.remove(x);
                self.twos.insert(x);
            }
        }
    }

    pub fn apply(&mut self, effect: &Effect) {
        for &(x, h) in effect.changes() {
            self.set(x, h);
        }
    }

    /// Nearest site with height `target`, scanning from `x` (exclusive) in the
    /// given direction.
    ///
    /// On a ring the scan wraps and ends at `x` itself; `None` means no site
    /// has that height. On an interval the scan stops at the virtual boundary.
    pub fn nearest(&self, x: usize, dir: Direction, target: Height) -> Option<Nearest> {
        let set = self.sites_at(target);
        let n = self.len();
        let hit = match dir {
            Direction::Right => {
                let direct = if x + 1 < n { set.next_at_or_after(x + 1) } else { None };
                match self.topology {
                    Topology::Ring { .. } => direct.or_else(|| set.first()),
                    Topology::Interval { .. } => direct,
                }
            }
            Direction::Left => {
                let direct = if x > 0 { set.prev_at_or_before(x - 1) } else { None };
                match self.topology {
                    Topology::Ring { .. } => direct.or_else(|| set.last()),
                    Topology::Interval { .. } => direct,
                }
            }
        };
        match (hit, self.topology) {
            (Some(s), _) => Some(Nearest::Site(s)),
            (None, Topology::Ring { .. }) => None,
            (None, Topology::Interval { .. }) => Some(Nearest::Boundary),
        }
    }

    pub fn nearest_inactive(&self, x: usize, dir: Direction) -> Option<Nearest> {
        self.nearest(x, dir, Height::One)
    }

    /// `inf { j >= 0 : η(i + j) = 1 }`. Virtual boundary sites count as height 1.
    pub fn k_plus(&self, i: usize) -> Option<usize> {
        let n = self.len();
        match self.topology {
            Topology::Ring { .. } => {
                let i = i % n;
                let s = self.ones.next_at_or_after(i).or_else(|| self.ones.first())?;
                Some((s + n - i) % n)
            }
            Topology::Interval { .. } => {
                if i >= n {
                    return Some(0);
                }
                Some(self.ones.next_at_or_after(i).map_or(n - i, |s| s - i))
            }
        }
    }

    /// `inf { j > 0 : η(i - j) = 1 }`. Virtual boundary sites count as height 1.
    pub fn k_minus(&self, i: usize) -> Option<usize> {
        let n = self.len();
        match self.topology {
            Topology::Ring { .. } => {
                let i = i % n;
                let s = match i.checked_sub(1).and_then(|p| self.ones.prev_at_or_before(p)) {
                    Some(s) => s,
                    None => self.ones.last()?,
                };
                let d = (i + n - s) % n;
                Some(if d == 0 { n } else { d })
            }
            Topology::Interval { .. } => {
                let found = i
                    .min(n)
                    .checked_sub(1)
                    .and_then(|p| self.ones.prev_at_or_before(p));
                Some(found.map_or(i + 1, |s| i - s))
            }
        }
    }

    pub fn flip_effect(&self, x: usize) -> Result<Effect> {
        self.check_site(x)?;
        Ok(Effect::single(x, self.heights[x].toggled()))
    }

    /// Closed-form avalanche with `hole` as the height that gets filled.
    ///
    /// `hole = One` is the sandpile addition, `hole = Two` the anti-addition.
    fn avalanche_effect(&self, x: usize, hole: Height) -> Effect {
        let fill = hole.toggled();
        if self.heights[x] == hole {
            return Effect::single(x, fill);
        }
        let n = self.len();
        let mut effect = Effect::IDENTITY;
        match self.topology {
            Topology::Ring { .. } => {
                let holes = self.sites_at(hole);
                let (Some(left), Some(right)) = (holes.prev_at_or_before(x).or_else(|| holes.last()), holes.next_at_or_after(x).or_else(|| holes.first())) else {
                    return effect;
                };
                // Unrolled coordinates: lo < x < hi, at most one period away.
                let lo = x as isize - ((x + n - left) % n) as isize;
                let hi = x as isize + ((right + n - x) % n) as isize;
                let mirror = (lo + hi - x as isize).rem_euclid(n as isize) as usize;
                effect.push(left, fill);
                if right != left {
                    effect.push(right, fill);
                }
                effect.push(mirror, hole);
            }
            Topology::Interval { .. } => {
                let holes = self.sites_at(hole);
                let lo = holes.prev_at_or_before(x).map_or(-1, |s| s as isize);
                let hi = holes.next_at_or_after(x).map_or(n as isize, |s| s as isize);
                let mirror = lo + hi - x as isize;
                if lo >= 0 {
                    effect.push(lo as usize, fill);
                }
                if hi < n as isize {
                    effect.push(hi as usize, fill);
                }
                // A mirror strictly between lo and hi is always interior; the
                // guard only matters if that ever changes.
                if (0..n as isize).contains(&mirror) {
                    effect.push(mirror as usize, hole);
                }
            }
        }
        effect
    }

    pub fn add_effect(&self, x: usize) -> Result<Effect> {
        self.check_site(x)?;
        Ok(self.avalanche_effect(x, Height::One))
    }

    pub fn anti_add_effect(&self, x: usize) -> Result<Effect> {
        self.check_site(x)?;
        Ok(self.avalanche_effect(x, Height::Two))
    }

    pub fn flip_in_place(&mut self, x: usize) -> Result<()> {
        let e = self.flip_effect(x)?;
        self.apply(&e);
        Ok(())
    }

    pub fn add_in_place(&mut self, x: usize) -> Result<Effect> {
        let e = self.add_effect(x)?;
        self.apply(&e);
        Ok(e)
    }

    pub fn anti_add_in_place(&mut self, x: usize) -> Result<Effect> {
        let e = self.anti_add_effect(x)?;
        self.apply(&e);
        Ok(e)
    }

    pub fn flip(&self, x: usize) -> Result<Configuration> {
        let mut c = self.clone();
        c.flip_in_place(x)?;
        Ok(c)
    }

    /// Sandpile addition at `x`, stabilized.
    pub fn add(&self, x: usize) -> Result<Configuration> {
        let mut c = self.clone();
        c.add_in_place(x)?;
        Ok(c)
    }

    /// Grain removal at `x`, stabilized by reversed topplings.
    pub fn anti_add(&self, x: usize) -> Result<Configuration> {
        let mut c = self.clone();
        c.anti_add_in_place(x)?;
        Ok(c)
    }

    /// Every height toggled.
    pub fn global_flip(&self) -> Configuration {
        Configuration {
            topology: self.topology,
            heights: self.heights.iter().map(|h| h.toggled()).collect(),
            ones: self.twos.clone(),
            twos: self.ones.clone(),
        }
    }

    pub fn density_of_ones(&self) -> f64 {
        self.ones.len() as f64 / self.len() as f64
    }

    pub fn density_of_twos(&self) -> f64 {
        self.twos.len() as f64 / self.len() as f64
    }
}

impl std::fmt::Display for Configuration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for h in &self.heights {
            write!(f, "{}", h.value())?;
        }
        Ok(())
    }
}

pub fn flip(cfg: &Configuration, x: usize) -> Result<Configuration> {
    cfg.flip(x)
}

pub fn add(cfg: &Configuration, x: usize) -> Result<Configuration> {
    cfg.add(x)
}

pub fn anti_add(cfg: &Configuration, x: usize) -> Result<Configuration> {
    cfg.anti_add(x)
}

pub fn global_flip(cfg: &Configuration) -> Configuration {
    cfg.global_flip()
}

pub fn nearest_inactive(cfg: &Configuration, x: usize, dir: Direction) -> Option<Nearest> {
    cfg.nearest_inactive(x, dir)
}

pub fn k_plus(cfg: &Configuration, i: usize) -> Option<usize> {
    cfg.k_plus(i)
}

pub fn k_minus(cfg: &Configuration, i: usize) -> Option<usize> {
    cfg.k_minus(i)
}
