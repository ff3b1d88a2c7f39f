//! Ordered set of sites backed by a 64-ary tree of bit words.
//!
//! Level 0 stores one bit per site. Bit `j` of level `k + 1` is set iff word
//! `j` of level `k` is nonzero, so successor and predecessor queries touch at
//! most two words per level: `O(log_64 n)`.

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiteSet {
    capacity: usize,
    len: usize,
    levels: Vec<Vec<u64>>,
}

const W: usize = 64;

impl SiteSet {
    /// Empty set able to hold sites `0..capacity`.
    pub fn new(capacity: usize) -> Self {
        let mut levels = Vec::new();
        let mut words = capacity.div_ceil(W).max(1);
        loop {
            levels.push(vec![0u64; words]);
            if words == 1 {
                break;
            }
            words = words.div_ceil(W);
        }
        SiteSet {
            capacity,
            len: 0,
            levels,
        }
    }

    /// Set containing every site in `0..capacity`.
    pub fn full(capacity: usize) -> Self {
        let mut set = SiteSet::new(capacity);
        for (w, word) in set.levels[0].iter_mut().enumerate() {
            let lo = w * W;
            let hi = (lo + W).min(capacity);
            if hi > lo {
                let bits = hi - lo;
                *word = if bits == W { !0 } else { (1u64 << bits) - 1 };
            }
        }
        set.len = capacity;
        set.rebuild_summaries();
        set
    }

    fn rebuild_summaries(&mut self) {
        for k in 1..self.levels.len() {
            let (lower, upper) = self.levels.split_at_mut(k);
            let below = &lower[k - 1];
            for word in upper[0].iter_mut() {
                *word = 0;
            }
            for (j, &w) in below.iter().enumerate() {
                if w != 0 {
                    upper[0][j / W] |= 1u64 << (j % W);
                }
            }
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, site: usize) -> bool {
        site < self.capacity && self.levels[0][site / W] >> (site % W) & 1 == 1
    }

    /// Returns true if the site was newly inserted.
    pub fn insert(&mut self, site: usize) -> bool {
        assert!(site < self.capacity, "site {site} out of range");
        let mut idx = site;
        for level in 0..self.levels.len() {
            let word = &mut self.levels[level][idx / W];
            let was_empty = *word == 0;
            let bit = 1u64 << (idx % W);
            if level == 0 {
                if *word & bit != 0 {
                    return false;
                }
                self.len += 1;
            }
            *word |= bit;
            if !was_empty {
                break;
            }
            idx /= W;
        }
        true
    }

    /// Returns true if the site was present.
    pub fn remove(&mut self, site: usize) -> bool {
        if !self.contains(site) {
            return false;
        }
        self.len -= 1;
        let mut idx = site;
        for level in 0..self.levels.len() {
            let word = &mut self.levels[level][idx / W];
            *word &= !(1u64 << (idx % W));
            if *word != 0 {
                break;
            }
            idx /= W;
        }
        true
    }

    /// Smallest element `>= site`.
    pub fn next_at_or_after(&self, site: usize) -> Option<usize> {
        if site >= self.capacity {
            return None;
        }
        let mut level = 0;
        let mut idx = site;
        loop {
            let words = &self.levels[level];
            let w = idx / W;
            if w >= words.len() {
                return None;
            }
            let masked = words[w] & (!0u64 << (idx % W));
            if masked != 0 {
                let mut pos = w * W + masked.trailing_zeros() as usize;
                while level > 0 {
                    level -= 1;
                    pos = pos * W + self.levels[level][pos].trailing_zeros() as usize;
                }
                return Some(pos);
            }
            level += 1;
            if level == self.levels.len() {
                return None;
            }
            idx = w + 1;
        }
    }

    /// Largest element `<= site`.
    pub fn prev_at_or_before(&self, site: usize) -> Option<usize> {
        if self.capacity == 0 {
            return None;
        }
        let mut level = 0;
        let mut idx = site.min(self.capacity - 1);
        loop {
            let w = idx / W;
            let b = idx % W;
            let mask = if b == W - 1 { !0 } else { (1u64 << (b + 1)) - 1 };
            let masked = self.levels[level][w] & mask;
            if masked != 0 {
                let mut pos = w * W + (W - 1 - masked.leading_zeros() as usize);
                while level > 0 {
                    level -= 1;
                    pos = pos * W + (W - 1 - self.levels[level][pos].leading_zeros() as usize);
                }
                return Some(pos);
            }
            if w == 0 {
                return None;
            }
            level += 1;
            if level == self.levels.len() {
                return None;
            }
            idx = w - 1;
        }
    }

    /// Smallest element, if any.
    pub fn first(&self) -> Option<usize> {
        self.next_at_or_after(0)
    }

    pub fn last(&self) -> Option<usize> {
        self.prev_at_or_before(usize::MAX)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.levels[0].iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let tz = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * W + tz)
            })
        })
    }
}
