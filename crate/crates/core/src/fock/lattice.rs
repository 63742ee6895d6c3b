use crate::error::{Error, Result};

/// Limit on the dense code space of a lattice.
const MAX_CODES: usize = 1 << 26;

/// A down-closed set of photon patterns, enumerated by total photon number
/// and then colexicographically.
///
/// Patterns are addressed by their mixed-radix code `Σ m_j r^j`; a parent
/// `m − e_j` always has a smaller code than `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    modes: usize,
    radix: usize,
    /// Flat storage, `modes` entries per pattern.
    patterns: Vec<u16>,
    codes: Vec<usize>,
    /// Enumeration position of each code, `usize::MAX` when absent.
    slot: Vec<usize>,
}

impl Lattice {
    /// All patterns with at most `cutoff` photons in every mode.
    pub fn per_mode(modes: usize, cutoff: usize) -> Result<Self> {
        Self::build(modes, cutoff, |_| true)
    }

    /// All patterns with at most `total` photons overall.
    pub fn total(modes: usize, total: usize) -> Result<Self> {
        Self::build(modes, total, |m| m.iter().map(|&x| x as usize).sum::<usize>() <= total)
    }

    fn build(modes: usize, max_per_mode: usize, keep: impl Fn(&[u16]) -> bool) -> Result<Self> {
        if modes == 0 {
            return Err(Error::InvalidArgument("lattice needs at least one mode".into()));
        }
        let radix = max_per_mode + 1;
        let size = (0..modes).try_fold(1usize, |acc, _| acc.checked_mul(radix));
        let size = match size {
            Some(s) if s <= MAX_CODES && max_per_mode <= u16::MAX as usize => s,
            _ => {
                return Err(Error::CutoffExceeded(format!(
                    "{radix}^{modes} patterns exceed the lattice limit"
                )))
            }
        };
        let mut entries: Vec<(usize, usize)> = Vec::new();
        let mut m = vec![0u16; modes];
        for code in 0..size {
            if code > 0 {
                // increment the mixed-radix counter
                let mut j = 0;
                loop {
                    m[j] += 1;
                    if (m[j] as usize) < radix {
                        break;
                    }
                    m[j] = 0;
                    j += 1;
                }
            }
            if keep(&m) {
                let n: usize = m.iter().map(|&x| x as usize).sum();
                entries.push((n, code));
            }
        }
        entries.sort_unstable();
        let mut slot = vec![usize::MAX; size];
        let mut patterns = Vec::with_capacity(entries.len() * modes);
        let mut codes = Vec::with_capacity(entries.len());
        for (pos, &(_, code)) in entries.iter().enumerate() {
            slot[code] = pos;
            codes.push(code);
            let mut rest = code;
            for _ in 0..modes {
                patterns.push((rest % radix) as u16);
                rest /= radix;
            }
        }
        Ok(Self {
            modes,
            radix,
            patterns,
            codes,
            slot,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn pattern(&self, pos: usize) -> &[u16] {
        &self.patterns[pos * self.modes..(pos + 1) * self.modes]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u16]> {
        self.patterns.chunks_exact(self.modes)
    }

    pub fn total_photons(&self, pos: usize) -> usize {
        self.pattern(pos).iter().map(|&x| x as usize).sum()
    }

    pub fn max_total(&self) -> usize {
        self.len().checked_sub(1).map_or(0, |p| self.total_photons(p))
    }

    pub(crate) fn code(&self, pos: usize) -> usize {
        self.codes[pos]
    }

    pub(crate) fn stride(&self, mode: usize) -> usize {
        self.radix.pow(mode as u32)
    }

    pub(crate) fn position_of_code(&self, code: usize) -> Option<usize> {
        self.slot.get(code).copied().filter(|&p| p != usize::MAX)
    }

    pub fn position(&self, m: &[u16]) -> Option<usize> {
        if m.len() != self.modes || m.iter().any(|&x| x as usize >= self.radix) {
            return None;
        }
        let code = m
            .iter()
            .rev()
            .fold(0usize, |acc, &x| acc * self.radix + x as usize);
        self.position_of_code(code)
    }

    /// Positions ordered by code, so that parents precede children.
    pub(crate) fn positions_by_code(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_unstable_by_key(|&p| self.codes[p]);
        order
    }
}
