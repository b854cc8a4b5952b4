use std::fmt;

use serde::{Deserialize, Serialize};

/// How a flow reaches its destination MR, or that it was given up.
///
/// The declaration order is also the lexicographic order used to break ties
/// between equally good assignments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Mode {
    /// BS to MR.
    Direct,
    /// BS to the left neighbor MR, then to the destination.
    Left,
    /// BS to the right neighbor MR, then to the destination.
    Right,
    /// BS to the UAV, then to the destination.
    Uav,
    Abandoned,
}

impl Mode {
    pub const ALL: [Mode; 5] = [Mode::Direct, Mode::Left, Mode::Right, Mode::Uav, Mode::Abandoned];
    pub const TRANSMIT: [Mode; 4] = [Mode::Direct, Mode::Left, Mode::Right, Mode::Uav];
    pub const RELAY: [Mode; 3] = [Mode::Left, Mode::Right, Mode::Uav];

    pub fn is_relay(self) -> bool {
        matches!(self, Mode::Left | Mode::Right | Mode::Uav)
    }

    /// Single-letter tag (S, L, R, U, or A for abandoned).
    pub fn tag(self) -> char {
        match self {
            Mode::Direct => 'S',
            Mode::Left => 'L',
            Mode::Right => 'R',
            Mode::Uav => 'U',
            Mode::Abandoned => 'A',
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Mode::Direct => "direct",
            Mode::Left => "left",
            Mode::Right => "right",
            Mode::Uav => "uav",
            Mode::Abandoned => "abandoned",
        };
        f.write_str(name)
    }
}

/// A small set of [`Mode`]s stored as a bitmask.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct ModeSet(u8);

impl ModeSet {
    pub const EMPTY: ModeSet = ModeSet(0);

    fn bit(mode: Mode) -> u8 {
        1 << (mode as u8)
    }

    pub fn insert(&mut self, mode: Mode) {
        self.0 |= Self::bit(mode);
    }

    pub fn remove(&mut self, mode: Mode) {
        self.0 &= !Self::bit(mode);
    }

    pub fn contains(self, mode: Mode) -> bool {
        self.0 & Self::bit(mode) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = Mode> {
        Mode::ALL.into_iter().filter(move |m| self.contains(*m))
    }
}

impl FromIterator<Mode> for ModeSet {
    fn from_iter<I: IntoIterator<Item = Mode>>(iter: I) -> Self {
        let mut set = ModeSet::EMPTY;
        for m in iter {
            set.insert(m);
        }
        set
    }
}

impl fmt::Display for ModeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, m) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", m.tag())?;
        }
        f.write_str("}")
    }
}
