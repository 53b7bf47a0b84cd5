use std::fmt;

/// Set of MIDI pitches `0..=127`, stored as a bitmask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct PitchSet(u128);

impl PitchSet {
    pub const fn empty() -> Self {
        PitchSet(0)
    }

    /// Panics if `pitch > 127`.
    pub fn insert(&mut self, pitch: u8) {
        assert!(pitch < 128, "MIDI pitch {pitch} out of range");
        self.0 |= 1u128 << pitch;
    }

    #[inline]
    pub fn contains(self, pitch: u8) -> bool {
        pitch < 128 && (self.0 >> pitch) & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Pitches in ascending order.
    pub fn iter(self) -> impl Iterator<Item = u8> {
        (0u8..128).filter(move |&p| self.contains(p))
    }

    pub fn to_vec(self) -> Vec<u8> {
        self.iter().collect()
    }
}

impl FromIterator<u8> for PitchSet {
    fn from_iter<I: IntoIterator<Item = u8>>(iter: I) -> Self {
        let mut set = PitchSet::empty();
        for p in iter {
            set.insert(p);
        }
        set
    }
}

impl fmt::Debug for PitchSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
