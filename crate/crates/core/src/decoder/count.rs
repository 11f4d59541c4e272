use std::iter::Sum;
use std::ops::{Add, AddAssign, Sub};

/// Operation tallies for one or more decodes.
///
/// Multiplications include squarings; additions include subtractions.
/// Negations, table lookups, comparisons and copies are free.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct OpCount {
    pub real_mults: u64,
    pub real_adds: u64,
    pub visited_nodes: u64,
    pub restarts: u64,
}

impl Add for OpCount {
    type Output = OpCount;

    fn add(mut self, rhs: OpCount) -> OpCount {
        self += rhs;
        self
    }
}

impl AddAssign for OpCount {
    fn add_assign(&mut self, rhs: OpCount) {
        self.real_mults += rhs.real_mults;
        self.real_adds += rhs.real_adds;
        self.visited_nodes += rhs.visited_nodes;
        self.restarts += rhs.restarts;
    }
}

/// Difference of two snapshots of the same monotone counter.
impl Sub for OpCount {
    type Output = OpCount;

    fn sub(self, rhs: OpCount) -> OpCount {
        OpCount {
            real_mults: self.real_mults - rhs.real_mults,
            real_adds: self.real_adds - rhs.real_adds,
            visited_nodes: self.visited_nodes - rhs.visited_nodes,
            restarts: self.restarts - rhs.restarts,
        }
    }
}

impl Sum for OpCount {
    fn sum<I: Iterator<Item = OpCount>>(iter: I) -> OpCount {
        iter.fold(OpCount::default(), Add::add)
    }
}
