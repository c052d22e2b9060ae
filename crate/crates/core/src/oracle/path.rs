use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Step {
    East,
    North,
    South,
}

impl Step {
    pub const ALL: [Step; 3] = [Step::East, Step::North, Step::South];

    pub fn delta(self) -> (i64, i64) {
        match self {
            Step::East => (1, 0),
            Step::North => (0, 1),
            Step::South => (0, -1),
        }
    }

    /// Whether `next` may follow `self` without revisiting a site.
    pub fn allows(self, next: Step) -> bool {
        !matches!((self, next), (Step::North, Step::South) | (Step::South, Step::North))
    }
}

/// A directed self-avoiding path: steps East, North or South with no
/// immediate North/South reversal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectedPath {
    start: (i64, i64),
    steps: Vec<Step>,
}

impl DirectedPath {
    pub fn new(start: (i64, i64), steps: Vec<Step>) -> Result<Self> {
        for w in steps.windows(2) {
            if !w[0].allows(w[1]) {
                return Err(Error::Domain("path reverses vertically".into()));
            }
        }
        Ok(Self { start, steps })
    }

    pub fn start(&self) -> (i64, i64) {
        self.start
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// All visited sites, starting point included.
    pub fn sites(&self) -> Vec<(i64, i64)> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        let mut p = self.start;
        out.push(p);
        for s in &self.steps {
            let (dx, dy) = s.delta();
            p = (p.0 + dx, p.1 + dy);
            out.push(p);
        }
        out
    }

    pub fn end(&self) -> (i64, i64) {
        *self.sites().last().expect("sites is never empty")
    }

    /// Bonds `(π_{i-1}, π_i)` in order.
    pub fn bonds(&self) -> Vec<((i64, i64), (i64, i64))> {
        let s = self.sites();
        s.windows(2).map(|w| (w[0], w[1])).collect()
    }
}
