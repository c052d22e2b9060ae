//! Column types `Θ = (χ, ΔΠ, b₀, b₁, x)` and the free energy per step `ψ(Θ,u)`
//! of a path crossing one column of blocks.

mod psi;

pub use psi::{psi, psi_geom, psi_multistart, u_theta_of_c, PsiSolution, UTheta};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::Kind;

/// Disorder window and crossing data of one column.
///
/// `chi[i]` labels block `i − r` where `r = (chi.len() − 1)/2`; heights are in
/// block units, so the path enters at `(0, b₀)` and leaves at `(1, ΔΠ + b₁)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnType {
    pub chi: Vec<Kind>,
    pub dpi: i32,
    pub b0: f64,
    pub b1: f64,
    pub x: u8,
}

impl ColumnType {
    pub fn new(chi: Vec<Kind>, dpi: i32, b0: f64, b1: f64, x: u8) -> Result<Self> {
        let theta = Self { chi, dpi, b0, b1, x };
        theta.validate()?;
        Ok(theta)
    }

    /// Window of radius `radius` filled with one label.
    pub fn uniform(kind: Kind, radius: usize, dpi: i32, b0: f64, b1: f64, x: u8) -> Result<Self> {
        Self::new(vec![kind; 2 * radius + 1], dpi, b0, b1, x)
    }

    pub fn radius(&self) -> i64 {
        (self.chi.len() as i64 - 1) / 2
    }

    /// Label of block `k`, or `None` outside the window.
    pub fn chi_at(&self, k: i64) -> Option<Kind> {
        let r = self.radius();
        (k.abs() <= r).then(|| self.chi[(k + r) as usize])
    }

    /// Label of block `k`, continuing the edge labels beyond the window.
    pub fn label(&self, k: i64) -> Kind {
        let r = self.radius();
        self.chi[(k.clamp(-r, r) + r) as usize]
    }

    fn validate(&self) -> Result<()> {
        if self.chi.is_empty() || self.chi.len() % 2 == 0 {
            return Err(Error::MalformedWindow(format!("window length {} is not odd", self.chi.len())));
        }
        if self.dpi.unsigned_abs() as i64 > self.radius() {
            return Err(Error::MalformedWindow(format!(
                "exit block {} outside window of radius {}",
                self.dpi,
                self.radius()
            )));
        }
        for (name, b) in [("b0", self.b0), ("b1", self.b1)] {
            if !(0.0..=1.0).contains(&b) {
                return Err(Error::MalformedWindow(format!("{name} = {b} outside [0,1]")));
            }
        }
        if self.x != 1 && self.x != 2 {
            return Err(Error::MalformedWindow(format!("tag x = {} not in {{1,2}}", self.x)));
        }
        Ok(())
    }

    pub fn geometry(&self) -> Result<ColumnGeometry> {
        geometry(self)
    }
}

/// Which constraint set of the column variational formula applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ColumnClass {
    /// An interface separates entry and exit.
    Int,
    /// No interface in between; `x = 1` avoids interfaces, `x = 2` must touch one.
    Nint { solvent: Kind, x: u8 },
}

impl fmt::Display for ColumnClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnClass::Int => write!(f, "int"),
            ColumnClass::Nint { solvent, x } => write!(f, "nint({solvent:?},{x})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnGeometry {
    pub k: i32,
    /// Interface heights in block units, increasing.
    pub interfaces: Vec<i64>,
    pub t: f64,
    pub l_a: f64,
    pub l_b: f64,
    pub class: ColumnClass,
}

impl ColumnGeometry {
    pub fn l_of(&self, kind: Kind) -> f64 {
        match kind {
            Kind::A => self.l_a,
            Kind::B => self.l_b,
        }
    }
}

/// Interface heights, signed interface count, crossing time and per-solvent
/// vertical distances of a column.
///
/// An interface sits at height `n` when blocks `n − 1` and `n` differ. For the
/// non-interface classes the vertical distance is `|ΔΠ + b₁ − b₀|` for both
/// tags, which keeps `l_A + l_B = t_Θ − 1` on the `x = 1` classes.
pub fn geometry(theta: &ColumnType) -> Result<ColumnGeometry> {
    theta.validate()?;
    let r = theta.radius();
    let interfaces: Vec<i64> = (-r + 1..=r).filter(|&n| theta.chi_at(n - 1) != theta.chi_at(n)).collect();
    let n1 = interfaces.iter().copied().find(|&n| n > 0);
    let n0 = interfaces.iter().copied().rfind(|&n| n <= 0);
    let dpi = theta.dpi as i64;

    let k = if dpi >= 0 {
        interfaces.iter().filter(|&&n| n >= 1 && n <= dpi).count() as i32
    } else {
        -(interfaces.iter().filter(|&&n| n > dpi && n <= 0).count() as i32)
    };

    let class = if k != 0 {
        if theta.x != 1 {
            return Err(Error::MalformedWindow(
                "a column with interfaces between entry and exit must have x = 1".into(),
            ));
        }
        ColumnClass::Int
    } else {
        ColumnClass::Nint { solvent: theta.label(0), x: theta.x }
    };

    let (b0, b1) = (theta.b0, theta.b1);
    let exit = dpi as f64 + b1;
    let straight = (exit - b0).abs();
    let t = match class {
        ColumnClass::Nint { x: 2, .. } => {
            let up = n1.map_or(f64::INFINITY, |n| 2.0 * n as f64 - b0 - b1 - dpi as f64);
            let down = n0.map_or(f64::INFINITY, |n| 2.0 * n.unsigned_abs() as f64 + b0 + b1 + dpi as f64);
            if up.is_infinite() && down.is_infinite() {
                return Err(Error::MalformedWindow("x = 2 but the window holds no interface".into()));
            }
            1.0 + up.min(down)
        }
        _ => 1.0 + straight,
    };

    let (mut l_a, mut l_b) = (0.0, 0.0);
    match class {
        ColumnClass::Int => {
            let crossed: Vec<f64> = if dpi > 0 {
                interfaces.iter().filter(|&&n| n >= 1 && n <= dpi).map(|&n| n as f64).collect()
            } else {
                interfaces.iter().rev().filter(|&&n| n > dpi && n <= 0).map(|&n| n as f64).collect()
            };
            let mut heights = Vec::with_capacity(crossed.len() + 2);
            heights.push(b0);
            heights.extend(crossed);
            heights.push(exit);
            for w in heights.windows(2) {
                let gap = (w[1] - w[0]).abs();
                let mid = 0.5 * (w[0] + w[1]);
                match theta.label(mid.ceil() as i64 - 1) {
                    Kind::A => l_a += gap,
                    Kind::B => l_b += gap,
                }
            }
        }
        ColumnClass::Nint { solvent: Kind::A, .. } => l_a = straight,
        ColumnClass::Nint { solvent: Kind::B, .. } => l_b = straight,
    }
    Ok(ColumnGeometry { k, interfaces, t, l_a, l_b, class })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Kind::{A, B};

    fn window(labels: &[Kind]) -> Vec<Kind> {
        labels.to_vec()
    }

    #[test]
    fn flat_crossing_takes_unit_time() {
        let th = ColumnType::uniform(A, 3, 0, 0.5, 0.5, 1).unwrap();
        let g = th.geometry().unwrap();
        assert_eq!(g.t, 1.0);
        assert_eq!(g.class, ColumnClass::Nint { solvent: A, x: 1 });
    }

    #[test]
    fn two_block_rise() {
        let th = ColumnType::uniform(B, 3, 2, 0.5, 0.5, 1).unwrap();
        assert_eq!(th.geometry().unwrap().t, 3.0);
    }

    #[test]
    fn nint_distance() {
        let th = ColumnType::uniform(A, 3, 1, 0.2, 0.7, 1).unwrap();
        let g = th.geometry().unwrap();
        assert!((g.l_a - 1.5).abs() < 1e-12);
        assert_eq!(g.l_b, 0.0);
    }

    #[test]
    fn interior_split() {
        // blocks -2..=2: B B A B B; interfaces at 0 and 1
        let th = ColumnType::new(window(&[B, B, A, B, B]), 1, 0.5, 0.25, 1).unwrap();
        let g = th.geometry().unwrap();
        assert_eq!(g.interfaces, vec![0, 1]);
        assert_eq!(g.k, 1);
        assert_eq!(g.class, ColumnClass::Int);
        assert!((g.l_a - 0.5).abs() < 1e-12);
        assert!((g.l_b - 0.25).abs() < 1e-12);
        assert!((g.t - 1.75).abs() < 1e-12);
    }

    #[test]
    fn downward_interior() {
        let th = ColumnType::new(window(&[B, B, A, B, B]), -1, 0.5, 0.5, 1).unwrap();
        let g = th.geometry().unwrap();
        assert_eq!(g.k, -1);
        assert!((g.l_a - 0.5).abs() < 1e-12);
        assert!((g.l_b - 0.5).abs() < 1e-12);
        assert!((g.t - 2.0).abs() < 1e-12);
    }

    #[test]
    fn touching_time() {
        // blocks -1..=1: B A A; interface at 0
        let th = ColumnType::new(window(&[B, A, A]), 0, 0.5, 0.5, 2).unwrap();
        let g = th.geometry().unwrap();
        assert_eq!(g.class, ColumnClass::Nint { solvent: A, x: 2 });
        assert!((g.t - 2.0).abs() < 1e-12);
    }

    #[test]
    fn malformed_windows() {
        assert!(ColumnType::new(vec![A, A], 0, 0.5, 0.5, 1).is_err());
        assert!(ColumnType::uniform(A, 1, 2, 0.5, 0.5, 1).is_err());
        let th = ColumnType::uniform(A, 2, 0, 0.5, 0.5, 2).unwrap();
        assert!(matches!(th.geometry(), Err(Error::MalformedWindow(_))));
        let th = ColumnType::new(window(&[B, B, A, B, B]), 1, 0.5, 0.5, 2).unwrap();
        assert!(th.geometry().is_err());
    }
}
