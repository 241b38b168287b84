//! Reduction of each boundary wing to a single effective spin-1/2.
//!
//! A wing of `N` spin-1 sites capped by a single-boson boundary operator is
//! Schmidt-equivalent to a qubit entangled with the adjacent half-site. The
//! Schmidt weights are `xi_pm = (3 +- f)/6` with `f = (-1/3)^(N-1)`; an
//! infinite wing has `f = 0` and the effective pair is a singlet.
//!
//! Effective end qubits use the basis `|0> = a`, `|1> = b`. The diagonal
//! matrix `v` multiplies the end qubit of a singlet bond, so the left pair is
//! `(V (x) I)|Psi->` and the right pair `(I (x) V)|Psi->`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, partial_trace, singlet, ComplexMatrix, DensityMatrix, ONE, ZERO};

/// Number of sites between the block and the boundary operator, counting the
/// boundary site itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Distance {
    Finite(u32),
    Infinite,
}

impl Distance {
    pub fn finite(n: u32) -> Result<Self> {
        if n == 0 {
            Err(Error::ZeroDistance)
        } else {
            Ok(Distance::Finite(n))
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Distance::Finite(_))
    }

    pub fn sites(self) -> Option<usize> {
        match self {
            Distance::Finite(n) => Some(n as usize),
            Distance::Infinite => None,
        }
    }

    /// `(-1/3)^(N-1)`, exactly zero for an infinite wing.
    pub fn f(self) -> f64 {
        match self {
            Distance::Finite(n) => (-1.0f64 / 3.0).powi(n as i32 - 1),
            Distance::Infinite => 0.0,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(n) => write!(f, "{n}"),
            Distance::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Distance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Distance::Infinite),
            other => {
                let n: u32 = other
                    .parse()
                    .map_err(|_| Error::Domain(format!("not a boundary distance: {s:?}")))?;
                Distance::finite(n)
            }
        }
    }
}

impl From<Distance> for String {
    fn from(d: Distance) -> String {
        d.to_string()
    }
}

impl TryFrom<String> for Distance {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Which single boson the boundary operator creates: `a+` (`Plus`) or `b+`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub const ALL: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn flipped(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundaryConfig {
    pub left: Distance,
    pub right: Distance,
    pub sign_left: Sign,
    pub sign_right: Sign,
}

impl BoundaryConfig {
    /// Both boundary operators are `a+`; this is the orientation the
    /// nearest-neighbour tables are quoted in.
    pub fn new(left: Distance, right: Distance) -> Self {
        Self {
            left,
            right,
            sign_left: Sign::Plus,
            sign_right: Sign::Plus,
        }
    }

    pub fn finite(left: u32, right: u32) -> Result<Self> {
        Ok(Self::new(Distance::finite(left)?, Distance::finite(right)?))
    }

    pub fn unbounded() -> Self {
        Self::new(Distance::Infinite, Distance::Infinite)
    }

    pub fn with_signs(mut self, sign_left: Sign, sign_right: Sign) -> Self {
        self.sign_left = sign_left;
        self.sign_right = sign_right;
        self
    }

    /// Spatial reflection of the chain.
    pub fn mirrored(self) -> Self {
        Self {
            left: self.right,
            right: self.left,
            sign_left: self.sign_right,
            sign_right: self.sign_left,
        }
    }

    pub fn is_finite(self) -> bool {
        self.left.is_finite() && self.right.is_finite()
    }

    /// Effective end weights, oriented by the boundary operator signs.
    pub fn end_weights(self) -> (BoundaryWeights, BoundaryWeights) {
        (
            BoundaryWeights::oriented(self.left, self.sign_left),
            BoundaryWeights::oriented(self.right, self.sign_right),
        )
    }
}

impl fmt::Display for BoundaryConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(N_l={}{}, N_r={}{})",
            self.left, self.sign_left, self.right, self.sign_right
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryWeights {
    pub f: f64,
    pub xi_plus: f64,
    pub xi_minus: f64,
    /// Diagonal of `V` in the `(a, b)` basis of the effective end qubit.
    pub v: [f64; 2],
}

impl BoundaryWeights {
    fn from_f(f: f64) -> (f64, f64) {
        ((3.0 + f) / 6.0, (3.0 - f) / 6.0)
    }

    /// End weights for a wing whose boundary operator has the given sign.
    /// An `a+` insertion biases the effective end qubit towards `a` at either
    /// end of the chain.
    pub fn oriented(distance: Distance, sign: Sign) -> Self {
        let f = distance.f();
        let (xi_plus, xi_minus) = Self::from_f(f);
        let v = match sign {
            Sign::Plus => [xi_plus.sqrt(), xi_minus.sqrt()],
            Sign::Minus => [xi_minus.sqrt(), xi_plus.sqrt()],
        };
        Self {
            f,
            xi_plus,
            xi_minus,
            v,
        }
    }

    /// Weight of the `a` state of the effective end qubit.
    pub fn a_weight(&self) -> f64 {
        self.v[0] * self.v[0]
    }

    pub fn b_weight(&self) -> f64 {
        self.v[1] * self.v[1]
    }

    /// `f` carrying the orientation sign: `a_weight = (3 + g)/6`.
    pub fn oriented_f(&self) -> f64 {
        if self.v[0] >= self.v[1] {
            self.f.abs()
        } else {
            -self.f.abs()
        }
    }

    pub fn v_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&self.v)
    }
}

/// `f`, `xi_pm` and `V` for one chain end, with `V = diag(sqrt xi+, sqrt xi-)`
/// on the left and `diag(sqrt xi-, sqrt xi+)` on the right.
///
/// In terms of boundary operators the left matrix belongs to an `a+` cap and
/// the right one to a `b+` cap; [`BoundaryConfig::end_weights`] orients both
/// ends from the actual signs.
pub fn boundary_weights(distance: Distance, side: Side) -> Result<BoundaryWeights> {
    if distance == Distance::Finite(0) {
        return Err(Error::ZeroDistance);
    }
    Ok(match side {
        Side::Left => BoundaryWeights::oriented(distance, Sign::Plus),
        Side::Right => BoundaryWeights::oriented(distance, Sign::Minus),
    })
}

/// Boundary operator viewed as a map from the boundary half-site (qubit) to
/// the full spin-1 site, basis `(+1, 0, -1)`.
fn boundary_insertion(sign: Sign) -> ComplexMatrix {
    let s2 = c(std::f64::consts::SQRT_2);
    let entries = match sign {
        // a+|a> = sqrt2 |2,0>, a+|b> = |1,1>
        Sign::Plus => [s2, ZERO, ZERO, ONE, ZERO, ZERO],
        Sign::Minus => [ZERO, ZERO, ONE, ZERO, ZERO, s2],
    };
    ComplexMatrix::from_vec(3, 2, entries.to_vec()).unwrap()
}

/// Reduced state of the wing's half of site 1, evaluated from the
/// depolarised-singlet form of the wing: insert the boundary boson on the
/// far qubit of `(1-f)/4 I + f |Psi-><Psi-|` and trace out the boundary site.
pub fn boundary_site_rdm(sites: u32, sign: Sign) -> Result<DensityMatrix> {
    let f = Distance::finite(sites)?.f();
    let w = crate::linalg::werner(f);
    let q = crate::linalg::kron(&boundary_insertion(sign), &ComplexMatrix::identity(2));
    let lifted = &(&q * &w) * &q.adjoint();
    let lifted = DensityMatrix::normalized(lifted, vec![3, 2])?;
    partial_trace(&lifted, &[1])
}

/// Two-qubit pure state of a reduced wing. Left: qubits (end, site 1);
/// right: qubits (site L, end). Schmidt coefficients are `sqrt xi_pm`.
pub fn phi_state(weights: &BoundaryWeights, side: Side) -> Vec<Complex64> {
    let [va, vb] = weights.v;
    let psi = singlet();
    let s2 = std::f64::consts::SQRT_2;
    // psi = (|ab> - |ba>)/sqrt2; scale the end-qubit index by v.
    let scale = |end_digit: usize| if end_digit == 0 { va } else { vb };
    (0..4)
        .map(|idx| {
            let end_digit = match side {
                Side::Left => idx >> 1,
                Side::Right => idx & 1,
            };
            psi[idx] * s2 * scale(end_digit)
        })
        .collect()
}
