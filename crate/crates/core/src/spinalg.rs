//! Spin-½ operators, the ½⊗½ Clebsch–Gordan map and centre-of-mass coordinates.
//!
//! Single-spin basis order is (+½, −½); coupled basis order is
//! (|1 1⟩, |1 0⟩, |1 −1⟩, |0 0⟩); uncoupled pair order is
//! (|+ +⟩, |+ −⟩, |− +⟩, |− −⟩).

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinMatrix(pub [[C64; 2]; 2]);

impl SpinMatrix {
    pub fn zero() -> Self {
        SpinMatrix([[C64::new(0.0, 0.0); 2]; 2])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        m.0[0][0] = C64::new(1.0, 0.0);
        m.0[1][1] = C64::new(1.0, 0.0);
        m
    }

    pub fn from_real(r: [[f64; 2]; 2]) -> Self {
        SpinMatrix(r.map(|row| row.map(|v| C64::new(v, 0.0))))
    }

    pub fn scale(self, k: C64) -> Self {
        SpinMatrix(self.0.map(|row| row.map(|v| v * k)))
    }

    pub fn adjoint(self) -> Self {
        let m = self.0;
        SpinMatrix([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn apply(self, v: [C64; 2]) -> [C64; 2] {
        let m = self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    pub fn max_abs_diff(self, other: Self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        d
    }
}

impl Add for SpinMatrix {
    type Output = SpinMatrix;
    fn add(self, o: SpinMatrix) -> SpinMatrix {
        let mut m = self;
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] += o.0[i][j];
            }
        }
        m
    }
}

impl Sub for SpinMatrix {
    type Output = SpinMatrix;
    fn sub(self, o: SpinMatrix) -> SpinMatrix {
        self + o.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for SpinMatrix {
    type Output = SpinMatrix;
    fn mul(self, o: SpinMatrix) -> SpinMatrix {
        let mut m = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = self.0[i][0] * o.0[0][j] + self.0[i][1] * o.0[1][j];
            }
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpinOp {
    S1,
    S2,
    S3,
    Splus,
    Sminus,
}

/// `S^i = σ^i/2`, `S^± = S¹ ± iS²`.
pub fn spin_op(op: SpinOp) -> SpinMatrix {
    let h = 0.5;
    let i = C64::new(0.0, 0.5);
    let z = C64::new(0.0, 0.0);
    match op {
        SpinOp::S1 => SpinMatrix::from_real([[0.0, h], [h, 0.0]]),
        SpinOp::S2 => SpinMatrix([[z, -i], [i, z]]),
        SpinOp::S3 => SpinMatrix::from_real([[h, 0.0], [0.0, -h]]),
        SpinOp::Splus => SpinMatrix::from_real([[0.0, 1.0], [0.0, 0.0]]),
        SpinOp::Sminus => SpinMatrix::from_real([[0.0, 0.0], [1.0, 0.0]]),
    }
}

pub fn spin_ops() -> [(SpinOp, SpinMatrix); 5] {
    [SpinOp::S1, SpinOp::S2, SpinOp::S3, SpinOp::Splus, SpinOp::Sminus].map(|op| (op, spin_op(op)))
}

/// Index of a spin projection ±½ in the (+½, −½) basis.
pub fn spin_index(s: f64) -> Result<usize> {
    if s == 0.5 {
        Ok(0)
    } else if s == -0.5 {
        Ok(1)
    } else {
        Err(Error::InvalidChannel(format!("spin projection {s} is not ±1/2")))
    }
}

/// Coupled-basis label σ = (S, s).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinChannel {
    #[serde(rename = "S")]
    pub total: i32,
    #[serde(rename = "s")]
    pub proj: i32,
}

impl SpinChannel {
    pub const ALL: [SpinChannel; 4] = [
        SpinChannel { total: 1, proj: 1 },
        SpinChannel { total: 1, proj: 0 },
        SpinChannel { total: 1, proj: -1 },
        SpinChannel { total: 0, proj: 0 },
    ];

    pub fn new(total: i32, proj: i32) -> Result<Self> {
        if !(total == 0 || total == 1) || proj.abs() > total {
            return Err(Error::InvalidChannel(format!("(S, s) = ({total}, {proj})")));
        }
        Ok(SpinChannel { total, proj })
    }

    pub fn index(self) -> usize {
        match (self.total, self.proj) {
            (1, 1) => 0,
            (1, 0) => 1,
            (1, -1) => 2,
            _ => 3,
        }
    }

    /// (−1)^S
    pub fn parity(self) -> f64 {
        if self.total == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

impl std::fmt::Display for SpinChannel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.total, self.proj)
    }
}

/// Phase convention of the coupled basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CgcConvention {
    #[default]
    CondonShortley,
    /// Condon–Shortley with the singlet column negated.
    FlippedSinglet,
}

impl CgcConvention {
    pub fn name(self) -> &'static str {
        match self {
            CgcConvention::CondonShortley => "condon-shortley",
            CgcConvention::FlippedSinglet => "flipped-singlet",
        }
    }
}

/// ⟨½ s1 ½ s2 | S s⟩ (Condon–Shortley).
pub fn cgc(total: i32, proj: i32, s1: f64, s2: f64) -> Result<f64> {
    cgc_with(CgcConvention::CondonShortley, total, proj, s1, s2)
}

pub fn cgc_with(conv: CgcConvention, total: i32, proj: i32, s1: f64, s2: f64) -> Result<f64> {
    let ch = SpinChannel::new(total, proj)?;
    let (i1, i2) = (spin_index(s1)?, spin_index(s2)?);
    Ok(cgc_matrix(conv)[ch.index()][2 * i1 + i2])
}

/// Rows: coupled states; columns: uncoupled pair states.
pub fn cgc_matrix(conv: CgcConvention) -> [[f64; 4]; 4] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let sign = match conv {
        CgcConvention::CondonShortley => 1.0,
        CgcConvention::FlippedSinglet => -1.0,
    };
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, r, r, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, sign * r, -sign * r, 0.0],
    ]
}

fn apply4(m: &[[f64; 4]; 4], v: [C64; 4], transpose: bool) -> [C64; 4] {
    let mut out = [C64::new(0.0, 0.0); 4];
    for i in 0..4 {
        for j in 0..4 {
            let w = if transpose { m[j][i] } else { m[i][j] };
            out[i] += v[j] * w;
        }
    }
    out
}

/// Uncoupled amplitudes → coupled amplitudes.
pub fn couple(pair: [C64; 4]) -> [C64; 4] {
    apply4(&cgc_matrix(CgcConvention::CondonShortley), pair, false)
}

pub fn decouple(coupled: [C64; 4]) -> [C64; 4] {
    apply4(&cgc_matrix(CgcConvention::CondonShortley), coupled, true)
}

/// Two-particle point in relative/centre-of-mass coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComPoint {
    /// relative coordinate x = x1 − x2
    pub rel: [f64; 3],
    /// centre of mass X = (x1 + x2)/2
    pub cm: [f64; 3],
}

impl ComPoint {
    pub fn new(rel: [f64; 3], cm: [f64; 3]) -> Self {
        ComPoint { rel, cm }
    }

    pub fn rel_plus(&self) -> C64 {
        C64::new(self.rel[0], self.rel[1])
    }

    pub fn rel_minus(&self) -> C64 {
        C64::new(self.rel[0], -self.rel[1])
    }

    pub fn cm_plus(&self) -> C64 {
        C64::new(self.cm[0], self.cm[1])
    }

    pub fn cm_minus(&self) -> C64 {
        C64::new(self.cm[0], -self.cm[1])
    }

    /// Q² = |x|² + |X|²
    pub fn q2(&self) -> f64 {
        self.rel.iter().chain(self.cm.iter()).map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.q2().sqrt()
    }

    pub fn neg(&self) -> ComPoint {
        ComPoint { rel: self.rel.map(|v| -v), cm: self.cm.map(|v| -v) }
    }

    pub fn scaled(&self, k: f64) -> ComPoint {
        ComPoint { rel: self.rel.map(|v| k * v), cm: self.cm.map(|v| k * v) }
    }
}

pub fn to_com(x1: [f64; 3], x2: [f64; 3]) -> ComPoint {
    ComPoint {
        rel: [0, 1, 2].map(|i| x1[i] - x2[i]),
        cm: [0, 1, 2].map(|i| 0.5 * (x1[i] + x2[i])),
    }
}

pub fn from_com(p: &ComPoint) -> ([f64; 3], [f64; 3]) {
    (
        [0, 1, 2].map(|i| p.cm[i] + 0.5 * p.rel[i]),
        [0, 1, 2].map(|i| p.cm[i] - 0.5 * p.rel[i]),
    )
}
