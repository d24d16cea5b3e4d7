//! Small dense linear-algebra helpers on top of `nalgebra`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

pub type RMat = DMatrix<f64>;
pub type CMat = DMatrix<Complex64>;

/// Standard symplectic form `Ω = [[0, I], [-I, 0]]` on `ℝ^{2d}`.
pub fn omega(d: usize) -> RMat {
    let mut o = RMat::zeros(2 * d, 2 * d);
    for i in 0..d {
        o[(i, d + i)] = 1.0;
        o[(d + i, i)] = -1.0;
    }
    o
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn max_abs(m: &RMat) -> f64 {
    m.iter().fold(0.0f64, |a, &b| a.max(b.abs()))
}

pub fn max_abs_c(m: &CMat) -> f64 {
    m.iter().fold(0.0f64, |a, b| a.max(b.norm()))
}

/// Splits a `2d × 2d` matrix into its `d × d` blocks `(A, B, C, D)`.
pub fn blocks(m: &RMat) -> (RMat, RMat, RMat, RMat) {
    let d = m.nrows() / 2;
    (
        m.view((0, 0), (d, d)).into_owned(),
        m.view((0, d), (d, d)).into_owned(),
        m.view((d, 0), (d, d)).into_owned(),
        m.view((d, d), (d, d)).into_owned(),
    )
}

pub fn from_blocks(a: &RMat, b: &RMat, c: &RMat, d: &RMat) -> RMat {
    let n = a.nrows();
    let mut m = RMat::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(a);
    m.view_mut((0, n), (n, n)).copy_from(b);
    m.view_mut((n, 0), (n, n)).copy_from(c);
    m.view_mut((n, n), (n, n)).copy_from(d);
    m
}

pub fn det_c(m: &CMat) -> Complex64 {
    if m.nrows() == 0 {
        return Complex64::new(1.0, 0.0);
    }
    m.clone().lu().determinant()
}

/// Largest over smallest singular value.
pub fn condition_number_c(m: &CMat) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0f64, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Continuous phase tracker: feeds successive complex samples and keeps the
/// unwrapped argument.
#[derive(Debug, Clone)]
pub struct PhaseTracker {
    unwrapped: f64,
    last: f64,
}

impl PhaseTracker {
    pub fn new(start: Complex64) -> Self {
        let a = start.arg();
        Self { unwrapped: a, last: a }
    }

    /// Returns the step taken (in radians) by the unwrapped phase.
    pub fn push(&mut self, z: Complex64) -> f64 {
        let a = z.arg();
        let mut d = a - self.last;
        while d > PI {
            d -= 2.0 * PI;
        }
        while d < -PI {
            d += 2.0 * PI;
        }
        self.unwrapped += d;
        self.last = a;
        d
    }

    pub fn phase(&self) -> f64 {
        self.unwrapped
    }
}

pub fn fmt_matrix(m: &RMat) -> String {
    let mut s = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:.6e}", m[(i, j)])).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}
