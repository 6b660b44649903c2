//! Fixed-size 3-vector helpers and a 3×3 matrix with closed-form inverse.

use std::fmt;
use std::ops::Mul;

pub type Vec3 = [f64; 3];

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn scale(a: Vec3, k: f64) -> Vec3 {
    a.map(|x| x * k)
}

/// A 3×3 real matrix stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix3 {
    rows: [[f64; 3]; 3],
}

impl Matrix3 {
    pub const IDENTITY: Matrix3 = Matrix3 {
        rows: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    pub const fn from_rows(rows: [[f64; 3]; 3]) -> Self {
        Self { rows }
    }

    pub fn from_columns(cols: [Vec3; 3]) -> Self {
        Self::from_rows(cols).transpose()
    }

    pub fn rows(&self) -> [[f64; 3]; 3] {
        self.rows
    }

    pub fn row(&self, i: usize) -> Vec3 {
        self.rows[i]
    }

    pub fn column(&self, j: usize) -> Vec3 {
        [self.rows[0][j], self.rows[1][j], self.rows[2][j]]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i][j]
    }

    pub fn transpose(&self) -> Self {
        let r = &self.rows;
        Self::from_rows([
            [r[0][0], r[1][0], r[2][0]],
            [r[0][1], r[1][1], r[2][1]],
            [r[0][2], r[1][2], r[2][2]],
        ])
    }

    /// Scalar triple product of the columns.
    pub fn determinant(&self) -> f64 {
        dot(self.column(0), cross(self.column(1), self.column(2)))
    }

    /// Transposed cofactor matrix.
    pub fn adjugate(&self) -> Self {
        // Rows of the adjugate are cross products of column pairs.
        let (c0, c1, c2) = (self.column(0), self.column(1), self.column(2));
        Self::from_rows([cross(c1, c2), cross(c2, c0), cross(c0, c1)])
    }

    /// Adjugate over determinant; `None` when the determinant is zero or the
    /// result is not finite.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.determinant();
        if det == 0.0 {
            return None;
        }
        let inv = self.adjugate().scaled(1.0 / det);
        inv.is_finite().then_some(inv)
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self::from_rows(self.rows.map(|r| r.map(|x| x * k)))
    }

    pub fn is_finite(&self) -> bool {
        self.rows.iter().flatten().all(|x| x.is_finite())
    }

    pub fn mul_vec(&self, v: Vec3) -> Vec3 {
        self.rows.map(|r| dot(r, v))
    }

    /// Rows on separate lines, entries fixed to `decimals` places and
    /// sign-aligned.
    pub fn formatted(&self, decimals: usize) -> String {
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&x| format_fixed(x, decimals))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Matrix3) -> f64 {
        self.rows
            .iter()
            .flatten()
            .zip(other.rows.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Mul for Matrix3 {
    type Output = Matrix3;

    fn mul(self, rhs: Matrix3) -> Matrix3 {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = dot(self.rows[i], rhs.column(j));
            }
        }
        Matrix3::from_rows(out)
    }
}

impl Mul<Vec3> for Matrix3 {
    type Output = Vec3;

    fn mul(self, rhs: Vec3) -> Vec3 {
        self.mul_vec(rhs)
    }
}

/// Three decimals per entry, one row per line.
impl fmt::Display for Matrix3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.formatted(3))
    }
}

/// Fixed-point text; values that round to zero lose their minus sign.
pub fn format_decimal(x: f64, decimals: usize) -> String {
    let s = format!("{:.*}", decimals, x);
    match s.strip_prefix('-') {
        Some(rest) if rest.chars().all(|c| c == '0' || c == '.') => rest.to_string(),
        _ => s,
    }
}

fn format_fixed(x: f64, decimals: usize) -> String {
    let s = format_decimal(x, decimals);
    if s.starts_with('-') {
        s
    } else {
        format!(" {s}")
    }
}
