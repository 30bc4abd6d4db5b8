//! Minimal 3×3 real matrix support.
//!
//! The gain algebra only ever needs sums, matrix–vector products, and
//! eigenvalues. The closed-loop matrix is diagonal by construction, so its
//! eigenvalues are read straight off the diagonal; a characteristic-cubic
//! solver covers general matrices so the stability check never silently
//! assumes diagonality.

use num_complex::Complex64;

/// Row-major 3×3 real matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const ZERO: Mat3 = Mat3([[0.0; 3]; 3]);

    pub fn add(&self, other: &Mat3) -> Mat3 {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.0[i][j] + other.0[i][j];
            }
        }
        Mat3(out)
    }

    pub fn mul_vec(&self, v: [f64; 3]) -> [f64; 3] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    pub fn diagonal(&self) -> [f64; 3] {
        [self.0[0][0], self.0[1][1], self.0[2][2]]
    }

    /// True when every off-diagonal entry is exactly zero.
    pub fn is_diagonal(&self) -> bool {
        let m = &self.0;
        m[0][1] == 0.0
            && m[0][2] == 0.0
            && m[1][0] == 0.0
            && m[1][2] == 0.0
            && m[2][0] == 0.0
            && m[2][1] == 0.0
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Sum of the principal 2×2 minors (the λ¹ coefficient of the
    /// characteristic polynomial).
    fn principal_minor_sum(&self) -> f64 {
        let m = &self.0;
        (m[0][0] * m[1][1] - m[0][1] * m[1][0])
            + (m[0][0] * m[2][2] - m[0][2] * m[2][0])
            + (m[1][1] * m[2][2] - m[1][2] * m[2][1])
    }

    /// Eigenvalues in a deterministic order (ascending by real part, then
    /// imaginary part). Diagonal matrices read the diagonal directly —
    /// exact, no root-finding error; everything else goes through the
    /// characteristic cubic λ³ − tr·λ² + m₂·λ − det.
    pub fn eigenvalues(&self) -> [Complex64; 3] {
        let mut roots = if self.is_diagonal() {
            self.diagonal().map(|d| Complex64::new(d, 0.0))
        } else {
            cubic_roots(-self.trace(), self.principal_minor_sum(), -self.det())
        };
        roots.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
        roots
    }
}

/// Roots of the monic cubic x³ + a2·x² + a1·x + a0 with real coefficients,
/// via the depressed cubic: Cardano when one root is real, the
/// trigonometric form when all three are.
fn cubic_roots(a2: f64, a1: f64, a0: f64) -> [Complex64; 3] {
    let shift = a2 / 3.0;
    let p = a1 - a2 * a2 / 3.0;
    let q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;

    if p == 0.0 && q == 0.0 {
        let r = Complex64::new(-shift, 0.0);
        return [r, r, r];
    }

    let discriminant = (q / 2.0) * (q / 2.0) + (p / 3.0) * (p / 3.0) * (p / 3.0);
    if discriminant > 0.0 {
        // One real root. Pick the larger-magnitude cube root to avoid
        // cancellation, recover its partner from u·v = −p/3.
        let s = -q / 2.0;
        let t = discriminant.sqrt();
        let u = if s >= 0.0 {
            (s + t).cbrt()
        } else {
            (s - t).cbrt()
        };
        let v = -p / (3.0 * u);
        let real = u + v - shift;
        let re_pair = -(u + v) / 2.0 - shift;
        let im_pair = (3.0f64.sqrt() / 2.0) * (u - v).abs();
        [
            Complex64::new(real, 0.0),
            Complex64::new(re_pair, im_pair),
            Complex64::new(re_pair, -im_pair),
        ]
    } else {
        // Three real roots (p < 0 here); the acos argument can drift just
        // past ±1 when the discriminant is near zero, so clamp it.
        let r = 2.0 * (-p / 3.0).sqrt();
        let arg = ((3.0 * q) / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        let phi = arg.acos();
        let root = |k: f64| r * ((phi - 2.0 * std::f64::consts::PI * k) / 3.0).cos() - shift;
        [
            Complex64::new(root(0.0), 0.0),
            Complex64::new(root(1.0), 0.0),
            Complex64::new(root(2.0), 0.0),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_roots_close(got: [Complex64; 3], want: [(f64, f64); 3], tol: f64) {
        for (g, (re, im)) in got.iter().zip(want) {
            assert!(
                (g.re - re).abs() <= tol && (g.im - im).abs() <= tol,
                "root {g} vs expected {re}+{im}i (all: {got:?})"
            );
        }
    }

    #[test]
    fn add_and_mul_vec() {
        let a = Mat3([[1.0, 2.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 2.0]]);
        let b = Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 1.0], [0.0, 0.0, 1.0]]);
        assert_eq!(
            a.add(&b),
            Mat3([[2.0, 2.0, 0.0], [0.0, 2.0, 1.0], [0.0, 0.0, 3.0]])
        );
        assert_eq!(a.mul_vec([1.0, 1.0, 1.0]), [3.0, 1.0, 2.0]);
    }

    #[test]
    fn diagonal_detection_and_exact_eigenvalues() {
        let d = Mat3([[-8.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]]);
        assert!(d.is_diagonal());
        let eig = d.eigenvalues();
        assert_eq!(eig[0], Complex64::new(-8.0, 0.0));
        assert_eq!(eig[1], Complex64::new(-1.0, 0.0));
        assert_eq!(eig[2], Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn triangular_matrix_uses_cubic_fallback() {
        let m = Mat3([[2.0, 1.0, 0.0], [0.0, 3.0, 0.0], [0.0, 0.0, 4.0]]);
        assert!(!m.is_diagonal());
        assert_roots_close(m.eigenvalues(), [(2.0, 0.0), (3.0, 0.0), (4.0, 0.0)], 1e-9);
    }

    #[test]
    fn complex_pair_from_companion_matrix() {
        // Companion matrix of (λ+1)(λ²+1) = λ³ + λ² + λ + 1.
        let m = Mat3([[0.0, 0.0, -1.0], [1.0, 0.0, -1.0], [0.0, 1.0, -1.0]]);
        assert_roots_close(
            m.eigenvalues(),
            [(-1.0, 0.0), (0.0, -1.0), (0.0, 1.0)],
            1e-9,
        );
    }

    #[test]
    fn repeated_root_on_cubic_path() {
        // (λ−2)³ via a non-diagonal matrix.
        let m = Mat3([[2.0, 1.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 2.0]]);
        assert_roots_close(m.eigenvalues(), [(2.0, 0.0), (2.0, 0.0), (2.0, 0.0)], 1e-9);
    }

    #[test]
    fn double_root_hits_zero_discriminant_branch() {
        // (λ−1)²(λ−4) = λ³ − 6λ² + 9λ − 4: discriminant is exactly zero.
        let got = cubic_roots(-6.0, 9.0, -4.0);
        let mut roots: Vec<f64> = got.iter().map(|z| z.re).collect();
        roots.sort_by(f64::total_cmp);
        assert!((roots[0] - 1.0).abs() <= 1e-9);
        assert!((roots[1] - 1.0).abs() <= 1e-9);
        assert!((roots[2] - 4.0).abs() <= 1e-9);
        assert!(got.iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn eigenvalue_order_is_deterministic() {
        let m = Mat3([[0.0, 0.0, -1.0], [1.0, 0.0, -1.0], [0.0, 1.0, -1.0]]);
        assert_eq!(m.eigenvalues(), m.eigenvalues());
        // Ascending by (re, im): −1 first, then −i before +i.
        let e = m.eigenvalues();
        assert!(e[0].re <= e[1].re && e[1].re <= e[2].re);
        assert!(e[1].im <= e[2].im);
    }
}
