//! Small dense complex linear algebra for a single qubit.
//!
//! Density matrices are 2×2, superoperators are 4×4 acting on the
//! column-major vectorization `vec(ρ) = (ρ00, ρ10, ρ01, ρ11)`. With this
//! convention `vec(A X B) = (Bᵀ ⊗ A) vec(X)`, so the commutator map
//! `X ↦ [A, X]` has matrix `𝟙 ⊗ A − Aᵀ ⊗ 𝟙`.

use nalgebra::{Matrix2, Matrix4, RowVector4, Vector4};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;
pub type Vec4 = Vector4<C64>;
pub type Row4 = RowVector4<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity2() -> Mat2 {
    Mat2::identity()
}

pub fn sigma_x() -> Mat2 {
    Mat2::new(c(0.0), c(1.0), c(1.0), c(0.0))
}

pub fn sigma_y() -> Mat2 {
    Mat2::new(c(0.0), -I, I, c(0.0))
}

pub fn sigma_z() -> Mat2 {
    Mat2::new(c(1.0), c(0.0), c(0.0), c(-1.0))
}

/// σ₊ = (σ₁ + iσ₂)/2 = |0⟩⟨1|.
pub fn sigma_plus() -> Mat2 {
    Mat2::new(c(0.0), c(1.0), c(0.0), c(0.0))
}

/// σ₋ = (σ₁ − iσ₂)/2 = |1⟩⟨0|.
pub fn sigma_minus() -> Mat2 {
    Mat2::new(c(0.0), c(0.0), c(1.0), c(0.0))
}

pub fn paulis() -> [Mat2; 3] {
    [sigma_x(), sigma_y(), sigma_z()]
}

pub fn vectorize(m: &Mat2) -> Vec4 {
    Vec4::from_column_slice(m.as_slice())
}

pub fn devectorize(v: &Vec4) -> Mat2 {
    Mat2::from_column_slice(v.as_slice())
}

/// Row vector `w` with `w · vec(X) = Tr(W X)`.
pub fn trace_functional(w: &Mat2) -> Row4 {
    vectorize(&w.transpose()).transpose()
}

/// Matrix of `X ↦ A X B`.
pub fn sandwich(a: &Mat2, b: &Mat2) -> Mat4 {
    b.transpose().kronecker(a)
}

pub fn left_mul(a: &Mat2) -> Mat4 {
    sandwich(a, &identity2())
}

pub fn right_mul(b: &Mat2) -> Mat4 {
    sandwich(&identity2(), b)
}

/// Matrix of `X ↦ [A, X]`.
pub fn commutator_matrix(a: &Mat2) -> Mat4 {
    left_mul(a) - right_mul(a)
}

pub fn anticommutator_matrix(a: &Mat2) -> Mat4 {
    left_mul(a) + right_mul(a)
}

pub fn max_abs(m: &Mat2) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermiticity_defect(m: &Mat2) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn is_hermitian(m: &Mat2, tol: f64) -> bool {
    hermiticity_defect(m) <= tol
}

pub fn trace_real(m: &Mat2) -> f64 {
    m.trace().re
}

/// Eigen-decomposition of a Hermitian 2×2 matrix, eigenvalues ascending.
/// Columns of the returned matrix are the eigenvectors.
pub fn hermitian_eigen(m: &Mat2) -> ([f64; 2], Mat2) {
    let h = (m + m.adjoint()) * c(0.5);
    let eig = h.symmetric_eigen();
    let (l0, l1) = (eig.eigenvalues[0], eig.eigenvalues[1]);
    let u = eig.eigenvectors;
    if l0 <= l1 {
        ([l0, l1], u)
    } else {
        let swapped = Mat2::from_columns(&[u.column(1).into_owned(), u.column(0).into_owned()]);
        ([l1, l0], swapped)
    }
}

fn one_norm(m: &Mat4) -> f64 {
    (0..4)
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(A)` with its directional derivatives along `E1`, `E2` and the mixed
/// second derivative `∂²/∂s∂t exp(A + sE1 + tE2)` at zero.
///
/// Passing the same direction twice yields the second derivative along it.
#[derive(Debug, Clone)]
pub struct ExpJet {
    pub value: Mat4,
    pub d1: Mat4,
    pub d2: Mat4,
    pub d12: Mat4,
}

/// Evaluates [`ExpJet`] as the exponential of the block upper-triangular
/// matrix `[[A,E1,E2,0],[0,A,0,E2],[0,0,A,E1],[0,0,0,A]]`, exploiting the
/// block structure: truncated Taylor series after scaling, then repeated
/// squaring.
pub fn exp_jet(a: &Mat4, e1: &Mat4, e2: &Mat4) -> ExpJet {
    let norm = one_norm(a) + one_norm(e1) + one_norm(e2);
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as i32
    } else {
        0
    };
    let scale = c(0.5f64.powi(squarings));
    let (a, e1, e2) = (a * scale, e1 * scale, e2 * scale);

    let mut t = Mat4::identity();
    let mut d1 = Mat4::zeros();
    let mut d2 = Mat4::zeros();
    let mut m = Mat4::zeros();
    let mut jet = ExpJet {
        value: t,
        d1,
        d2,
        d12: m,
    };
    for n in 1..40 {
        let inv = c(1.0 / n as f64);
        let m_next = (d1 * e2 + d2 * e1 + m * a) * inv;
        let d1_next = (t * e1 + d1 * a) * inv;
        let d2_next = (t * e2 + d2 * a) * inv;
        t = (t * a) * inv;
        d1 = d1_next;
        d2 = d2_next;
        m = m_next;
        jet.value += t;
        jet.d1 += d1;
        jet.d2 += d2;
        jet.d12 += m;
        let size = one_norm(&t) + one_norm(&d1) + one_norm(&d2) + one_norm(&m);
        if size < 1e-20 {
            break;
        }
    }
    for _ in 0..squarings {
        let ExpJet { value, d1, d2, d12 } = jet;
        jet = ExpJet {
            value: value * value,
            d1: value * d1 + d1 * value,
            d2: value * d2 + d2 * value,
            d12: value * d12 + d1 * d2 + d2 * d1 + d12 * value,
        };
    }
    jet
}

/// `exp(A)` with its derivatives along a fixed direction `X` and each of
/// several directions `K_k`, and the mixed second derivatives along
/// `(X, K_k)`. Equivalent to one [`exp_jet`] per `K_k`, sharing the work.
#[derive(Debug, Clone)]
pub struct MultiJet {
    pub value: Mat4,
    pub dx: Mat4,
    pub dk: Vec<Mat4>,
    pub dxk: Vec<Mat4>,
}

pub fn exp_multi_jet(a: &Mat4, x: &Mat4, ks: &[Mat4]) -> MultiJet {
    let norm = one_norm(a) + one_norm(x) + ks.iter().map(one_norm).fold(0.0, f64::max);
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as i32
    } else {
        0
    };
    let scale = c(0.5f64.powi(squarings));
    let a = a * scale;
    let x = x * scale;
    let ks: Vec<Mat4> = ks.iter().map(|k| k * scale).collect();
    let p = ks.len();

    let mut t = Mat4::identity();
    let mut tx = Mat4::zeros();
    let mut tk = vec![Mat4::zeros(); p];
    let mut txk = vec![Mat4::zeros(); p];
    let mut jet = MultiJet {
        value: t,
        dx: tx,
        dk: tk.clone(),
        dxk: txk.clone(),
    };
    for n in 1..40 {
        let inv = c(1.0 / n as f64);
        let mut size = 0.0;
        for i in 0..p {
            txk[i] = (tx * ks[i] + tk[i] * x + txk[i] * a) * inv;
            tk[i] = (t * ks[i] + tk[i] * a) * inv;
            jet.dk[i] += tk[i];
            jet.dxk[i] += txk[i];
            size += one_norm(&tk[i]) + one_norm(&txk[i]);
        }
        tx = (t * x + tx * a) * inv;
        t = (t * a) * inv;
        jet.value += t;
        jet.dx += tx;
        size += one_norm(&t) + one_norm(&tx);
        if size < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        let (v, dx) = (jet.value, jet.dx);
        for i in 0..p {
            let dk = jet.dk[i];
            jet.dxk[i] = v * jet.dxk[i] + dx * dk + dk * dx + jet.dxk[i] * v;
            jet.dk[i] = v * dk + dk * v;
        }
        jet.dx = v * dx + dx * v;
        jet.value = v * v;
    }
    jet
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::SMatrix;

    fn random_mat4(seed: u64) -> Mat4 {
        let mut s = seed;
        Mat4::from_fn(|_, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let b = ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
            C64::new(a, b)
        })
    }

    #[test]
    fn vectorization_sandwich_rule() {
        let a = Mat2::new(c(1.0), I, c(2.0), c(-0.5));
        let b = Mat2::new(c(0.3), c(0.0), -I, c(1.5));
        let x = Mat2::new(c(0.2), C64::new(0.1, 0.4), c(-1.0), c(0.7));
        let lhs = vectorize(&(a * x * b));
        let rhs = sandwich(&a, &b) * vectorize(&x);
        assert!((lhs - rhs).norm() < 1e-14);
        let w = Mat2::new(c(0.5), I, c(2.0), c(1.0));
        assert!(((trace_functional(&w) * vectorize(&x))[0] - (w * x).trace()).norm() < 1e-14);
    }

    #[test]
    fn eigen_is_sorted_and_reconstructs() {
        let m = Mat2::new(c(0.2), C64::new(0.1, -0.3), C64::new(0.1, 0.3), c(0.8));
        let (l, u) = hermitian_eigen(&m);
        assert!(l[0] <= l[1]);
        let d = Mat2::from_diagonal(&nalgebra::Vector2::new(c(l[0]), c(l[1])));
        assert!(max_abs(&(u * d * u.adjoint() - m)) < 1e-14);
    }

    #[test]
    fn jet_matches_block_exponential() {
        for seed in 0..5 {
            let a = random_mat4(seed) * c(0.8 + seed as f64);
            let e1 = random_mat4(seed + 100);
            let e2 = random_mat4(seed + 200);
            let jet = exp_jet(&a, &e1, &e2);
            let mut block = SMatrix::<C64, 16, 16>::zeros();
            let put = |blk: &mut SMatrix<C64, 16, 16>, r: usize, col: usize, m: &Mat4| {
                blk.fixed_view_mut::<4, 4>(4 * r, 4 * col).copy_from(m);
            };
            for i in 0..4 {
                put(&mut block, i, i, &a);
            }
            put(&mut block, 0, 1, &e1);
            put(&mut block, 0, 2, &e2);
            put(&mut block, 1, 3, &e2);
            put(&mut block, 2, 3, &e1);
            let ex = block.exp();
            let get = |r: usize, col: usize| ex.fixed_view::<4, 4>(4 * r, 4 * col).into_owned();
            let scale = 1.0 + ex.iter().map(|z| z.norm()).fold(0.0, f64::max) * 16.0;
            assert!(one_norm(&(jet.value - get(0, 0))) < 1e-12 * scale);
            assert!(one_norm(&(jet.d1 - get(0, 1))) < 1e-12 * scale);
            assert!(one_norm(&(jet.d2 - get(0, 2))) < 1e-12 * scale);
            assert!(one_norm(&(jet.d12 - get(0, 3))) < 1e-12 * scale);
        }
    }

    #[test]
    fn multi_jet_matches_single_jets() {
        let a = random_mat4(1) * c(2.0);
        let x = random_mat4(2);
        let ks = [random_mat4(3), random_mat4(4) * c(0.1), random_mat4(5) * c(3.0)];
        let multi = exp_multi_jet(&a, &x, &ks);
        for (i, k) in ks.iter().enumerate() {
            let single = exp_jet(&a, &x, k);
            let scale = 1.0 + one_norm(&single.d12);
            assert!(one_norm(&(multi.value - single.value)) < 1e-12 * scale);
            assert!(one_norm(&(multi.dx - single.d1)) < 1e-12 * scale);
            assert!(one_norm(&(multi.dk[i] - single.d2)) < 1e-12 * scale);
            assert!(one_norm(&(multi.dxk[i] - single.d12)) < 1e-12 * scale);
        }
    }

    #[test]
    fn jet_second_derivative_matches_finite_difference() {
        let a = random_mat4(7);
        let e = random_mat4(8);
        let jet = exp_jet(&a, &e, &e);
        let h = 1e-4;
        let plus = (a + e * c(h)).exp();
        let minus = (a - e * c(h)).exp();
        let fd2 = (plus - a.exp() * c(2.0) + minus) * c(1.0 / (h * h));
        assert!(one_norm(&(fd2 - jet.d12)) < 1e-5);
        let fd1 = (plus - minus) * c(0.5 / h);
        assert!(one_norm(&(fd1 - jet.d1)) < 1e-7);
    }
}
