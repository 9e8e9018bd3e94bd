//! Dense decompositions shared by every solver.
//!
//! All routines work on `nalgebra::DMatrix<f64>` and return eigen/singular
//! values sorted in descending order. The two cubic kernels (symmetric
//! eigendecomposition and thin QR) run on faer's blocked implementations. Basis columns follow one sign
//! convention: the entry of largest magnitude in each column is positive.

use std::cell::Cell;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

pub type Mat = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Generalized eigenvalues at or below this are treated as zero.
///
/// Discriminant eigenvalues are ratios of between-class to (regularized)
/// total or within-class scatter, so they carry no units and an absolute
/// floor is meaningful.
pub const EIGENVALUE_FLOOR: f64 = 1e-12;

thread_local! {
    static SVD_CALLS: Cell<usize> = const { Cell::new(0) };
}

/// Number of [`condensed_svd`] invocations made on the current thread.
pub fn svd_invocations() -> usize {
    SVD_CALLS.with(Cell::get)
}

/// Condensed SVD of a data block `M`, stated in terms of `M Mᵀ = U Γ Uᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CondensedSvd {
    /// Orthonormal `d x t` basis of the range of `M`.
    pub left_basis: Mat,
    /// The `t` retained eigenvalues of `M Mᵀ` (squared singular values of `M`).
    pub spectrum: Vector,
}

impl CondensedSvd {
    pub fn rank(&self) -> usize {
        self.spectrum.len()
    }

    /// `U Γ Uᵀ`.
    pub fn reconstruct(&self) -> Mat {
        let scaled = scale_columns(&self.left_basis, self.spectrum.iter().copied());
        &scaled * self.left_basis.transpose()
    }
}

/// Eigenpairs sorted by descending eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct EigPairs {
    pub vectors: Mat,
    pub values: Vector,
}

impl EigPairs {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Numerical-rank cutoff for a PSD spectrum: `max(rows, cols) * eps * largest`.
pub fn rank_tolerance(rows: usize, cols: usize, largest: f64) -> f64 {
    rows.max(cols).max(1) as f64 * f64::EPSILON * largest
}

pub fn ensure_finite(m: &Mat, what: &str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::input(format!("{what} contains non-finite entries")))
    }
}

/// True when the spread of centered data (`centered_sq`, a sum of squares)
/// is at rounding level relative to the raw data (`raw_sq`, same scaling).
pub fn negligible_spread(centered_sq: f64, raw_sq: f64) -> bool {
    !(centered_sq > 1e-24 * raw_sq)
}

pub fn max_abs(m: &Mat) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// Flip columns so that each column's largest-magnitude entry is positive.
pub fn normalize_signs(m: &mut Mat) {
    for mut col in m.column_iter_mut() {
        let mut pivot = 0.0_f64;
        for &v in col.iter() {
            if v.abs() > pivot.abs() {
                pivot = v;
            }
        }
        if pivot < 0.0 {
            col.neg_mut();
        }
    }
}

pub fn scale_columns(m: &Mat, factors: impl IntoIterator<Item = f64>) -> Mat {
    let mut out = m.clone();
    for (mut col, f) in out.column_iter_mut().zip(factors) {
        col *= f;
    }
    out
}

pub fn symmetrize(m: &Mat) -> Mat {
    (m + m.transpose()) * 0.5
}

fn to_faer(m: &Mat) -> faer::Mat<f64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Full eigendecomposition of a symmetric matrix, all `d` pairs, descending.
pub fn sym_eig_full(s: &Mat) -> EigPairs {
    let d = s.nrows();
    if d == 0 {
        return EigPairs {
            vectors: Mat::zeros(0, 0),
            values: Vector::zeros(0),
        };
    }
    let sym = symmetrize(s);
    let (values, vectors) = match to_faer(&sym).self_adjoint_eigen(faer::Side::Lower) {
        Ok(eig) => {
            let (vals, vecs) = (eig.S(), eig.U());
            (
                Vector::from_fn(d, |i, _| vals[i]),
                Mat::from_fn(d, d, |r, c| vecs[(r, c)]),
            )
        }
        // Non-convergence is rare; the unblocked solver is the fallback.
        Err(_) => {
            let eig = SymmetricEigen::new(sym);
            (eig.eigenvalues, eig.eigenvectors)
        }
    };
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let sorted = Vector::from_iterator(d, order.iter().map(|&i| values[i]));
    let mut vectors = Mat::from_fn(d, d, |r, c| vectors[(r, order[c])]);
    normalize_signs(&mut vectors);
    EigPairs {
        vectors,
        values: sorted,
    }
}

fn keep_leading(pairs: EigPairs, count: usize) -> EigPairs {
    EigPairs {
        vectors: pairs.vectors.columns(0, count).into_owned(),
        values: pairs.values.rows(0, count).into_owned(),
    }
}

fn check_symmetric(s: &Mat, what: &str) -> Result<()> {
    if !s.is_square() {
        return Err(Error::input(format!(
            "{what} must be square, got {}x{}",
            s.nrows(),
            s.ncols()
        )));
    }
    ensure_finite(s, what)?;
    let asym = max_abs(&(s - s.transpose()));
    if asym > 1e-8 * max_abs(s) {
        return Err(Error::input(format!(
            "{what} is not symmetric (max asymmetry {asym:e})"
        )));
    }
    Ok(())
}

/// Eigendecomposition of a symmetric PSD matrix, keeping only the components
/// above the numerical-rank tolerance.
pub fn sym_psd_eig(s: &Mat) -> Result<EigPairs> {
    check_symmetric(s, "symmetric PSD input")?;
    let pairs = sym_eig_full(s);
    let largest = pairs.values.iter().copied().fold(0.0, f64::max);
    let tol = rank_tolerance(s.nrows(), s.nrows(), largest);
    let kept = pairs.values.iter().take_while(|&&v| v > tol).count();
    Ok(keep_leading(pairs, kept))
}

/// Condensed SVD of a `d x m` block `M`, returned as the factorization
/// `M Mᵀ = U Γ Uᵀ` restricted to components above tolerance.
///
/// The eigenproblem is solved on the smaller Gram matrix. When `d > m` the
/// left factors are recovered as `M V Γ^{-1/2}` and re-orthonormalized.
pub fn condensed_svd(m: &Mat) -> Result<CondensedSvd> {
    ensure_finite(m, "condensed SVD input")?;
    SVD_CALLS.with(|c| c.set(c.get() + 1));

    let (d, k) = m.shape();
    if d == 0 || k == 0 {
        return Ok(CondensedSvd {
            left_basis: Mat::zeros(d, 0),
            spectrum: Vector::zeros(0),
        });
    }

    let wide = d <= k;
    let gram = if wide {
        m * m.transpose()
    } else {
        m.transpose() * m
    };
    let pairs = sym_eig_full(&gram);
    let largest = pairs.values[0].max(0.0);
    let tol = rank_tolerance(d, k, largest);
    let rank = pairs.values.iter().take_while(|&&v| v > tol).count();
    let pairs = keep_leading(pairs, rank);

    let left_basis = if wide {
        pairs.vectors
    } else {
        let inv_sqrt = pairs.values.iter().map(|v| v.sqrt().recip());
        let raw = scale_columns(&(m * &pairs.vectors), inv_sqrt);
        let mut basis = reorthonormalize(raw);
        normalize_signs(&mut basis);
        basis
    };

    Ok(CondensedSvd {
        left_basis,
        spectrum: pairs.values,
    })
}

/// Thin QR with the sign of `R`'s diagonal made positive, so nearly
/// orthonormal input is perturbed as little as possible.
fn reorthonormalize(u: Mat) -> Mat {
    let (d, t) = u.shape();
    if t == 0 {
        return u;
    }
    let qr = to_faer(&u).qr();
    let (q, r) = (qr.compute_thin_Q(), qr.thin_R());
    Mat::from_fn(d, t, |i, j| if r[(j, j)] < 0.0 { -q[(i, j)] } else { q[(i, j)] })
}

/// Slow reference solver for `Sreg⁻¹ Sb v = λ v` with `Vᵀ Sreg V = I`.
///
/// Whitens with the Cholesky factor `Sreg = L Lᵀ`, solves the symmetric
/// problem `L⁻¹ Sb L⁻ᵀ = W Λ Wᵀ`, and maps back with `V = L⁻ᵀ W`. Only pairs
/// with non-negligible eigenvalue are kept.
pub fn gen_eig_oracle(sb: &Mat, sreg: &Mat) -> Result<EigPairs> {
    check_symmetric(sb, "between-class matrix")?;
    check_symmetric(sreg, "regularized metric")?;
    if sb.shape() != sreg.shape() {
        return Err(Error::input(format!(
            "shape mismatch: {:?} vs {:?}",
            sb.shape(),
            sreg.shape()
        )));
    }
    let d = sb.nrows();
    if d == 0 {
        return Ok(EigPairs {
            vectors: Mat::zeros(0, 0),
            values: Vector::zeros(0),
        });
    }

    let metric = sym_eig_full(sreg);
    let max_eig = metric.values[0];
    let min_eig = metric.values[d - 1];
    if !(max_eig > 0.0) || min_eig <= 1e-12 * max_eig {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: min_eig,
            max_eigenvalue: max_eig,
        });
    }
    // Triangular solves keep the range and null parts of an ill-conditioned
    // metric apart far better than an explicit inverse square root.
    let factor = symmetrize(sreg)
        .cholesky()
        .ok_or(Error::NotPositiveDefinite {
            min_eigenvalue: min_eig,
            max_eigenvalue: max_eig,
        })?
        .l();
    let half = factor
        .solve_lower_triangular(sb)
        .ok_or_else(|| Error::degenerate("singular Cholesky factor"))?;
    let whitened = factor
        .solve_lower_triangular(&half.transpose())
        .ok_or_else(|| Error::degenerate("singular Cholesky factor"))?;
    let whitened = symmetrize(&whitened);
    let pairs = sym_eig_full(&whitened);
    // Rounding in `sb` is amplified by up to `1 / min_eig` when whitening.
    let largest = pairs.values[0].max(0.0);
    let tol = rank_tolerance(d, d, largest)
        .max(rank_tolerance(d, d, sb.norm() / min_eig))
        .max(EIGENVALUE_FLOOR);
    let kept = pairs.values.iter().take_while(|&&v| v > tol).count();
    let pairs = keep_leading(pairs, kept);

    let mut vectors = factor
        .transpose()
        .solve_upper_triangular(&pairs.vectors)
        .ok_or_else(|| Error::degenerate("singular Cholesky factor"))?;
    normalize_signs(&mut vectors);
    Ok(EigPairs {
        vectors,
        values: pairs.values,
    })
}

/// Solve `A X = B` for symmetric positive definite `A`.
pub fn spd_solve(a: &Mat, b: &Mat) -> Result<Mat> {
    let chol = a.clone().cholesky().ok_or_else(|| {
        let eig = sym_eig_full(a);
        Error::NotPositiveDefinite {
            min_eigenvalue: eig.values.iter().copied().fold(f64::INFINITY, f64::min),
            max_eigenvalue: eig.values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    })?;
    Ok(chol.solve(b))
}
