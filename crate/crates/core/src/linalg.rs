//! Small dense row-major square-matrix helpers.
//!
//! Matrices here are tiny (the ambient dimension of an IFS), so everything is
//! written out directly over `&[f64]` slices of length `d * d`.

pub(crate) const EIGEN_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

pub fn identity(d: usize) -> Vec<f64> {
    let mut m = vec![0.0; d * d];
    for i in 0..d {
        m[i * d + i] = 1.0;
    }
    m
}

pub fn matmul(a: &[f64], b: &[f64], d: usize) -> Vec<f64> {
    let mut out = vec![0.0; d * d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i * d + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..d {
                out[i * d + j] += aik * b[k * d + j];
            }
        }
    }
    out
}

pub fn matvec(a: &[f64], x: &[f64], d: usize) -> Vec<f64> {
    (0..d)
        .map(|i| a[i * d..(i + 1) * d].iter().zip(x).map(|(p, q)| p * q).sum())
        .collect()
}

pub fn transpose(a: &[f64], d: usize) -> Vec<f64> {
    let mut t = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            t[j * d + i] = a[i * d + j];
        }
    }
    t
}

/// `AᵀA`.
pub fn gram(a: &[f64], d: usize) -> Vec<f64> {
    matmul(&transpose(a, d), a, d)
}

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix.
///
/// Returns the eigenvalues and the eigenvectors as the columns of a row-major
/// matrix. Sweeps stop once the off-diagonal mass drops below `tol` relative
/// to the Frobenius norm.
pub fn symmetric_eigen(m: &[f64], d: usize, tol: f64) -> (Vec<f64>, Vec<f64>) {
    let mut a = m.to_vec();
    let mut v = identity(d);
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if scale == 0.0 {
        return (vec![0.0; d], v);
    }
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..d)
            .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * d + j] * a[i * d + j])
            .sum::<f64>()
            .sqrt();
        if off <= tol * scale {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a[p * d + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * d + p];
                let aqq = a[q * d + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let akp = a[k * d + p];
                    let akq = a[k * d + q];
                    a[k * d + p] = c * akp - s * akq;
                    a[k * d + q] = s * akp + c * akq;
                }
                for k in 0..d {
                    let apk = a[p * d + k];
                    let aqk = a[q * d + k];
                    a[p * d + k] = c * apk - s * aqk;
                    a[q * d + k] = s * apk + c * aqk;
                }
                for k in 0..d {
                    let vkp = v[k * d + p];
                    let vkq = v[k * d + q];
                    v[k * d + p] = c * vkp - s * vkq;
                    v[k * d + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..d).map(|i| a[i * d + i]).collect(), v)
}

/// Largest singular value (spectral norm).
///
/// Closed form for `d <= 2`, Jacobi on `AᵀA` otherwise.
pub fn spectral_norm(a: &[f64], d: usize) -> f64 {
    match d {
        0 => 0.0,
        1 => a[0].abs(),
        2 => {
            let fro2 = a.iter().map(|x| x * x).sum::<f64>();
            let det = a[0] * a[3] - a[1] * a[2];
            let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0);
            ((fro2 + disc.sqrt()) / 2.0).sqrt()
        }
        _ => {
            let (evals, _) = symmetric_eigen(&gram(a, d), d, EIGEN_TOL);
            evals.into_iter().fold(0.0_f64, f64::max).max(0.0).sqrt()
        }
    }
}

/// Returns `A` with every singular value above `cap` replaced by `cap`.
pub fn clamp_singular_values(a: &[f64], d: usize, cap: f64) -> Vec<f64> {
    if spectral_norm(a, d) <= cap {
        return a.to_vec();
    }
    if d == 1 {
        return vec![a[0].signum() * cap];
    }
    // A = U S Vᵀ  =>  A V diag(min(s, cap) / s) Vᵀ
    let (evals, v) = symmetric_eigen(&gram(a, d), d, EIGEN_TOL);
    let mut scale = vec![0.0; d * d];
    for (k, &ev) in evals.iter().enumerate() {
        let s = ev.max(0.0).sqrt();
        scale[k * d + k] = if s > cap { cap / s } else { 1.0 };
    }
    let shrink = matmul(&matmul(&v, &scale, d), &transpose(&v, d), d);
    let out = matmul(a, &shrink, d);
    // Guard against rounding pushing the norm a hair above the cap.
    let norm = spectral_norm(&out, d);
    if norm > cap {
        out.iter().map(|x| x * cap / norm).collect()
    } else {
        out
    }
}
