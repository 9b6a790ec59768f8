//! Conjugate gradients for the symmetric positive (semi-)definite systems of
//! the time step.

use crate::error::{Error, Result};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn remove_mean(v: &mut [f64]) {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= mean);
}

/// Solve `A x = b` in place, starting from the incoming `x`.
///
/// With `singular_constant_mode` the operator is assumed to have the
/// constants as its kernel (pure Neumann Laplacian): the right-hand side is
/// made compatible by mean subtraction and the iterate is kept mean-free.
/// Returns the number of iterations; converged means
/// `|b - A x| <= tol |b|` in the Euclidean norm.
pub fn conjugate_gradient(
    name: &'static str,
    mut apply: impl FnMut(&[f64], &mut [f64]),
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
    singular_constant_mode: bool,
) -> Result<usize> {
    let n = b.len();
    let mut rhs = b.to_vec();
    if singular_constant_mode {
        remove_mean(&mut rhs);
        remove_mean(x);
    }
    let b_norm = dot(&rhs, &rhs).sqrt();
    if b_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(0);
    }
    let mut ap = vec![0.0; n];
    apply(x, &mut ap);
    let mut r: Vec<f64> = rhs.iter().zip(&ap).map(|(b, a)| b - a).collect();
    if singular_constant_mode {
        remove_mean(&mut r);
    }
    let mut rr = dot(&r, &r);
    let target = tol * b_norm;
    if rr.sqrt() <= target {
        return Ok(0);
    }
    let mut p = r.clone();
    for it in 1..=max_iter {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap.is_nan() || pap <= 0.0 {
            return Err(Error::NoConvergence {
                solver: name,
                iterations: it,
                residual: rr.sqrt() / b_norm,
            });
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        if rr_new.sqrt() <= target {
            if singular_constant_mode {
                remove_mean(x);
            }
            return Ok(it);
        }
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    Err(Error::NoConvergence {
        solver: name,
        iterations: max_iter,
        residual: rr.sqrt() / b_norm,
    })
}

/// Solve the nonsymmetric system `A x = b` in place by BiCGSTAB, starting
/// from the incoming `x`. Same convergence criterion as
/// [`conjugate_gradient`].
pub fn bicgstab(
    name: &'static str,
    mut apply: impl FnMut(&[f64], &mut [f64]),
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> Result<usize> {
    let n = b.len();
    let b_norm = dot(b, b).sqrt();
    if b_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(0);
    }
    let target = tol * b_norm;
    let mut ax = vec![0.0; n];
    apply(x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    if dot(&r, &r).sqrt() <= target {
        return Ok(0);
    }
    let shadow = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut t = vec![0.0; n];
    let fail = |it: usize, r: &[f64]| Error::NoConvergence {
        solver: name,
        iterations: it,
        residual: dot(r, r).sqrt() / b_norm,
    };
    for it in 1..=max_iter {
        let rho_new = dot(&shadow, &r);
        if rho_new == 0.0 || omega == 0.0 {
            return Err(fail(it, &r));
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        apply(&p, &mut v);
        let sv = dot(&shadow, &v);
        if sv == 0.0 {
            return Err(fail(it, &r));
        }
        alpha = rho / sv;
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        if dot(&s, &s).sqrt() <= target {
            for i in 0..n {
                x[i] += alpha * p[i];
            }
            return Ok(it);
        }
        apply(&s, &mut t);
        let tt = dot(&t, &t);
        omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
        for i in 0..n {
            x[i] += alpha * p[i] + omega * s[i];
            r[i] = s[i] - omega * t[i];
        }
        if dot(&r, &r).sqrt() <= target {
            return Ok(it);
        }
    }
    Err(fail(max_iter, &r))
}

#[cfg(test)]
mod tests {
    use super::*;

    // 1D Neumann Laplacian (negated), kernel = constants
    fn neg_lap_neumann(x: &[f64], out: &mut [f64]) {
        let n = x.len();
        for i in 0..n {
            let l = if i == 0 { x[0] } else { x[i - 1] };
            let r = if i + 1 == n { x[n - 1] } else { x[i + 1] };
            out[i] = 2.0 * x[i] - l - r;
        }
    }

    #[test]
    fn solves_spd_tridiagonal() {
        let n = 50;
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let mut x = vec![0.0; n];
        let apply = |v: &[f64], out: &mut [f64]| {
            for i in 0..v.len() {
                let l = if i == 0 { 0.0 } else { v[i - 1] };
                let r = if i + 1 == v.len() { 0.0 } else { v[i + 1] };
                out[i] = 3.0 * v[i] - l - r;
            }
        };
        let its = conjugate_gradient("test", apply, &b, &mut x, 1e-12, 500, false).unwrap();
        assert!(its > 0);
        let mut ax = vec![0.0; n];
        apply(&x, &mut ax);
        for (a, bb) in ax.iter().zip(&b) {
            assert!((a - bb).abs() < 1e-10);
        }
    }

    #[test]
    fn singular_neumann_system_returns_mean_free_solution() {
        let n = 40;
        // incompatible rhs: the constant part is projected away
        let b: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64 * 0.3).cos()).collect();
        let mut x = vec![5.0; n];
        conjugate_gradient("poisson", neg_lap_neumann, &b, &mut x, 1e-12, 1000, true).unwrap();
        let mean = x.iter().sum::<f64>() / n as f64;
        assert!(mean.abs() < 1e-12);
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let mut x = vec![1.0; 8];
        let its = conjugate_gradient("poisson", neg_lap_neumann, &[0.0; 8], &mut x, 1e-10, 10, true).unwrap();
        assert_eq!(its, 0);
        assert!(x.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn bicgstab_solves_convection_diffusion() {
        // upwind-free centred convection-diffusion: nonsymmetric, diagonally dominant
        let n = 60;
        let apply = |v: &[f64], out: &mut [f64]| {
            for i in 0..v.len() {
                let l = if i == 0 { 0.0 } else { v[i - 1] };
                let r = if i + 1 == v.len() { 0.0 } else { v[i + 1] };
                out[i] = 4.0 * v[i] - l - r + 0.8 * (r - l);
            }
        };
        let b: Vec<f64> = (0..n).map(|i| (0.2 * i as f64).cos()).collect();
        let mut x = vec![0.0; n];
        bicgstab("convection", apply, &b, &mut x, 1e-12, 200).unwrap();
        let mut ax = vec![0.0; n];
        apply(&x, &mut ax);
        for (a, bb) in ax.iter().zip(&b) {
            assert!((a - bb).abs() < 1e-10);
        }
        let mut z = vec![3.0; 4];
        assert_eq!(bicgstab("convection", apply, &[0.0; 4], &mut z, 1e-10, 5).unwrap(), 0);
        assert!(z.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn reports_non_convergence() {
        let b: Vec<f64> = (0..100).map(|i| (i as f64).sin()).collect();
        let mut x = vec![0.0; 100];
        let err = conjugate_gradient("poisson", neg_lap_neumann, &b, &mut x, 1e-14, 2, true).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { iterations: 2, .. }));
    }
}
