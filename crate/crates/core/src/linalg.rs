//! Small dense solves: complex systems for the frequency-domain response and
//! real normal equations for the fits. Gaussian elimination with partial pivoting.

use num_complex::Complex64;

/// Solves `a · x = b` in place for an `N×N` complex matrix and `M` right-hand
/// sides. On return `b` holds `x`. Returns `false` when a pivot vanishes
/// relative to the largest entry of `a`.
pub fn solve_complex<const N: usize, const M: usize>(a: &mut [[Complex64; N]; N], b: &mut [[Complex64; M]; N]) -> bool {
    let scale = a.iter().flatten().map(|z| z.norm()).fold(0.0_f64, f64::max);
    if !(scale > 0.0 && scale.is_finite()) {
        return false;
    }
    let tiny = scale * f64::EPSILON * 1e-3;
    for col in 0..N {
        let (piv, piv_abs) = (col..N)
            .map(|r| (r, a[r][col].norm()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(piv_abs > tiny) {
            return false;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = a[col][col].inv();
        for r in col + 1..N {
            let f = a[r][col] * inv;
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for c in col..N {
                let v = a[col][c];
                a[r][c] -= f * v;
            }
            for c in 0..M {
                let v = b[col][c];
                b[r][c] -= f * v;
            }
        }
    }
    for row in (0..N).rev() {
        for c in 0..M {
            let mut acc = b[row][c];
            for k in row + 1..N {
                acc -= a[row][k] * b[k][c];
            }
            b[row][c] = acc / a[row][row];
        }
    }
    true
}

/// Solves a real `N×N` system `a · x = b`. Returns `None` if singular.
pub fn solve_real<const N: usize>(mut a: [[f64; N]; N], mut b: [f64; N]) -> Option<[f64; N]> {
    let scale = a.iter().flatten().map(|v| v.abs()).fold(0.0_f64, f64::max);
    if !(scale > 0.0 && scale.is_finite()) {
        return None;
    }
    let tiny = scale * f64::EPSILON * 1e-3;
    for col in 0..N {
        let mut piv = col;
        for r in col + 1..N {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if !(a[piv][col].abs() > tiny) {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..N {
            let f = a[r][col] / a[col][col];
            for c in col..N {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = [0.0; N];
    for row in (0..N).rev() {
        let mut acc = b[row];
        for k in row + 1..N {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Inverse of a real `N×N` matrix, column by column.
pub fn invert_real<const N: usize>(a: &[[f64; N]; N]) -> Option<[[f64; N]; N]> {
    let mut inv = [[0.0; N]; N];
    for col in 0..N {
        let mut e = [0.0; N];
        e[col] = 1.0;
        let x = solve_real(*a, e)?;
        for row in 0..N {
            inv[row][col] = x[row];
        }
    }
    Some(inv)
}
