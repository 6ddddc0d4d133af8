//! Adaptive Gauss-Kronrod (7, 15) quadrature on finite intervals.

use num_complex::Complex64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for k in 0..7 {
        let dx = h * XGK[k];
        let pair = f(c - dx) + f(c + dx);
        kron += pair * WGK[k];
        if k % 2 == 1 {
            gauss += pair * WG[k / 2];
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    (kron, (kron - gauss).norm())
}

/// Integrates a complex-valued `f` over `[a, b]` to the given absolute or
/// relative tolerance, whichever is looser. Bisects the panel with the largest
/// error estimate until the summed estimate falls below tolerance.
pub fn integrate_complex<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Complex64 {
    if a == b {
        return Complex64::new(0.0, 0.0);
    }
    let mut panels = vec![(a, b, kronrod(&f, a, b))];
    for _ in 0..2_000 {
        let total: Complex64 = panels.iter().map(|p| p.2 .0).sum();
        let error: f64 = panels.iter().map(|p| p.2 .1).sum();
        if error <= abs_tol.max(rel_tol * total.norm()) {
            break;
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.total_cmp(&y.1 .2 .1))
            .expect("non-empty");
        let (lo, hi, _) = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            panels.push((lo, hi, kronrod(&f, lo, hi)));
            break;
        }
        panels.push((lo, mid, kronrod(&f, lo, mid)));
        panels.push((mid, hi, kronrod(&f, mid, hi)));
    }
    panels.iter().map(|p| p.2 .0).sum()
}

/// Real-valued counterpart of [`integrate_complex`].
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    integrate_complex(|x| Complex64::new(f(x), 0.0), a, b, abs_tol, rel_tol).re
}

/// Integrates over `[a, inf)` on a doubling schedule of panels until a panel
/// contributes less than the tolerance.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    let mut lo = a;
    let mut width = 1.0_f64.max(a.abs());
    let mut total = 0.0;
    for _ in 0..200 {
        let hi = lo + width;
        let piece = integrate(&f, lo, hi, abs_tol * 1e-3, rel_tol);
        total += piece;
        if piece.abs() <= abs_tol.max(rel_tol * total.abs()) && lo > a {
            break;
        }
        lo = hi;
        width *= 2.0;
    }
    total
}
