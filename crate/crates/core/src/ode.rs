//! Adaptive Dormand-Prince 5(4) integrator for complex linear systems.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Right-hand side `dy/dt = f(t, y)`.
pub trait System<T: Real> {
    fn rhs(&mut self, t: T, y: &[Complex<T>], dy: &mut [Complex<T>]);
}

/// Embedded Runge-Kutta pair.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Dormand-Prince 5(4), seven stages with first-same-as-last.
    DormandPrince54,
    /// Dormand-Prince 8(5,3), twelve stages plus first-same-as-last.
    #[default]
    DormandPrince853,
}

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions<T: Real> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_steps: usize,
    pub method: Method,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const DP5_C: [f64; 6] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0];
const DP5_A: [&[f64]; 6] = [
    &[],
    &[0.2],
    &[3.0 / 40.0, 9.0 / 40.0],
    &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
    &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
    &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
];
const DP5_B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
/// Fifth- minus fourth-order weights; the last entry multiplies the
/// first-same-as-last stage.
const DP5_E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const DOP853_C: [f64; 12] = [
    0.0,
    0.05260015195876773,
    0.0789002279381516,
    0.1183503419072274,
    0.2816496580927726,
    0.3333333333333333,
    0.25,
    0.3076923076923077,
    0.6512820512820513,
    0.6,
    0.8571428571428571,
    1.0,
];
const DOP853_A: [&[f64]; 12] = [
    &[],
    &[0.05260015195876773],
    &[0.0197250569845379, 0.0591751709536137],
    &[0.02958758547680685, 0.0, 0.08876275643042054],
    &[0.2413651341592667, 0.0, -0.8845494793282861, 0.924834003261792],
    &[0.037037037037037035, 0.0, 0.0, 0.17082860872947386, 0.12546768756682242],
    &[0.037109375, 0.0, 0.0, 0.17025221101954405, 0.06021653898045596, -0.017578125],
    &[
        0.03709200011850479,
        0.0,
        0.0,
        0.17038392571223998,
        0.10726203044637328,
        -0.015319437748624402,
        0.008273789163814023,
    ],
    &[
        0.6241109587160757,
        0.0,
        0.0,
        -3.3608926294469414,
        -0.868219346841726,
        27.59209969944671,
        20.154067550477894,
        -43.48988418106996,
    ],
    &[
        0.47766253643826434,
        0.0,
        0.0,
        -2.4881146199716677,
        -0.590290826836843,
        21.230051448181193,
        15.279233632882423,
        -33.28821096898486,
        -0.020331201708508627,
    ],
    &[
        -0.9371424300859873,
        0.0,
        0.0,
        5.186372428844064,
        1.0914373489967295,
        -8.149787010746927,
        -18.52006565999696,
        22.739487099350505,
        2.4936055526796523,
        -3.0467644718982196,
    ],
    &[
        2.273310147516538,
        0.0,
        0.0,
        -10.53449546673725,
        -2.0008720582248625,
        -17.9589318631188,
        27.94888452941996,
        -2.8589982771350235,
        -8.87285693353063,
        12.360567175794303,
        0.6433927460157636,
    ],
];
const DOP853_B: [f64; 12] = [
    0.054293734116568765,
    0.0,
    0.0,
    0.0,
    0.0,
    4.450312892752409,
    1.8915178993145003,
    -5.801203960010585,
    0.3111643669578199,
    -0.1521609496625161,
    0.20136540080403034,
    0.04471061572777259,
];
const DOP853_E3: [f64; 12] = [
    -0.18980075407240762,
    0.0,
    0.0,
    0.0,
    0.0,
    4.450312892752409,
    1.8915178993145003,
    -5.801203960010585,
    -0.4226823213237919,
    -0.1521609496625161,
    0.20136540080403034,
    0.02265179219836082,
];
const DOP853_E5: [f64; 12] = [
    0.01312004499419488,
    0.0,
    0.0,
    0.0,
    0.0,
    -1.2251564463762044,
    -0.4957589496572502,
    1.6643771824549864,
    -0.35032884874997366,
    0.3341791187130175,
    0.08192320648511571,
    -0.022355307863886294,
];

struct Tableau<T> {
    c: Vec<T>,
    a: Vec<Vec<T>>,
    b: Vec<T>,
    /// Error weights over all stages including the last (FSAL) one.
    e: Vec<T>,
    /// Secondary low-order estimate used by the 8(5,3) norm.
    e3: Option<Vec<T>>,
    exponent: T,
}

impl<T: Real> Tableau<T> {
    fn new(method: Method) -> Self {
        let conv = |x: &[f64]| x.iter().map(|&v| lit(v)).collect::<Vec<T>>();
        match method {
            Method::DormandPrince54 => Self {
                c: conv(&DP5_C),
                a: DP5_A.iter().map(|r| conv(r)).collect(),
                b: conv(&DP5_B),
                e: conv(&DP5_E),
                e3: None,
                exponent: lit(-0.2),
            },
            Method::DormandPrince853 => {
                let mut e = conv(&DOP853_E5);
                e.push(T::zero());
                let mut e3 = conv(&DOP853_E3);
                e3.push(T::zero());
                Self {
                    c: conv(&DOP853_C),
                    a: DOP853_A.iter().map(|r| conv(r)).collect(),
                    b: conv(&DOP853_B),
                    e,
                    e3: Some(e3),
                    exponent: lit(-0.125),
                }
            }
        }
    }

    fn stages(&self) -> usize {
        self.b.len()
    }
}

fn scales<T: Real>(y0: &[Complex<T>], y1: &[Complex<T>], o: &OdeOptions<T>, out: &mut [T]) {
    for i in 0..y0.len() {
        let m = y0[i].norm_sqr().max(y1[i].norm_sqr()).sqrt();
        out[i] = o.abs_tol + o.rel_tol * m;
    }
}

fn rms<T: Real>(v: &[Complex<T>], sc: &[T]) -> T {
    let mut acc = T::zero();
    for i in 0..v.len() {
        acc += v[i].norm_sqr() / (sc[i] * sc[i]);
    }
    (acc / lit::<T>(v.len().max(1) as f64)).sqrt()
}

fn combine<T: Real>(k: &[Vec<Complex<T>>], w: &[T], h: T, out: &mut [Complex<T>]) {
    out.iter_mut().for_each(|o| *o = Complex::new(T::zero(), T::zero()));
    for (kj, &wj) in k.iter().zip(w) {
        let a = wj * h;
        if a != T::zero() {
            for (o, &kv) in out.iter_mut().zip(kj) {
                *o += kv * a;
            }
        }
    }
}

fn initial_step<T: Real, S: System<T>>(
    sys: &mut S,
    t0: T,
    y0: &[Complex<T>],
    f0: &[Complex<T>],
    dir: T,
    order: T,
    o: &OdeOptions<T>,
) -> T {
    let mut sc = vec![T::zero(); y0.len()];
    scales(y0, y0, o, &mut sc);
    let d0 = rms(y0, &sc);
    let d1 = rms(f0, &sc);
    let small: T = lit(1e-5);
    let h0 = if d0 < small || d1 < small {
        lit(1e-6)
    } else {
        lit::<T>(0.01) * d0 / d1
    };
    let y1: Vec<Complex<T>> = y0.iter().zip(f0).map(|(&y, &f)| y + f * (h0 * dir)).collect();
    let mut f1 = vec![Complex::new(T::zero(), T::zero()); y0.len()];
    sys.rhs(t0 + h0 * dir, &y1, &mut f1);
    let diff: Vec<Complex<T>> = f1.iter().zip(f0).map(|(&a, &b)| a - b).collect();
    let d2 = rms(&diff, &sc) / h0;
    let dm = d1.max(d2);
    let h1 = if dm <= lit(1e-15) {
        (h0 * lit(1e-3)).max(lit(1e-6))
    } else {
        (lit::<T>(0.01) / dm).powf(T::one() / order)
    };
    (h0 * lit(100.0)).min(h1)
}

/// Integrate from `t0` to `t1` in place. `observe` is called after every
/// accepted step with the current time and state.
pub fn integrate<T: Real, S: System<T>>(
    sys: &mut S,
    t0: T,
    t1: T,
    y: &mut [Complex<T>],
    opts: &OdeOptions<T>,
    mut observe: impl FnMut(T, &[Complex<T>]),
) -> Result<OdeStats> {
    let mut stats = OdeStats::default();
    if t1 == t0 {
        return Ok(stats);
    }
    let n = y.len();
    let tab = Tableau::<T>::new(opts.method);
    let ns = tab.stages();
    let dir = if t1 > t0 { T::one() } else { -T::one() };
    let zero = Complex::new(T::zero(), T::zero());
    let mut k: Vec<Vec<Complex<T>>> = vec![vec![zero; n]; ns + 1];
    let mut stage = vec![zero; n];
    let mut y_new = vec![zero; n];
    let mut err = vec![zero; n];
    let mut err3 = vec![zero; n];
    let mut sc = vec![T::zero(); n];

    sys.rhs(t0, y, &mut k[0]);
    let order = -T::one() / tab.exponent;
    let mut h = initial_step(sys, t0, y, &k[0], dir, order, opts);
    stats.evaluations += 2;
    let mut t = t0;
    let mut last_rejected = false;
    let safety: T = lit(0.9);
    let fac_min: T = lit(0.2);
    let fac_max: T = lit(10.0);
    let tiny = T::default_epsilon() * lit(16.0);

    while (t1 - t) * dir > T::zero() {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::StepLimitExceeded(opts.max_steps));
        }
        let remaining = (t1 - t).abs();
        if h > remaining {
            h = remaining;
        }
        if h <= tiny * t.abs().max(T::one()) {
            return Err(Error::ToleranceUnreachable {
                t: to_f64(t),
                reason: format!("step size {:e} underflows", to_f64(h)),
            });
        }
        let hs = h * dir;
        for s in 1..ns {
            stage.copy_from_slice(y);
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = tab.a[s][j] * hs;
                if a != T::zero() {
                    for (st, &kv) in stage.iter_mut().zip(kj) {
                        *st += kv * a;
                    }
                }
            }
            let (_, tail) = k.split_at_mut(s);
            sys.rhs(t + tab.c[s] * hs, &stage, &mut tail[0]);
        }
        combine(&k[..ns], &tab.b, hs, &mut y_new);
        for (yn, &y0) in y_new.iter_mut().zip(y.iter()) {
            *yn += y0;
        }
        let t_new = if (t1 - (t + hs)) * dir <= T::zero() { t1 } else { t + hs };
        {
            let (_, tail) = k.split_at_mut(ns);
            sys.rhs(t_new, &y_new, &mut tail[0]);
        }
        stats.evaluations += ns;
        scales(y, &y_new, opts, &mut sc);
        combine(&k, &tab.e, hs, &mut err);
        let e = match &tab.e3 {
            None => rms(&err, &sc),
            Some(e3) => {
                combine(&k, e3, hs, &mut err3);
                let mut n5 = T::zero();
                let mut n3 = T::zero();
                for i in 0..n {
                    let s2 = sc[i] * sc[i];
                    n5 += err[i].norm_sqr() / s2;
                    n3 += err3[i].norm_sqr() / s2;
                }
                if n5 == T::zero() && n3 == T::zero() {
                    T::zero()
                } else {
                    let denom = (n5 + lit::<T>(0.01) * n3) * lit::<T>(n as f64);
                    n5 / denom.sqrt()
                }
            }
        };
        if !e.is_finite() {
            return Err(Error::ToleranceUnreachable {
                t: to_f64(t),
                reason: "non-finite error estimate".into(),
            });
        }
        if e <= T::one() {
            t = t_new;
            y.copy_from_slice(&y_new);
            k.swap(0, ns);
            stats.accepted += 1;
            observe(t, y);
            let mut fac = if e == T::zero() {
                fac_max
            } else {
                safety * e.powf(tab.exponent)
            };
            fac = fac.min(fac_max).max(fac_min);
            if last_rejected {
                fac = fac.min(T::one());
            }
            h *= fac;
            last_rejected = false;
        } else {
            h *= (safety * e.powf(tab.exponent)).max(fac_min);
            stats.rejected += 1;
            last_rejected = true;
        }
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Rotor(f64);

    impl System<f64> for Rotor {
        fn rhs(&mut self, _t: f64, y: &[Complex<f64>], dy: &mut [Complex<f64>]) {
            dy[0] = Complex::new(0.0, -self.0) * y[0];
        }
    }

    struct Ramp;

    impl System<f64> for Ramp {
        fn rhs(&mut self, t: f64, y: &[Complex<f64>], dy: &mut [Complex<f64>]) {
            dy[0] = Complex::new(0.0, -t) * y[0];
        }
    }

    fn opts(rel: f64) -> OdeOptions<f64> {
        OdeOptions {
            rel_tol: rel,
            abs_tol: rel * 1e-2,
            max_steps: 1_000_000,
            method: Method::default(),
        }
    }

    #[test]
    fn exponential_phase() {
        let mut y = vec![Complex::new(1.0, 0.0)];
        integrate(&mut Rotor(2.0), 0.0, 10.0, &mut y, &opts(1e-10), |_, _| {}).unwrap();
        let exact = Complex::new(0.0, -20.0).exp();
        assert!((y[0] - exact).norm() < 1e-8);
    }

    #[test]
    fn quadratic_phase_backwards() {
        let mut y = vec![Complex::new(1.0, 0.0)];
        integrate(&mut Ramp, 3.0, -2.0, &mut y, &opts(1e-11), |_, _| {}).unwrap();
        let exact = Complex::new(0.0, -(4.0 - 9.0) / 2.0).exp();
        assert!((y[0] - exact).norm() < 1e-8);
    }

    #[test]
    fn step_limit() {
        let mut y = vec![Complex::new(1.0, 0.0)];
        let o = OdeOptions {
            max_steps: 3,
            ..opts(1e-10)
        };
        assert_eq!(
            integrate(&mut Rotor(50.0), 0.0, 10.0, &mut y, &o, |_, _| {}),
            Err(Error::StepLimitExceeded(3))
        );
    }

    #[test]
    fn both_methods_agree() {
        for method in [Method::DormandPrince54, Method::DormandPrince853] {
            let mut y = vec![Complex::new(1.0, 0.0)];
            let o = OdeOptions { method, ..opts(1e-11) };
            integrate(&mut Ramp, -6.0, 6.0, &mut y, &o, |_, _| {}).unwrap();
            assert!((y[0] - Complex::new(1.0, 0.0)).norm() < 1e-8, "{method:?}");
        }
    }

    #[test]
    fn convergence_order() {
        let run = |rel: f64| {
            let mut y = vec![Complex::new(1.0, 0.0)];
            let stats = integrate(&mut Rotor(1.0), 0.0, 20.0, &mut y, &opts(rel), |_, _| {}).unwrap();
            ((y[0] - Complex::new(0.0, -20.0).exp()).norm(), stats.accepted)
        };
        let (e1, n1) = run(1e-6);
        let (e2, n2) = run(1e-10);
        assert!(e2 < e1);
        assert!(n2 > n1);
    }
}
