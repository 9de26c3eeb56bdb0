//! Second-order forward-mode jets: a value with its first two derivatives
//! along one real variable. Used to evaluate `ψ''` at collocation points
//! exactly, without finite-difference noise and without hand-derived algebra.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        Self {
            v,
            d1: 0.0,
            d2: 0.0,
        }
    }

    pub fn variable(v: f64) -> Self {
        Self {
            v,
            d1: 1.0,
            d2: 0.0,
        }
    }

    // f(u) given f(u), f'(u), f''(u)
    fn chain(self, f: f64, df: f64, ddf: f64) -> Self {
        Self {
            v: f,
            d1: df * self.d1,
            d2: ddf * self.d1 * self.d1 + df * self.d2,
        }
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn sinh(self) -> Self {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.chain(s, c, s)
    }

    pub fn cosh(self) -> Self {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.chain(c, s, c)
    }

    pub fn tanh(self) -> Self {
        let t = self.v.tanh();
        let sech2 = 1.0 - t * t;
        self.chain(t, sech2, -2.0 * t * sech2)
    }

    pub fn atan(self) -> Self {
        let u = self.v;
        let q = 1.0 / (1.0 + u * u);
        self.chain(u.atan(), q, -2.0 * u * q * q)
    }

    pub fn atanh(self) -> Self {
        let u = self.v;
        let q = 1.0 / (1.0 - u * u);
        self.chain(u.atanh(), q, 2.0 * u * q * q)
    }

    pub fn recip(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }

    pub fn scale(self, c: f64) -> Self {
        Self {
            v: c * self.v,
            d1: c * self.d1,
            d2: c * self.d2,
        }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet {
            v: self.v + o.v,
            d1: self.d1 + o.d1,
            d2: self.d2 + o.d2,
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        }
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

/// Complex-valued jet stored as real and imaginary parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct CJet {
    pub re: Jet,
    pub im: Jet,
}

impl CJet {
    pub fn real(re: Jet) -> Self {
        Self {
            re,
            im: Jet::constant(0.0),
        }
    }

    /// `e^{iφ}`
    pub fn unimodular(phase: Jet) -> Self {
        Self {
            re: phase.cos(),
            im: phase.sin(),
        }
    }

    pub fn scale(self, c: Complex64) -> Self {
        Self {
            re: self.re.scale(c.re) - self.im.scale(c.im),
            im: self.re.scale(c.im) + self.im.scale(c.re),
        }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.v, self.im.v)
    }

    pub fn second(&self) -> Complex64 {
        Complex64::new(self.re.d2, self.im.d2)
    }
}

impl Add for CJet {
    type Output = CJet;
    fn add(self, o: CJet) -> CJet {
        CJet {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl Mul for CJet {
    type Output = CJet;
    fn mul(self, o: CJet) -> CJet {
        CJet {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd2(f: impl Fn(f64) -> f64, x: f64) -> (f64, f64) {
        let h = 1e-4;
        (
            (f(x + h) - f(x - h)) / (2.0 * h),
            (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
        )
    }

    #[test]
    fn elementary_functions_match_differences() {
        let cases: Vec<(fn(Jet) -> Jet, fn(f64) -> f64)> = vec![
            (Jet::sin, f64::sin),
            (Jet::cos, f64::cos),
            (Jet::sinh, f64::sinh),
            (Jet::cosh, f64::cosh),
            (Jet::tanh, f64::tanh),
            (Jet::atan, f64::atan),
            (Jet::atanh, f64::atanh),
            (Jet::recip, |x| 1.0 / x),
        ];
        for &x in &[0.3, -0.45, 0.7] {
            // composite argument exercises the chain rule
            let inner = |u: f64| 0.8 * u * u + 0.1;
            let arg = (Jet::variable(x) * Jet::variable(x)).scale(0.8) + Jet::constant(0.1);
            for (jf, ff) in &cases {
                let j = jf(arg);
                let (d1, d2) = fd2(|u| ff(inner(u)), x);
                assert!((j.v - ff(inner(x))).abs() < 1e-15);
                assert!((j.d1 - d1).abs() < 1e-7 * (1.0 + d1.abs()), "{j:?} vs {d1}");
                assert!((j.d2 - d2).abs() < 1e-5 * (1.0 + d2.abs()), "{j:?} vs {d2}");
            }
        }
    }

    #[test]
    fn sech_second_derivative_exact() {
        for &x in &[-2.0, 0.0, 0.5, 3.0] {
            let s = Jet::variable(x).cosh().recip();
            let exact = 1.0 / f64::cosh(x) - 2.0 / f64::cosh(x).powi(3);
            assert!((s.d2 - exact).abs() < 1e-15);
        }
    }

    #[test]
    fn plane_wave() {
        let k = 1.7;
        let x = 0.4;
        let w = CJet::unimodular(Jet::variable(x).scale(k));
        let expected = -k * k * Complex64::from_polar(1.0, k * x);
        assert!((w.second() - expected).norm() < 1e-14);
    }
}
