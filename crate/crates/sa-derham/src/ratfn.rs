//! Quotients of polynomials, the value class of function pieces after composition.

use num_traits::Zero;

use crate::poly::{CompiledPoly, Poly};
use crate::rational::{one, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFn {
    num: Poly,
    den: Poly,
}

impl RatFn {
    pub fn new(num: Poly, den: Poly) -> Self {
        assert_eq!(num.nvars(), den.nvars());
        assert!(!den.is_zero(), "zero denominator");
        let mut r = RatFn { num, den };
        r.normalize();
        r
    }

    fn normalize(&mut self) {
        let n = self.num.nvars();
        if self.num.is_zero() {
            self.den = Poly::one(n);
            return;
        }
        if let Some(c) = self.den.as_constant() {
            if c != one() {
                self.num = self.num.scale(&c.recip());
                self.den = Poly::one(n);
            }
        }
    }

    pub fn poly(p: Poly) -> Self {
        let n = p.nvars();
        RatFn { num: p, den: Poly::one(n) }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        RatFn::poly(Poly::constant(nvars, c))
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_poly(&self) -> bool {
        self.den.as_constant().is_some()
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        self.is_poly().then_some(&self.num)
    }

    pub fn as_constant(&self) -> Option<Q> {
        if self.is_poly() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn is_affine(&self) -> bool {
        self.is_poly() && self.num.is_affine()
    }

    pub fn degree(&self) -> u32 {
        self.num.degree().max(self.den.degree())
    }

    pub fn add(&self, o: &RatFn) -> RatFn {
        if self.is_poly() && o.is_poly() {
            return RatFn::poly(self.num.add(&o.num));
        }
        if self.den == o.den {
            return RatFn::new(self.num.add(&o.num), self.den.clone());
        }
        RatFn::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    pub fn neg(&self) -> RatFn {
        RatFn { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &RatFn) -> RatFn {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RatFn) -> RatFn {
        if self.is_poly() && o.is_poly() {
            return RatFn::poly(self.num.mul(&o.num));
        }
        RatFn::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn scale(&self, c: &Q) -> RatFn {
        RatFn::new(self.num.scale(c), self.den.clone())
    }

    pub fn derivative(&self, i: usize) -> RatFn {
        if self.is_poly() {
            return RatFn::poly(self.num.derivative(i));
        }
        let n = self.num.derivative(i).mul(&self.den).sub(&self.num.mul(&self.den.derivative(i)));
        RatFn::new(n, self.den.mul(&self.den))
    }

    /// Identity of rational functions, decided by cross-multiplication.
    pub fn same_as(&self, o: &RatFn) -> bool {
        self.num.mul(&o.den) == o.num.mul(&self.den)
    }

    /// Substitutes rational functions for the variables.
    pub fn compose(&self, args: &[RatFn], m: usize) -> RatFn {
        let n = compose_poly(&self.num, args, m);
        if self.is_poly() {
            return n;
        }
        let d = compose_poly(&self.den, args, m);
        RatFn::new(n.num.mul(&d.den), n.den.mul(&d.num))
    }

    pub fn eval(&self, x: &[Q]) -> Option<Q> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.num.eval_f64(x) / self.den.eval_f64(x)
    }

    pub fn compile(&self) -> CompiledRatFn {
        CompiledRatFn {
            num: self.num.compile(),
            den: (!self.is_poly()).then(|| self.den.compile()),
        }
    }
}

fn compose_poly(p: &Poly, args: &[RatFn], m: usize) -> RatFn {
    if args.iter().all(|a| a.is_poly()) {
        let polys: Vec<Poly> = args.iter().map(|a| a.num.clone()).collect();
        return RatFn::poly(p.compose(&polys, m));
    }
    // Clear denominators with the largest power of each argument denominator.
    let maxexp: Vec<u32> = (0..p.nvars())
        .map(|i| p.terms().map(|(e, _)| e[i]).max().unwrap_or(0))
        .collect();
    let mut num = Poly::zero(m);
    for (e, c) in p.terms() {
        let mut t = Poly::constant(m, c.clone());
        for (i, a) in args.iter().enumerate() {
            t = t.mul(&a.num.pow(e[i])).mul(&a.den.pow(maxexp[i] - e[i]));
        }
        num = num.add(&t);
    }
    let mut den = Poly::one(m);
    for (i, a) in args.iter().enumerate() {
        den = den.mul(&a.den.pow(maxexp[i]));
    }
    if num.is_zero() {
        return RatFn::constant(m, Q::zero());
    }
    RatFn::new(num, den)
}

/// Double-precision evaluator with first derivatives.
#[derive(Clone, Debug)]
pub struct CompiledRatFn {
    num: CompiledPoly,
    den: Option<CompiledPoly>,
}

impl CompiledRatFn {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.den {
            None => self.num.eval(x),
            Some(d) => self.num.eval(x) / d.eval(x),
        }
    }

    pub fn eval_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        match &self.den {
            None => self.num.eval_grad(x, grad),
            Some(d) => {
                let mut gd = vec![0.0; grad.len()];
                let n = self.num.eval_grad(x, grad);
                let dv = d.eval_grad(x, &mut gd);
                for (g, h) in grad.iter_mut().zip(&gd) {
                    *g = (*g * dv - n * h) / (dv * dv);
                }
                n / dv
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};

    #[test]
    fn reciprocal_derivative() {
        // d/dt (1/t) = −1/t²
        let r = RatFn::new(Poly::one(1), Poly::var(1, 0));
        let d = r.derivative(0);
        let want = RatFn::new(Poly::constant(1, q(-1)), Poly::var(1, 0).pow(2));
        assert!(d.same_as(&want));
        assert_eq!(r.eval(&[q(2)]), Some(qr(1, 2)));
    }

    #[test]
    fn polynomial_of_rational_arguments() {
        // (1/t)² + 1/t = (1 + t)/t²
        let inv = RatFn::new(Poly::one(1), Poly::var(1, 0));
        let p = Poly::var(1, 0).pow(2).add(&Poly::var(1, 0));
        let got = RatFn::poly(p).compose(&[inv], 1);
        let want = RatFn::new(Poly::affine(q(1), &[q(1)]), Poly::var(1, 0).pow(2));
        assert!(got.same_as(&want));
    }

    #[test]
    fn compiled_quotient_gradient() {
        let r = RatFn::new(Poly::var(2, 0), Poly::affine(q(2), &[q(0), q(1)]));
        let c = r.compile();
        let mut g = [0.0; 2];
        let v = c.eval_grad(&[0.5, 1.0], &mut g);
        assert!((v - 0.5 / 3.0).abs() < 1e-15);
        assert!((g[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((g[1] + 0.5 / 9.0).abs() < 1e-15);
    }
}
