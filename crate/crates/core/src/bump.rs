//! Closed-form calculus for the standard compactly supported bump
//! `b(x) = exp(-1/(1-x^2))` on `|x| < 1`.
//!
//! Every derivative of `b` is `P_k(x) / (1-x^2)^{2k} * b(x)` with `P_k` a
//! polynomial obtained by the recurrence
//! `P_{k+1} = P_k' u^2 + 4 k x u P_k - 2 x P_k`, `u = 1-x^2`.
//! [`SmoothPiece`] closes polynomial multiples and shifts of these
//! derivatives under differentiation, which is what the test-function
//! dictionary needs to certify its seminorms from closed forms.

/// `exp(-1/(1-r^2))` for `|r| < 1`, zero otherwise. Unnormalized.
pub fn std_bump(r: f64) -> f64 {
    let u = 1.0 - r * r;
    if u <= 0.0 {
        0.0
    } else {
        (-1.0 / u).exp()
    }
}

/// Radial transition used by the partition of unity: 1 on `[0,1]`, 0 on
/// `[2,inf)`, smooth monotone in between.
pub fn transition(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        let a = (-1.0 / (2.0 - r)).exp();
        let b = (-1.0 / (r - 1.0)).exp();
        a / (a + b)
    }
}

/// Dense polynomial, ascending coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn constant(c: f64) -> Self {
        Poly(vec![c])
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly(vec![0.0]);
        }
        Poly(self.0.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            for (j, &b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let mut out = vec![0.0; n];
        for (i, &a) in self.0.iter().enumerate() {
            out[i] += a;
        }
        for (i, &b) in other.0.iter().enumerate() {
            out[i] += b;
        }
        Poly(out)
    }

    pub fn scale(&self, c: f64) -> Poly {
        Poly(self.0.iter().map(|&a| c * a).collect())
    }
}

/// Numerator polynomials `P_k` for `b^{(k)} = P_k / u^{2k} * b`, `k = 0..=max`.
pub fn bump_deriv_numerators(max: usize) -> Vec<Poly> {
    let u = Poly(vec![1.0, 0.0, -1.0]); // 1 - x^2
    let u2 = u.mul(&u);
    let x = Poly(vec![0.0, 1.0]);
    let mut out = vec![Poly::constant(1.0)];
    for k in 0..max {
        let p = &out[k];
        let term1 = p.derivative().mul(&u2);
        let term2 = x.mul(&u).mul(p).scale(4.0 * k as f64);
        let term3 = x.mul(p).scale(-2.0);
        out.push(term1.add(&term2).add(&term3));
    }
    out
}

/// Evaluates `b^{(k)}(y)` from its numerator polynomial.
pub fn eval_bump_deriv(num: &Poly, k: usize, y: f64) -> f64 {
    let u = 1.0 - y * y;
    if u <= 0.0 {
        return 0.0;
    }
    // exp(-1/u) * u^{-2k} computed in one exponential, stable as u -> 0
    let log_mag = -1.0 / u - 2.0 * k as f64 * u.ln();
    num.eval(y) * log_mag.exp()
}

/// Finite sum `sum_j q_j(x - c) * b^{(j)}(x - c)`: a closed-form smooth
/// function supported on `[c-1, c+1]`, closed under differentiation.
#[derive(Clone, Debug)]
pub struct SmoothPiece {
    pub shift: f64,
    /// `terms[j]` multiplies the j-th bump derivative; entries may be empty.
    pub terms: Vec<Poly>,
}

impl SmoothPiece {
    /// `q(x - c) * b(x - c)`.
    pub fn modulated(shift: f64, q: Poly) -> Self {
        SmoothPiece { shift, terms: vec![q] }
    }

    pub fn bump(shift: f64) -> Self {
        SmoothPiece::modulated(shift, Poly::constant(1.0))
    }

    /// Plain k-th derivative of the bump.
    pub fn bump_derivative(shift: f64, k: usize) -> Self {
        let mut terms = vec![Poly(vec![0.0]); k + 1];
        terms[k] = Poly::constant(1.0);
        SmoothPiece { shift, terms }
    }

    pub fn derivative(&self) -> SmoothPiece {
        let mut terms = vec![Poly(vec![0.0]); self.terms.len() + 1];
        for (j, q) in self.terms.iter().enumerate() {
            terms[j] = terms[j].add(&q.derivative());
            terms[j + 1] = terms[j + 1].add(q);
        }
        SmoothPiece { shift: self.shift, terms }
    }

    pub fn eval(&self, x: f64, numerators: &[Poly]) -> f64 {
        let y = x - self.shift;
        if y.abs() >= 1.0 {
            return 0.0;
        }
        let mut acc = 0.0;
        for (j, q) in self.terms.iter().enumerate() {
            if q.0.iter().all(|&c| c == 0.0) {
                continue;
            }
            acc += q.eval(y) * eval_bump_deriv(&numerators[j], j, y);
        }
        acc
    }

    pub fn scale_values(&mut self, c: f64) {
        for q in &mut self.terms {
            *q = q.scale(c);
        }
    }

    pub fn support(&self) -> [f64; 2] {
        [self.shift - 1.0, self.shift + 1.0]
    }

    /// Highest bump-derivative order referenced.
    pub fn order(&self) -> usize {
        self.terms.len().saturating_sub(1)
    }
}
