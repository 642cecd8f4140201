//! Piecewise power-log expressions `c * t^e * (-ln t)^b`.
//!
//! Scale functions, radial profiles raised to powers, kernel products and
//! decreasing rearrangements all reduce to finitely many pieces of this form,
//! so their integrals, suprema and limit behaviour can be handled in one
//! place. Pieces with a log factor (`b != 0`) must live inside `(0, 1]`,
//! where `-ln t >= 0`; the constructors in this crate guarantee that.
//!
//! The segment integral is closed form except for one combination (negative
//! power exponent with a log factor away from the origin), which is flagged
//! as `NeedsNumeric` and resolved by the adaptive panels in [`crate::quad`].

/// One power-log piece: `value(t) = coeff * t^exp * (-ln t)^log_exp`
/// on the half-open interval `(lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub coeff: f64,
    pub exp: f64,
    pub log_exp: f64,
}

impl Piece {
    pub fn new(lo: f64, hi: f64, coeff: f64, exp: f64, log_exp: f64) -> Self {
        debug_assert!(lo >= 0.0 && lo < hi);
        debug_assert!(
            log_exp == 0.0 || coeff == 0.0 || hi <= 1.0,
            "log factors are only meaningful inside (0, 1], got hi = {hi}"
        );
        let (exp, log_exp) = if coeff == 0.0 { (0.0, 0.0) } else { (exp, log_exp) };
        Piece { lo, hi, coeff, exp, log_exp }
    }

    pub fn eval(&self, t: f64) -> f64 {
        debug_assert!(t > 0.0);
        if self.coeff == 0.0 {
            return 0.0;
        }
        let log_factor = if self.log_exp == 0.0 { 1.0 } else { (-t.ln()).powf(self.log_exp) };
        self.coeff * t.powf(self.exp) * log_factor
    }

    /// Limit of the piece expression as `t -> 0+`.
    pub fn limit_at_zero(&self) -> Limit {
        if self.coeff == 0.0 {
            return Limit::Value(0.0);
        }
        if self.exp > 0.0 {
            Limit::Value(0.0)
        } else if self.exp < 0.0 {
            Limit::Infinite
        } else if self.log_exp > 0.0 {
            Limit::Infinite
        } else if self.log_exp < 0.0 {
            Limit::Value(0.0)
        } else {
            Limit::Value(self.coeff)
        }
    }

    /// Limit as `t -> ∞` (pieces reaching infinity carry no log factor).
    pub fn limit_at_inf(&self) -> Limit {
        if self.coeff == 0.0 {
            return Limit::Value(0.0);
        }
        debug_assert_eq!(self.log_exp, 0.0);
        if self.exp > 0.0 {
            Limit::Infinite
        } else if self.exp < 0.0 {
            Limit::Value(0.0)
        } else {
            Limit::Value(self.coeff)
        }
    }

    /// Supremum of the piece over `(max(lo, cut_lo), min(hi, cut_hi)]`,
    /// including boundary limits. Returns the location of the supremum.
    pub fn sup_on(&self, cut_lo: f64, cut_hi: f64) -> Sup {
        let lo = self.lo.max(cut_lo);
        let hi = self.hi.min(cut_hi);
        if lo >= hi || self.coeff == 0.0 {
            return Sup::finite(0.0, lo);
        }
        let mut best = Sup::finite(f64::NEG_INFINITY, lo);
        let consider = |value: Limit, at: f64, best: &mut Sup| match value {
            Limit::Infinite => {
                if !matches!(best, Sup::Infinite { .. }) {
                    *best = Sup::Infinite { at };
                }
            }
            Limit::Value(v) => {
                if let Sup::Finite { value, .. } = best {
                    if v > *value {
                        *best = Sup::finite(v, at);
                    }
                }
            }
        };
        // Left end: open, use the limit when it sits at 0, else the value.
        if lo == 0.0 {
            consider(self.limit_at_zero(), 0.0, &mut best);
        } else {
            consider(Limit::Value(self.eval(lo)), lo, &mut best);
        }
        // Right end.
        if hi.is_infinite() {
            consider(self.limit_at_inf(), f64::INFINITY, &mut best);
        } else if hi == 1.0 && self.log_exp != 0.0 {
            let at_one = if self.log_exp > 0.0 {
                Limit::Value(0.0)
            } else {
                Limit::Infinite
            };
            consider(at_one, 1.0, &mut best);
        } else {
            consider(Limit::Value(self.eval(hi)), hi, &mut best);
        }
        // Interior critical point t* = exp(-b/e) where the log and power
        // factors balance; only a local max when e > 0 and b > 0.
        if self.exp > 0.0 && self.log_exp > 0.0 {
            let t_star = (-self.log_exp / self.exp).exp();
            if t_star > lo && t_star < hi {
                consider(Limit::Value(self.eval(t_star)), t_star, &mut best);
            }
        }
        best
    }

    /// Location of the interior local maximum, when the rising power and the
    /// decaying log factor trade off inside the piece.
    pub fn interior_max(&self) -> Option<f64> {
        if self.coeff != 0.0 && self.exp > 0.0 && self.log_exp > 0.0 {
            let t_star = (-self.log_exp / self.exp).exp();
            if t_star > self.lo && t_star < self.hi {
                return Some(t_star);
            }
        }
        None
    }
}

/// A one-sided limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Limit {
    Value(f64),
    Infinite,
}

/// Supremum outcome with the location where it is attained (0 or infinity
/// denote boundary limits).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sup {
    Finite { value: f64, at: f64 },
    Infinite { at: f64 },
}

impl Sup {
    pub fn finite(value: f64, at: f64) -> Self {
        Sup::Finite { value, at }
    }

    pub fn max(self, other: Sup) -> Sup {
        match (self, other) {
            (Sup::Infinite { at }, _) => Sup::Infinite { at },
            (_, Sup::Infinite { at }) => Sup::Infinite { at },
            (Sup::Finite { value: a, at: pa }, Sup::Finite { value: b, at: pb }) => {
                if a >= b {
                    Sup::finite(a, pa)
                } else {
                    Sup::finite(b, pb)
                }
            }
        }
    }
}

/// Leading-order behaviour `coeff * r^exp * |ln r|^log_exp` near an endpoint
/// (0 or infinity; near infinity the log factor reads `(ln r)^log_exp`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Asymptote {
    pub coeff: f64,
    pub exp: f64,
    pub log_exp: f64,
}

impl Asymptote {
    pub fn constant(c: f64) -> Self {
        Asymptote { coeff: c, exp: 0.0, log_exp: 0.0 }
    }

    /// Combine with another asymptote multiplicatively.
    pub fn mul(&self, other: &Asymptote) -> Asymptote {
        Asymptote {
            coeff: self.coeff * other.coeff,
            exp: self.exp + other.exp,
            log_exp: self.log_exp + other.log_exp,
        }
    }

    /// Limit as the variable tends to 0 (log factor `|ln r| -> ∞`).
    pub fn limit_at_zero(&self) -> Limit {
        if self.coeff == 0.0 {
            return Limit::Value(0.0);
        }
        if self.exp > 0.0 || (self.exp == 0.0 && self.log_exp < 0.0) {
            Limit::Value(0.0)
        } else if self.exp == 0.0 && self.log_exp == 0.0 {
            Limit::Value(self.coeff)
        } else {
            Limit::Infinite
        }
    }

    /// Limit as the variable tends to infinity (log factor `ln r -> ∞`).
    pub fn limit_at_inf(&self) -> Limit {
        if self.coeff == 0.0 {
            return Limit::Value(0.0);
        }
        if self.exp < 0.0 || (self.exp == 0.0 && self.log_exp < 0.0) {
            Limit::Value(0.0)
        } else if self.exp == 0.0 && self.log_exp == 0.0 {
            Limit::Value(self.coeff)
        } else {
            Limit::Infinite
        }
    }
}

/// Closed-form result for one segment integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegmentIntegral {
    Value(f64),
    Divergent,
    /// Negative power exponent with a log factor on an interval away from
    /// zero: finite but without an elementary antiderivative.
    NeedsNumeric,
}

/// `∫ coeff * t^exp * (-ln t)^log_exp dt` over `(lo, hi)`, `0 <= lo < hi <= ∞`.
///
/// Under `u = -ln t` the integral becomes an upper incomplete gamma of shape
/// `log_exp + 1`, so the closed form covers every case that can diverge.
pub fn segment_integral(coeff: f64, exp: f64, log_exp: f64, lo: f64, hi: f64) -> SegmentIntegral {
    use crate::special::{gamma, upper_gamma};
    debug_assert!(lo >= 0.0 && lo < hi);
    if coeff == 0.0 {
        return SegmentIntegral::Value(0.0);
    }
    let a = exp + 1.0;
    if log_exp == 0.0 {
        if hi.is_infinite() {
            if a >= 0.0 {
                return SegmentIntegral::Divergent;
            }
            if lo == 0.0 {
                return SegmentIntegral::Divergent;
            }
            return SegmentIntegral::Value(-coeff * lo.powf(a) / a);
        }
        if a == 0.0 {
            if lo == 0.0 {
                return SegmentIntegral::Divergent;
            }
            return SegmentIntegral::Value(coeff * (hi / lo).ln());
        }
        if lo == 0.0 && a < 0.0 {
            return SegmentIntegral::Divergent;
        }
        let lo_pow = if lo == 0.0 { 0.0 } else { lo.powf(a) };
        return SegmentIntegral::Value(coeff * (hi.powf(a) - lo_pow) / a);
    }
    debug_assert!(hi <= 1.0, "log-factor segments live in (0, 1]");
    let shape = log_exp + 1.0;
    // u = -ln t, decreasing in t; l_lo >= l_hi >= 0.
    let l_hi = -hi.ln();
    if a > 0.0 {
        let at_hi = if l_hi <= 0.0 {
            // hi == 1: the endpoint integral converges only for log_exp > -1.
            if shape <= 0.0 {
                return SegmentIntegral::Divergent;
            }
            gamma(shape)
        } else {
            upper_gamma(shape, a * l_hi)
        };
        let at_lo = if lo == 0.0 { 0.0 } else { upper_gamma(shape, a * -lo.ln()) };
        return SegmentIntegral::Value(coeff * a.powf(-shape) * (at_hi - at_lo));
    }
    if a == 0.0 {
        // ∫ u^log_exp du between l_hi and l_lo.
        if lo == 0.0 {
            if shape >= 0.0 {
                return SegmentIntegral::Divergent;
            }
            if l_hi <= 0.0 {
                return SegmentIntegral::Divergent;
            }
            return SegmentIntegral::Value(coeff * l_hi.powf(shape) / -shape);
        }
        let l_lo = -lo.ln();
        if shape == 0.0 {
            if l_hi <= 0.0 {
                return SegmentIntegral::Divergent;
            }
            return SegmentIntegral::Value(coeff * (l_lo / l_hi).ln());
        }
        if l_hi <= 0.0 && shape < 0.0 {
            return SegmentIntegral::Divergent;
        }
        let hi_pow = if l_hi <= 0.0 { 0.0 } else { l_hi.powf(shape) };
        return SegmentIntegral::Value(coeff * (l_lo.powf(shape) - hi_pow) / shape);
    }
    // a < 0 with a log factor.
    if lo == 0.0 {
        return SegmentIntegral::Divergent;
    }
    SegmentIntegral::NeedsNumeric
}

/// A finite union of non-overlapping power-log pieces in ascending order.
/// The function is zero outside the pieces.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Piecewise {
    pub pieces: Vec<Piece>,
}

impl Piecewise {
    pub fn new(pieces: Vec<Piece>) -> Self {
        debug_assert!(pieces.windows(2).all(|w| w[0].hi <= w[1].lo + 1e-15));
        Piecewise { pieces }
    }

    pub fn constant_on(lo: f64, hi: f64, c: f64) -> Self {
        Piecewise::new(vec![Piece::new(lo, hi, c, 0.0, 0.0)])
    }

    pub fn eval(&self, t: f64) -> f64 {
        for p in &self.pieces {
            if t > p.lo && t <= p.hi {
                return p.eval(t);
            }
        }
        0.0
    }

    /// End of the support (upper bound of the last piece), 0 when empty.
    pub fn support_end(&self) -> f64 {
        self.pieces.last().map_or(0.0, |p| p.hi)
    }

    /// Raise to the power `q > 0` (pieces have positive coefficients).
    pub fn powf(&self, q: f64) -> Piecewise {
        let pieces = self
            .pieces
            .iter()
            .filter(|p| p.coeff != 0.0)
            .map(|p| Piece::new(p.lo, p.hi, p.coeff.powf(q), p.exp * q, p.log_exp * q))
            .collect();
        Piecewise::new(pieces)
    }

    /// Multiply by a plain power `k * t^e` on the whole line.
    pub fn mul_power(&self, k: f64, e: f64) -> Piecewise {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece::new(p.lo, p.hi, p.coeff * k, p.exp + e, p.log_exp))
            .collect();
        Piecewise::new(pieces)
    }

    /// Pointwise product; the result is supported on the intersection of the
    /// supports, with pieces split at the union of the breakpoints.
    pub fn mul(&self, other: &Piecewise) -> Piecewise {
        let mut out = Vec::new();
        for p in &self.pieces {
            for q in &other.pieces {
                let lo = p.lo.max(q.lo);
                let hi = p.hi.min(q.hi);
                if lo < hi {
                    out.push(Piece::new(
                        lo,
                        hi,
                        p.coeff * q.coeff,
                        p.exp + q.exp,
                        p.log_exp + q.log_exp,
                    ));
                }
            }
        }
        out.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap());
        Piecewise::new(out)
    }

    /// Supremum over `(0, cut]` (or the full support when `cut` exceeds it).
    pub fn sup_prefix(&self, cut: f64) -> Sup {
        let mut best = Sup::finite(0.0, 0.0);
        for p in &self.pieces {
            if p.lo >= cut {
                break;
            }
            best = best.max(p.sup_on(0.0, cut));
        }
        best
    }

    /// The piece meeting `t -> 0+`, when the support starts at zero.
    pub fn leading_piece_at_zero(&self) -> Option<&Piece> {
        self.pieces.first().filter(|p| p.lo == 0.0)
    }

    /// The piece extending to infinity, if any.
    pub fn trailing_piece_at_inf(&self) -> Option<&Piece> {
        self.pieces.last().filter(|p| p.hi.is_infinite())
    }

    /// Whether the function is identically zero.
    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(|p| p.coeff == 0.0)
    }

    /// Whether values grow without bound as `t -> ∞`.
    pub fn unbounded_at_inf(&self) -> bool {
        self.trailing_piece_at_inf()
            .is_some_and(|p| matches!(p.limit_at_inf(), Limit::Infinite))
    }
}
