//! Hypothesis checking for the inclusion statements relating Stummel
//! classes, Morrey spaces, and Lorentz spaces, and the quantitative
//! verifications that back them numerically.
//!
//! Every statement is treated as a one-way implication. [`check_theorem`]
//! walks the hypothesis list of one statement and concludes `includes`
//! only when every item holds; a failing item yields `not_applicable`,
//! never "inclusion false", because the converse directions are separate
//! statements with their own counterexamples. Items that cannot be decided
//! from parameters alone (tabulated scales, per-function envelope bounds)
//! stay `unknown` and cap the conclusion at `unknown`.
//!
//! Domination of one scale by another near zero is decided analytically,
//! by lexicographic comparison of the power-log exponents at zero. There
//! is deliberately no sampled fallback: a finite sample cannot certify an
//! inequality on an interval. The constants `c` and `delta` attached to a
//! domination item make the verdict checkable by hand.
//!
//! [`verify_paper`] freezes a battery of membership and norm claims at
//! fixed parameters and reports, per claim, what was expected and what the
//! analyzer computed. Disagreements are data, not errors. Exactly one row
//! is expected to disagree: the weak Morrey norm of `|y|^-n` at a positive
//! index, where the sup over balls far from the origin grows without bound
//! while the printed claim asserts membership. That row carries a
//! discrepancy flag so [`claims_agree`] can treat it as a known exception
//! when deciding an exit code.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::catalog::TestFunction;
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::powerlog::{Piece, Piecewise, Sup};
use crate::quad::IntegralValue;
use crate::scale::{
    check_conditions, product_integral, ConditionReport, ConditionStatus, ScaleFunction,
};
use crate::spaces::{
    classical_morrey_norm, classical_weak_morrey_norm, lorentz_norm, morrey_norm, NormReport,
    NormValue,
};
use crate::stummel::{classify, eta, linear_fit, Membership, ModulusCurve};

/// Identifier of one inclusion statement. The names are claim labels, not
/// citations; [`check_theorem`] documents the hypothesis list behind each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremId {
    /// Stummel into Stummel, same exponent, one scale dominating the other.
    Prop3_1,
    /// Stummel into Stummel, same scale, exponent dropping.
    Prop3_2,
    /// Classical Stummel, same exponent, power index growing.
    Cor3_2,
    /// Classical Stummel, same power index, exponent dropping.
    Cor3_3,
    /// Stummel into Stummel, exponent dropping and scale dominated.
    Cor3_5,
    /// Generalized Morrey into Stummel.
    Thm4_1,
    /// Stummel member with a scale-product envelope into generalized Morrey.
    Thm4_5,
    /// Classical Stummel member with a power envelope into classical Morrey.
    Cor4_6,
    /// Weak generalized Morrey into Stummel, strict exponent drop.
    Thm4_8,
    /// Stummel member with a scale-product envelope into weak Morrey.
    Thm4_9,
    /// Classical weak Morrey into Stummel, strict exponent drop.
    Thm4_10a,
    /// Classical Stummel member with a power envelope into weak Morrey.
    Thm4_10b,
    /// Lorentz nesting in the second index.
    Lem5_4,
    /// Lorentz with second index 1 into the bounded Stummel class.
    Lem5_5,
    /// Lorentz into the bounded Stummel class above the index threshold.
    Thm5_6,
}

impl TheoremId {
    pub const ALL: [TheoremId; 15] = [
        TheoremId::Prop3_1,
        TheoremId::Prop3_2,
        TheoremId::Cor3_2,
        TheoremId::Cor3_3,
        TheoremId::Cor3_5,
        TheoremId::Thm4_1,
        TheoremId::Thm4_5,
        TheoremId::Cor4_6,
        TheoremId::Thm4_8,
        TheoremId::Thm4_9,
        TheoremId::Thm4_10a,
        TheoremId::Thm4_10b,
        TheoremId::Lem5_4,
        TheoremId::Lem5_5,
        TheoremId::Thm5_6,
    ];

    /// Stable lowercase name, identical to the serde form.
    pub fn name(self) -> &'static str {
        match self {
            TheoremId::Prop3_1 => "prop3_1",
            TheoremId::Prop3_2 => "prop3_2",
            TheoremId::Cor3_2 => "cor3_2",
            TheoremId::Cor3_3 => "cor3_3",
            TheoremId::Cor3_5 => "cor3_5",
            TheoremId::Thm4_1 => "thm4_1",
            TheoremId::Thm4_5 => "thm4_5",
            TheoremId::Cor4_6 => "cor4_6",
            TheoremId::Thm4_8 => "thm4_8",
            TheoremId::Thm4_9 => "thm4_9",
            TheoremId::Thm4_10a => "thm4_10a",
            TheoremId::Thm4_10b => "thm4_10b",
            TheoremId::Lem5_4 => "lem5_4",
            TheoremId::Lem5_5 => "lem5_5",
            TheoremId::Thm5_6 => "thm5_6",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<TheoremId> {
        TheoremId::ALL.iter().copied().find(|t| t.name() == s).ok_or_else(|| {
            Error::InvalidDescriptor(format!(
                "unknown theorem id {s:?}; expected one of prop3_1..thm5_6"
            ))
        })
    }
}

/// What a checked hypothesis list licenses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conclusion {
    /// Every hypothesis holds; the inclusion follows.
    Includes,
    /// At least one hypothesis fails; the statement says nothing here.
    NotApplicable,
    /// No hypothesis fails, but at least one could not be decided.
    Unknown,
}

/// One hypothesis with its verdict and, when available, the numeric
/// constant that witnesses it (a doubling constant, a threshold, a
/// domination constant). Failing threshold items keep the threshold as
/// their certificate so reports show how far the parameters missed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisItem {
    pub description: String,
    pub status: ConditionStatus,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certificate: Option<f64>,
}

/// Full record of one statement check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisChecklist {
    pub theorem: TheoremId,
    pub items: Vec<HypothesisItem>,
    pub conclusion: Conclusion,
}

impl HypothesisChecklist {
    fn conclude(theorem: TheoremId, items: Vec<HypothesisItem>) -> HypothesisChecklist {
        let mut conclusion = Conclusion::Includes;
        for it in &items {
            match it.status {
                ConditionStatus::Fails => {
                    conclusion = Conclusion::NotApplicable;
                    break;
                }
                ConditionStatus::Unknown => conclusion = Conclusion::Unknown,
                ConditionStatus::Holds => {}
            }
        }
        HypothesisChecklist { theorem, items, conclusion }
    }

    pub fn includes(&self) -> bool {
        self.conclusion == Conclusion::Includes
    }

    /// Descriptions of the failing items, for error messages.
    pub fn failing(&self) -> Vec<&str> {
        self.items
            .iter()
            .filter(|it| it.status == ConditionStatus::Fails)
            .map(|it| it.description.as_str())
            .collect()
    }
}

/// Parameter bag for [`check_theorem`]. Each statement reads the fields it
/// needs and reports a missing one by name; unused fields are ignored.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TheoremParams {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub psi1: Option<ScaleFunction>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub psi2: Option<ScaleFunction>,
}

fn need(v: Option<f64>, name: &str) -> Result<f64> {
    v.ok_or_else(|| Error::MissingParameter(name.into()))
}

fn need_n(v: Option<u32>) -> Result<u32> {
    v.ok_or_else(|| Error::MissingParameter("n".into()))
}

fn need_psi<'a>(v: &'a Option<ScaleFunction>, name: &str) -> Result<&'a ScaleFunction> {
    v.as_ref().ok_or_else(|| Error::MissingParameter(name.into()))
}

fn item(description: impl Into<String>, holds: bool, certificate: Option<f64>) -> HypothesisItem {
    HypothesisItem {
        description: description.into(),
        status: if holds { ConditionStatus::Holds } else { ConditionStatus::Fails },
        certificate,
    }
}

fn unknown_item(description: impl Into<String>) -> HypothesisItem {
    HypothesisItem {
        description: description.into(),
        status: ConditionStatus::Unknown,
        certificate: None,
    }
}

fn cond_item(
    description: impl Into<String>,
    status: ConditionStatus,
    certificate: Option<f64>,
) -> HypothesisItem {
    let certificate = if status == ConditionStatus::Holds { certificate } else { None };
    HypothesisItem { description: description.into(), status, certificate }
}

fn integrability_item(name: &str, rep: &ConditionReport) -> HypothesisItem {
    cond_item(format!("integral of {name}(t)/t over (0,1) finite"), rep.integrability, None)
}

fn doubling_item(name: &str, rep: &ConditionReport) -> HypothesisItem {
    cond_item(
        format!("{name} comparable across radius doublings"),
        rep.doubling,
        rep.doubling_const,
    )
}

fn kernel_item(name: &str, rep: &ConditionReport) -> HypothesisItem {
    cond_item(
        format!("{name}(t)/t^n almost decreasing"),
        rep.kernel_decay,
        rep.kernel_decay_const,
    )
}

fn right_doubling_item(name: &str, rep: &ConditionReport) -> HypothesisItem {
    cond_item(
        format!("{name} bounded across radius doublings"),
        rep.right_doubling,
        rep.right_doubling_const,
    )
}

/// Decide `small(t) <= c * large(t)` on some `(0, delta]` analytically.
///
/// The verdict is the lexicographic exponent comparison of the two scales
/// at zero; when it holds, `c` is the exact supremum of the ratio over the
/// window where both leading forms are the actual values. Tabulated scales
/// have no leading form and stay unknown.
fn domination_items(small: &ScaleFunction, large: &ScaleFunction) -> Vec<HypothesisItem> {
    let bound_desc = "psi2 <= c * psi1 on a right neighborhood of zero";
    let window_desc = "domination window (0, delta]";
    let (Some((c2, a2, b2)), Some((c1, a1, b1))) =
        (small.leading_at_zero(), large.leading_at_zero())
    else {
        return vec![unknown_item(bound_desc), unknown_item(window_desc)];
    };
    let holds = a2 > a1 || (a2 == a1 && b2 <= b1);
    if !holds {
        return vec![item(bound_desc, false, None), item(window_desc, false, None)];
    }
    let window_end = |psi: &ScaleFunction| match psi {
        ScaleFunction::PowerLog { t0, .. } => *t0,
        _ => 1.0,
    };
    let mut delta = window_end(small).min(window_end(large));
    if b2 != b1 {
        delta = delta.min((-1.0_f64).exp());
    }
    let ratio = Piecewise::new(vec![Piece::new(0.0, delta, c2 / c1, a2 - a1, b2 - b1)]);
    match ratio.sup_prefix(delta) {
        Sup::Finite { value, .. } => vec![
            item(bound_desc, true, Some(value)),
            item(window_desc, true, Some(delta)),
        ],
        Sup::Infinite { .. } => vec![item(bound_desc, false, None), item(window_desc, false, None)],
    }
}

fn product_integral_item(psi1: &ScaleFunction, p2: f64, psi2: &ScaleFunction) -> HypothesisItem {
    let desc = "integral of psi1(t)^p2 psi2(t)/t over (0,1) finite";
    match product_integral(psi1, p2, psi2, 1.0) {
        Ok(IntegralValue::Finite(v)) => item(desc, true, Some(v)),
        Ok(IntegralValue::Divergent) => item(desc, false, None),
        Err(_) => unknown_item(desc),
    }
}

fn envelope_item(desc: &str) -> HypothesisItem {
    unknown_item(format!("{desc} (decided per function, not from parameters)"))
}

/// Check the hypothesis list of `theorem` against `params`.
///
/// The return value records one item per hypothesis with its verdict and
/// certificate. `includes` requires every item to hold; hypotheses about a
/// specific function (the envelope bounds of the Stummel-to-Morrey
/// statements) always stay unknown here and are verified separately by
/// [`fit_envelope`] and [`predict_and_check_morrey`].
pub fn check_theorem(theorem: TheoremId, params: &TheoremParams) -> Result<HypothesisChecklist> {
    let items = match theorem {
        TheoremId::Prop3_1 => {
            let p = need(params.p, "p")?;
            let n = need_n(params.n)?;
            let psi1 = need_psi(&params.psi1, "psi1")?;
            let psi2 = need_psi(&params.psi2, "psi2")?;
            let rep2 = check_conditions(psi2, n)?;
            let mut items = vec![item("p >= 1", p >= 1.0, Some(p)), kernel_item("psi2", &rep2)];
            items.extend(domination_items(psi2, psi1));
            items
        }
        TheoremId::Prop3_2 => {
            let p1 = need(params.p1, "p1")?;
            let p2 = need(params.p2, "p2")?;
            let n = need_n(params.n)?;
            let psi = need_psi(&params.psi1, "psi1")?;
            let rep = check_conditions(psi, n)?;
            vec![
                item("p2 >= 1", p2 >= 1.0, Some(p2)),
                item("p2 <= p1", p2 <= p1, Some(p1)),
                integrability_item("psi1", &rep),
            ]
        }
        TheoremId::Cor3_2 => {
            let p = need(params.p, "p")?;
            let alpha = need(params.alpha, "alpha")?;
            let beta = need(params.beta, "beta")?;
            let nf = need_n(params.n)? as f64;
            vec![
                item("p >= 1", p >= 1.0, Some(p)),
                item("alpha > 0", alpha > 0.0, Some(alpha)),
                item("alpha <= beta", alpha <= beta, Some(beta)),
                item("beta < n", beta < nf, Some(nf)),
            ]
        }
        TheoremId::Cor3_3 => {
            let p1 = need(params.p1, "p1")?;
            let p2 = need(params.p2, "p2")?;
            let alpha = need(params.alpha, "alpha")?;
            let nf = need_n(params.n)? as f64;
            vec![
                item("p2 >= 1", p2 >= 1.0, Some(p2)),
                item("p2 <= p1", p2 <= p1, Some(p1)),
                item("alpha > 0", alpha > 0.0, Some(alpha)),
                item("alpha < n", alpha < nf, Some(nf)),
            ]
        }
        TheoremId::Cor3_5 => {
            let p1 = need(params.p1, "p1")?;
            let p2 = need(params.p2, "p2")?;
            let n = need_n(params.n)?;
            let psi1 = need_psi(&params.psi1, "psi1")?;
            let psi2 = need_psi(&params.psi2, "psi2")?;
            let rep2 = check_conditions(psi2, n)?;
            let mut items = vec![
                item("p2 >= 1", p2 >= 1.0, Some(p2)),
                item("p2 <= p1", p2 <= p1, Some(p1)),
                integrability_item("psi2", &rep2),
                kernel_item("psi2", &rep2),
            ];
            items.extend(domination_items(psi2, psi1));
            items
        }
        TheoremId::Thm4_1 => {
            let p1 = need(params.p1, "p1")?;
            let p2 = need(params.p2, "p2")?;
            let n = need_n(params.n)?;
            let psi1 = need_psi(&params.psi1, "psi1")?;
            let psi2 = need_psi(&params.psi2, "psi2")?;
            let rep1 = check_conditions(psi1, n)?;
            let rep2 = check_conditions(psi2, n)?;
            vec![
                item("p2 >= 1", p2 >= 1.0, Some(p2)),
                item("p2 <= p1", p2 <= p1, Some(p1)),
                doubling_item("psi1", &rep1),
                right_doubling_item("psi2", &rep2),
                product_integral_item(psi1, p2, psi2),
            ]
        }
        TheoremId::Thm4_5 => {
            let p1 = need(params.p1, "p1")?;
            let p2 = need(params.p2, "p2")?;
            let n = need_n(params.n)?;
            let psi1 = need_psi(&params.psi1, "psi1")?;
            let rep1 = check_conditions(psi1, n)?;
            vec![
                item("p2 >= 1", p2 >= 1.0, Some(p2)),
                item("p2 <= p1", p2 <= p1, Some(p1)),
                kernel_item("psi1", &rep1),
                envelope_item("modulus envelope eta(r) <= c psi1(r)^(1/p1) psi2(r)"),
            ]
        }
        TheoremId::Cor4_6 => {
            let p1 = need(params.p1, "p1")?;
            let p2 = need(params.p2, "p2")?;
            let alpha = need(params.alpha, "alpha")?;
            let nf = need_n(params.n)? as f64;
            let crit = alpha * p2 / p1;
            let mut items = vec![
                item("p2 >= 1", p2 >= 1.0, Some(p2)),
                item("p2 <= p1", p2 <= p1, Some(p1)),
                item("alpha > 0", alpha > 0.0, Some(alpha)),
                item("alpha < n", alpha < nf, Some(nf)),
            ];
            match params.sigma {
                Some(sigma) => {
                    items.push(item("sigma > 0", sigma > 0.0, Some(sigma)));
                    items.push(item("sigma < alpha p2 / p1", sigma < crit, Some(crit)));
                }
                None => items.push(unknown_item("sigma in (0, alpha p2 / p1): not supplied")),
            }
            items.push(envelope_item("modulus envelope eta(r) <= c r^(sigma/p2)"));
            items
        }
        TheoremId::Thm4_8 => {
            let p1 = need(params.p1, "p1")?;
            let p2 = need(params.p2, "p2")?;
            let n = need_n(params.n)?;
            let psi1 = need_psi(&params.psi1, "psi1")?;
            let psi2 = need_psi(&params.psi2, "psi2")?;
            let rep1 = check_conditions(psi1, n)?;
            let rep2 = check_conditions(psi2, n)?;
            vec![
                item("p2 >= 1", p2 >= 1.0, Some(p2)),
                item("p2 < p1", p2 < p1, Some(p1)),
                doubling_item("psi1", &rep1),
                right_doubling_item("psi2", &rep2),
                product_integral_item(psi1, p2, psi2),
            ]
        }
        TheoremId::Thm4_9 => {
            let p1 = need(params.p1, "p1")?;
            let p2 = need(params.p2, "p2")?;
            let n = need_n(params.n)?;
            let psi1 = need_psi(&params.psi1, "psi1")?;
            let rep1 = check_conditions(psi1, n)?;
            vec![
                item("p1 >= 1", p1 >= 1.0, Some(p1)),
                item(
                    "p1 <= p2 (as printed; the strong-target statement orders p2 <= p1)",
                    p1 <= p2,
                    Some(p2),
                ),
                kernel_item("psi1", &rep1),
                envelope_item("modulus envelope eta(r) <= c psi1(r)^(1/p1) psi2(r)"),
            ]
        }
        TheoremId::Thm4_10a => {
            let p1 = need(params.p1, "p1")?;
            let p2 = need(params.p2, "p2")?;
            let lambda = need(params.lambda, "lambda")?;
            let alpha = need(params.alpha, "alpha")?;
            let nf = need_n(params.n)? as f64;
            let thr = (nf - lambda) * p2 / p1;
            vec![
                item("p2 >= 1", p2 >= 1.0, Some(p2)),
                item("p2 < p1", p2 < p1, Some(p1)),
                item("lambda >= 0", lambda >= 0.0, Some(lambda)),
                item("lambda < n", lambda < nf, Some(nf)),
                item("alpha > (n - lambda) p2 / p1", alpha > thr, Some(thr)),
                item("alpha < n", alpha < nf, Some(nf)),
            ]
        }
        TheoremId::Thm4_10b => {
            let p = need(params.p, "p")?;
            let alpha = need(params.alpha, "alpha")?;
            let nf = need_n(params.n)? as f64;
            let mut items = vec![
                item("p >= 1", p >= 1.0, Some(p)),
                item("alpha > 0", alpha > 0.0, Some(alpha)),
                item("alpha < n", alpha < nf, Some(nf)),
            ];
            match params.sigma {
                Some(sigma) => items.push(item("sigma > 0", sigma > 0.0, Some(sigma))),
                None => items.push(unknown_item("sigma > 0: not supplied")),
            }
            items.push(envelope_item("modulus envelope eta(r) <= c r^(sigma/p)"));
            items
        }
        TheoremId::Lem5_4 => {
            let kappa = need(params.kappa, "kappa")?;
            let p1 = need(params.p1, "p1")?;
            let p2 = need(params.p2, "p2")?;
            vec![
                item("kappa > 0", kappa > 0.0, Some(kappa)),
                item("p2 > 0", p2 > 0.0, Some(p2)),
                item("p2 <= p1", p2 <= p1, Some(p1)),
            ]
        }
        TheoremId::Lem5_5 => {
            let alpha = need(params.alpha, "alpha")?;
            let nf = need_n(params.n)? as f64;
            vec![
                item("alpha > 0", alpha > 0.0, Some(alpha)),
                item("alpha < n", alpha < nf, Some(nf)),
            ]
        }
        TheoremId::Thm5_6 => {
            let p = need(params.p, "p")?;
            let alpha = need(params.alpha, "alpha")?;
            let kappa = need(params.kappa, "kappa")?;
            let nf = need_n(params.n)? as f64;
            let thr = nf * p / alpha;
            vec![
                item("p >= 1", p >= 1.0, Some(p)),
                item("alpha > 0", alpha > 0.0, Some(alpha)),
                item("alpha < n", alpha < nf, Some(nf)),
                item("kappa >= n p / alpha", kappa >= thr, Some(thr)),
                item("kappa finite", kappa.is_finite(), Some(kappa)),
            ]
        }
    };
    Ok(HypothesisChecklist::conclude(theorem, items))
}

/// Pointwise ratio of the modulus to its guaranteed bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// Largest ratio over the grid; the bound certifies it stays bounded.
    pub max_ratio: f64,
    /// Radius where the largest ratio occurs.
    pub worst_r: f64,
    /// Source Morrey norm used in the denominator.
    pub source_norm: NormValue,
    /// Per-radius ratios, in grid order.
    pub ratios: Vec<(f64, f64)>,
}

/// Compare `eta_{p2,psi2} f(r)` against the product-integral bound
/// `(∫_0^{r/2} psi1^{p2} psi2 / t)^{1/p2} * ||f||` over the grid.
///
/// The hypothesis gate concerns the scales and exponents; whether `f`
/// itself sits in the source space is reported through `source_norm`. The
/// zero function and functions with infinite source norm get ratio 0 at
/// every radius: for the former the modulus vanishes, for the latter the
/// bound holds vacuously.
pub fn verify_quantitative_bound(
    f: &TestFunction,
    p1: f64,
    p2: f64,
    psi1: &ScaleFunction,
    psi2: &ScaleFunction,
    grid: &RadialGrid,
) -> Result<BoundReport> {
    let params = TheoremParams {
        n: Some(f.dimension()),
        p1: Some(p1),
        p2: Some(p2),
        psi1: Some(psi1.clone()),
        psi2: Some(psi2.clone()),
        ..Default::default()
    };
    let checklist = check_theorem(TheoremId::Thm4_1, &params)?;
    if !checklist.includes() {
        return Err(Error::InapplicableHypotheses(checklist.failing().join("; ")));
    }
    let norm_value = morrey_norm(f, p1, psi1)?.value;
    let source_norm = match norm_value {
        NormValue::Finite(v) if v > 0.0 => v,
        degenerate => {
            let ratios = grid.radii().iter().map(|&r| (r, 0.0)).collect();
            return Ok(BoundReport {
                max_ratio: 0.0,
                worst_r: grid.r_min(),
                source_norm: degenerate,
                ratios,
            });
        }
    };
    let ratios: Vec<(f64, f64)> = grid
        .radii()
        .par_iter()
        .map(|&r| -> Result<(f64, f64)> {
            let num = match eta(f, p2, psi2, r)? {
                IntegralValue::Finite(v) => v,
                IntegralValue::Divergent => f64::INFINITY,
            };
            let bound = match product_integral(psi1, p2, psi2, r / 2.0)? {
                IntegralValue::Finite(v) => v.powf(1.0 / p2),
                IntegralValue::Divergent => {
                    return Err(Error::InapplicableHypotheses(
                        "product integral divergent inside the grid".into(),
                    ))
                }
            };
            Ok((r, num / (bound * source_norm)))
        })
        .collect::<Result<_>>()?;
    let (worst_r, max_ratio) = ratios
        .iter()
        .fold((grid.r_min(), 0.0), |acc, &(r, q)| if q > acc.1 { (r, q) } else { acc });
    Ok(BoundReport { max_ratio, worst_r, source_norm: NormValue::Finite(source_norm), ratios })
}

/// Power-law envelope fitted to the small-radius end of a modulus curve.
/// The envelope reads `eta(r) <= c r^(sigma/p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeFit {
    /// Fitted decay exponent, reported at nine significant decimals.
    pub sigma: f64,
    pub c: f64,
    /// Largest relative deviation of the curve from the fitted power law.
    pub residual: f64,
    /// Integrability exponent the curve was computed with.
    pub p: f64,
    pub points_used: usize,
}

/// Number of small radii the envelope fit reads; hypotheses about the
/// envelope concern r -> 0, so larger radii would only pollute the slope.
const ENVELOPE_POINTS: usize = 16;

/// Reads a fitted exponent at nine significant decimals. Morrey membership
/// at a predicted index flips on any deviation from the exact exponent,
/// while the regression's trailing digits are rounding noise, so exponents
/// are reported only to the precision the fit can support.
fn snap_decimal(x: f64) -> f64 {
    format!("{x:.8e}").parse().unwrap_or(x)
}

/// Least-squares fit of `log eta` against `log r` on the smallest grid
/// radii with finite positive values.
pub fn fit_envelope(curve: &ModulusCurve) -> Result<EnvelopeFit> {
    let mut pts: Vec<(f64, f64)> =
        curve.finite_points().into_iter().filter(|&(_, v)| v > 0.0).collect();
    pts.truncate(ENVELOPE_POINTS);
    if pts.len() < 4 {
        return Err(Error::UnfittableCurve);
    }
    let xs: Vec<f64> = pts.iter().map(|(r, _)| r.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|(_, v)| v.ln()).collect();
    let (slope, intercept, _) = linear_fit(&xs, &ys).ok_or(Error::UnfittableCurve)?;
    let residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| ((y - slope * x - intercept).exp() - 1.0).abs())
        .fold(0.0_f64, f64::max);
    Ok(EnvelopeFit {
        sigma: snap_decimal(curve.p * slope),
        c: intercept.exp(),
        residual,
        p: curve.p,
        points_used: pts.len(),
    })
}

/// Largest fit residual accepted before a prediction is made.
pub const RESIDUAL_THRESHOLD: f64 = 1e-3;

/// Outcome of an envelope-driven Morrey membership check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorreyPrediction {
    pub sigma: f64,
    /// Predicted second index `n + sigma - alpha p2/p1`.
    pub lambda: f64,
    /// True when sigma sits at `alpha p2/p1`, the degenerate `lambda = n`
    /// endpoint.
    pub boundary: bool,
    pub strong: NormReport,
    /// Weak-index variant `n - alpha + sigma`, evaluated when `p1 = p2`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub weak: Option<NormReport>,
}

impl MorreyPrediction {
    /// Every evaluated norm came out finite.
    pub fn passed(&self) -> bool {
        !self.strong.value.is_infinite()
            && self.weak.as_ref().map_or(true, |w| !w.value.is_infinite())
    }
}

/// Turn a fitted envelope into a Morrey index prediction and evaluate the
/// predicted norms.
///
/// A fit with residual at or above [`RESIDUAL_THRESHOLD`] is refused: the
/// prediction formula reads the envelope exponent, and a curve that is not
/// a power law has no meaningful exponent. A fitted `sigma` outside
/// `(0, alpha p2/p1]` leaves the statement's admissible range; the
/// boundary point itself is allowed and reported as such.
pub fn predict_and_check_morrey(
    fit: &EnvelopeFit,
    f: &TestFunction,
    p1: f64,
    p2: f64,
    alpha: f64,
    n: u32,
) -> Result<MorreyPrediction> {
    if !(fit.residual < RESIDUAL_THRESHOLD) {
        return Err(Error::ResidualTooLarge {
            residual: fit.residual,
            threshold: RESIDUAL_THRESHOLD,
        });
    }
    if f.dimension() != n {
        return Err(Error::InvalidDescriptor(format!(
            "function lives in dimension {}, prediction asked for {n}",
            f.dimension()
        )));
    }
    let nf = n as f64;
    let crit = alpha * p2 / p1;
    if !(fit.sigma > 0.0) {
        return Err(Error::InapplicableHypotheses(format!(
            "fitted envelope exponent sigma = {} is not positive",
            fit.sigma
        )));
    }
    let boundary = (fit.sigma - crit).abs() <= 1e-9 * crit.max(1.0);
    if fit.sigma > crit && !boundary {
        return Err(Error::InapplicableHypotheses(format!(
            "fitted sigma = {} exceeds the admissible bound alpha p2/p1 = {crit}",
            fit.sigma
        )));
    }
    let lambda = if boundary { nf } else { nf + fit.sigma - crit };
    let strong = classical_morrey_norm(f, p2, lambda)?;
    let weak = if p1 == p2 {
        let lw = if boundary { nf } else { nf - alpha + fit.sigma };
        Some(classical_weak_morrey_norm(f, p2, lw)?)
    } else {
        None
    };
    Ok(MorreyPrediction { sigma: fit.sigma, lambda, boundary, strong, weak })
}

/// One frozen claim with the analyzer's verdict next to the expected one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimRow {
    pub claim_id: String,
    pub paper_anchor: String,
    pub params: serde_json::Value,
    pub expected: String,
    pub computed: String,
    pub agrees: bool,
    #[serde(default)]
    pub note: String,
    /// Known discrepancy: the row is expected to disagree and does not
    /// fail the run. Serialized only when set.
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub flagged: bool,
}

/// Exit-code predicate: every row agrees, except rows carrying the
/// discrepancy flag.
pub fn claims_agree(rows: &[ClaimRow]) -> bool {
    rows.iter().all(|r| r.agrees || r.flagged)
}

fn status_word(m: Membership) -> &'static str {
    match m {
        Membership::Member => "member",
        Membership::NonMember => "non_member",
        Membership::Inconclusive => "inconclusive",
    }
}

fn norm_word(v: &NormValue) -> String {
    match v {
        NormValue::Finite(x) => format!("finite ({x:.6})"),
        NormValue::Infinite => "infinite".into(),
    }
}

fn conclusion_word(c: Conclusion) -> &'static str {
    match c {
        Conclusion::Includes => "includes",
        Conclusion::NotApplicable => "not_applicable",
        Conclusion::Unknown => "unknown",
    }
}

struct ClaimSpec {
    claim_id: &'static str,
    paper_anchor: &'static str,
    params: serde_json::Value,
    expected: &'static str,
    note: &'static str,
    flagged: bool,
    compute: Box<dyn Fn() -> Result<(String, bool)> + Send + Sync>,
}

impl ClaimSpec {
    fn run(self) -> ClaimRow {
        let (computed, agrees) = match (self.compute)() {
            Ok(pair) => pair,
            Err(e) => (format!("error: {e}"), false),
        };
        ClaimRow {
            claim_id: self.claim_id.into(),
            paper_anchor: self.paper_anchor.into(),
            params: self.params,
            expected: self.expected.into(),
            computed,
            agrees,
            note: self.note.into(),
            flagged: self.flagged,
        }
    }
}

fn gate_claim(
    claim_id: &'static str,
    paper_anchor: &'static str,
    theorem: TheoremId,
    params: TheoremParams,
    expected_conclusion: Conclusion,
    expected: &'static str,
    note: &'static str,
) -> ClaimSpec {
    let shown = serde_json::to_value(&params).unwrap_or(serde_json::Value::Null);
    ClaimSpec {
        claim_id,
        paper_anchor,
        params: shown,
        expected,
        note,
        flagged: false,
        compute: Box::new(move || {
            let checklist = check_theorem(theorem, &params)?;
            let mut computed = conclusion_word(checklist.conclusion).to_string();
            let failing = checklist.failing();
            if !failing.is_empty() {
                computed.push_str(&format!(" (failing: {})", failing.join("; ")));
            }
            Ok((computed, checklist.conclusion == expected_conclusion))
        }),
    }
}

/// Run the frozen claim battery at desk-scale parameters.
///
/// Rows are computed concurrently and returned sorted by claim id, so the
/// report is deterministic. Exactly one row carries the discrepancy flag;
/// see the module documentation.
pub fn verify_paper() -> Vec<ClaimRow> {
    let pp = ScaleFunction::pure_power;
    let grid = RadialGrid::default_grid;
    let specs: Vec<ClaimSpec> = vec![
        ClaimSpec {
            claim_id: "cor3_2_proper",
            paper_anchor: "cor3.2 remark",
            params: json!({"n": 1, "p": 1.0, "alpha": 0.25, "beta": 0.5}),
            expected: "member at beta=0.5, non_member at alpha=0.25",
            note: "witness (chi_B / (|y|^beta |ln|y||^2))^(1/p), B = B(0, e^(-2/beta))",
            flagged: false,
            compute: Box::new(move || {
                let f = TestFunction::log_decay_member(1, 1.0, &pp(0.5))?;
                let at_beta = classify(&f, 1.0, &pp(0.5), &grid())?;
                let at_alpha = classify(&f, 1.0, &pp(0.25), &grid())?;
                let computed = format!(
                    "beta: {}, alpha: {}",
                    status_word(at_beta.vanishing.status),
                    status_word(at_alpha.bounded.status)
                );
                let agrees = at_beta.vanishing.status == Membership::Member
                    && at_alpha.bounded.status == Membership::NonMember;
                Ok((computed, agrees))
            }),
        },
        ClaimSpec {
            claim_id: "cor3_3_proper",
            paper_anchor: "cor3.3 remark",
            params: json!({"n": 1, "p1": 2.0, "p2": 1.0, "alpha": 0.5, "gamma": 0.3}),
            expected: "member at p2=1, non_member at p1=2",
            note: "witness |y|^-gamma with alpha/p1 < gamma < min(alpha/p2, n/p1)",
            flagged: false,
            compute: Box::new(move || {
                let f = TestFunction::radial_power(1, 0.3);
                let low = classify(&f, 1.0, &pp(0.5), &grid())?;
                let high = classify(&f, 2.0, &pp(0.5), &grid())?;
                let computed = format!(
                    "p2: {}, p1: {}",
                    status_word(low.vanishing.status),
                    status_word(high.bounded.status)
                );
                let agrees = low.vanishing.status == Membership::Member
                    && high.bounded.status == Membership::NonMember;
                Ok((computed, agrees))
            }),
        },
        ClaimSpec {
            claim_id: "ex4_3",
            paper_anchor: "example 4.3",
            params: json!({"n": 1, "p1": 1.0, "p2": 1.0, "psi1": "t^-0.25", "psi2": "t^0.5"}),
            expected: "member of the vanishing class at psi2, source Morrey norm infinite",
            note: "the log-decay member separates the Stummel class from the Morrey space",
            flagged: false,
            compute: Box::new(move || {
                let f = TestFunction::log_decay_member(1, 1.0, &pp(0.5))?;
                let stummel = classify(&f, 1.0, &pp(0.5), &grid())?;
                let morrey = morrey_norm(&f, 1.0, &pp(-0.25))?;
                let computed = format!(
                    "stummel: {}, morrey norm: {}",
                    status_word(stummel.vanishing.status),
                    norm_word(&morrey.value)
                );
                let agrees = stummel.vanishing.status == Membership::Member
                    && morrey.value.is_infinite();
                Ok((computed, agrees))
            }),
        },
        ClaimSpec {
            claim_id: "ex5_2",
            paper_anchor: "example 5.2",
            params: json!({"n": 1, "p": 1.0, "alpha": 0.5, "k_max": 14}),
            expected: "bounded-class member, vanishing-class non_member, lower bound 4",
            note: "each bump contributes kernel mass 4 when fully inside the ball",
            flagged: false,
            compute: Box::new(move || {
                let f = TestFunction::bump_sum(1, 0.5, 14, 1.0);
                let rep = classify(&f, 1.0, &pp(0.5), &grid())?;
                let bound = rep.vanishing.evidence.lower_bound.unwrap_or(0.0);
                let computed = format!(
                    "bounded: {}, vanishing: {}, lower bound {bound:.9}",
                    status_word(rep.bounded.status),
                    status_word(rep.vanishing.status)
                );
                let agrees = rep.bounded.status == Membership::Member
                    && rep.vanishing.status == Membership::NonMember
                    && (bound - 4.0).abs() <= 1e-6;
                Ok((computed, agrees))
            }),
        },
        gate_claim(
            "thm4_1_in_range",
            "thm4.1",
            TheoremId::Thm4_1,
            TheoremParams {
                n: Some(1),
                p1: Some(1.0),
                p2: Some(1.0),
                psi1: Some(pp(-0.5)),
                psi2: Some(pp(0.75)),
                ..Default::default()
            },
            Conclusion::Includes,
            "includes",
            "classical window n - lambda < alpha < n at lambda = 0.5",
        ),
        gate_claim(
            "thm4_1_critical",
            "thm4.1",
            TheoremId::Thm4_1,
            TheoremParams {
                n: Some(1),
                p1: Some(1.0),
                p2: Some(1.0),
                psi1: Some(pp(-0.5)),
                psi2: Some(pp(0.5)),
                ..Default::default()
            },
            Conclusion::NotApplicable,
            "not_applicable",
            "alpha = n - lambda makes the product integrand 1/t, which diverges",
        ),
        gate_claim(
            "thm5_6_below",
            "thm5.6",
            TheoremId::Thm5_6,
            TheoremParams {
                n: Some(1),
                p: Some(1.0),
                alpha: Some(0.5),
                kappa: Some(1.5),
                ..Default::default()
            },
            Conclusion::NotApplicable,
            "not_applicable",
            "kappa below the threshold n p / alpha = 2",
        ),
        gate_claim(
            "thm5_6_at",
            "thm5.6",
            TheoremId::Thm5_6,
            TheoremParams {
                n: Some(1),
                p: Some(1.0),
                alpha: Some(0.5),
                kappa: Some(2.0),
                ..Default::default()
            },
            Conclusion::Includes,
            "includes",
            "the threshold itself is admissible",
        ),
        ClaimSpec {
            claim_id: "thm5_6_tail",
            paper_anchor: "thm5.6 remark",
            params: json!({"n": 1, "alpha": 0.5, "kappa": 3.0, "p": 1.0}),
            expected: "finite at kappa=3, infinite at kappa=n/alpha=2",
            note: "witness |x|^-alpha outside the unit ball; nesting in kappa is proper",
            flagged: false,
            compute: Box::new(move || {
                let f = TestFunction::tail_power(1, 0.5);
                let wide = lorentz_norm(&f, 3.0, 1.0)?;
                let tight = lorentz_norm(&f, 2.0, 1.0)?;
                let computed =
                    format!("kappa=3: {}, kappa=2: {}", norm_word(&wide), norm_word(&tight));
                let agrees = !wide.is_infinite() && tight.is_infinite();
                Ok((computed, agrees))
            }),
        },
        gate_claim(
            "lem5_5_gate",
            "lem5.5",
            TheoremId::Lem5_5,
            TheoremParams { n: Some(1), alpha: Some(0.5), ..Default::default() },
            Conclusion::Includes,
            "includes",
            "",
        ),
        ClaimSpec {
            claim_id: "thm4_10_weak_zero",
            paper_anchor: "thm4.10 remark",
            params: json!({"n": 1, "p": 1.0, "lambda": 0.0, "alpha": 0.75}),
            expected: "weak norm 2 at lambda=0, modulus divergent at alpha=0.75",
            note: "|y|^-n sits in the weak space at lambda = 0 yet in no Stummel class \
                   with alpha above n - lambda",
            flagged: false,
            compute: Box::new(move || {
                let f = TestFunction::radial_power(1, 1.0);
                let weak = classical_weak_morrey_norm(&f, 1.0, 0.0)?;
                let rep = classify(&f, 1.0, &pp(0.75), &grid())?;
                let ok_norm = match weak.value {
                    NormValue::Finite(v) => (v - 2.0).abs() <= 1e-9 * 2.0,
                    NormValue::Infinite => false,
                };
                let computed = format!(
                    "weak norm: {}, modulus: {}",
                    norm_word(&weak.value),
                    status_word(rep.bounded.status)
                );
                Ok((computed, ok_norm && rep.bounded.status == Membership::NonMember))
            }),
        },
        ClaimSpec {
            claim_id: "thm4_10_weak_positive",
            paper_anchor: "thm4.10 remark",
            params: json!({"n": 1, "p": 1.0, "lambda": 0.5}),
            expected: "finite weak norm for every lambda in [0, n)",
            note: "discrepancy: balls B(x, r) with |x| large and r ~ |x| give the weak \
                   quasinorm a factor r^(lambda/p) that grows without bound for \
                   lambda > 0, so the computed norm is infinite; flagged as a known \
                   exception, the run's exit code ignores this row",
            flagged: true,
            compute: Box::new(move || {
                let f = TestFunction::radial_power(1, 1.0);
                let weak = classical_weak_morrey_norm(&f, 1.0, 0.5)?;
                let computed = format!("weak norm: {}", norm_word(&weak.value));
                Ok((computed, !weak.value.is_infinite()))
            }),
        },
        ClaimSpec {
            claim_id: "thm4_9_ordering",
            paper_anchor: "thm4.9 vs thm4.5",
            params: json!({"n": 1, "strong": {"p1": 2.0, "p2": 1.0}, "weak": {"p1": 1.0, "p2": 2.0}}),
            expected: "no failing items under either printed ordering",
            note: "the strong-target statement orders p2 <= p1 while the weak-target \
                   one prints 1 <= p1 <= p2; each is implemented as printed",
            flagged: false,
            compute: Box::new(move || {
                let strong = check_theorem(
                    TheoremId::Thm4_5,
                    &TheoremParams {
                        n: Some(1),
                        p1: Some(2.0),
                        p2: Some(1.0),
                        psi1: Some(pp(0.5)),
                        ..Default::default()
                    },
                )?;
                let weak = check_theorem(
                    TheoremId::Thm4_9,
                    &TheoremParams {
                        n: Some(1),
                        p1: Some(1.0),
                        p2: Some(2.0),
                        psi1: Some(pp(0.5)),
                        ..Default::default()
                    },
                )?;
                let computed = format!(
                    "strong-target: {}, weak-target: {}",
                    conclusion_word(strong.conclusion),
                    conclusion_word(weak.conclusion)
                );
                Ok((computed, strong.failing().is_empty() && weak.failing().is_empty()))
            }),
        },
    ];
    let mut rows: Vec<ClaimRow> = specs.into_par_iter().map(ClaimSpec::run).collect();
    rows.sort_by(|a, b| a.claim_id.cmp(&b.claim_id));
    rows
}
