//! Seeded numerical verification of the algebraic laws.
//!
//! Every law id runs one or more [`Check`]s over randomly drawn events and
//! times and folds them into an [`AxiomReport`]. Runs are deterministic for a
//! given seed and configuration.
//!
//! | law id | statement checked |
//! |---|---|
//! | `T1-assoc` | f-product, anti-product and centered products are associative and commutative |
//! | `T1-neutral` | `o = (0,0,1)` is neutral for the f-product |
//! | `T1-inverse` | `(-t,-h,1/c)` inverts every nonzero event; zero events have no inverse |
//! | `T1-components` | strict credits closed under the f-product, strict debts under the anti-product |
//! | `T1-isomorphism` | the opposite map intertwines f-product and anti-product |
//! | `T2-anti` | the anti-product is a commutative group law on nonzero events with neutral `-o` |
//! | `T3-oneparam` | `μ_o(t) μ_o(t') = μ_o(t + t')` |
//! | `T4-translation-group` | `(e, e') ↦ e e' e0⁻¹` is a semigroup law with neutral `e0` and inverse `e⁻¹ e0²` |
//! | `T5-translation-identity` | centered product equals the translated f-product |
//! | `T6-centered-neutral` | `e0` is neutral for the centered product |
//! | `T6b-double-translation` | `μ_e0(t) = μ_o(t - t0) e0` |
//! | `T8-homomorphism` | `[μ(t) \| μ(t')]_e0 = μ(t +_t0 t')` |
//! | `T9-tangent` | tangent `(1, 1, c0 δ_f(h0))` at `t0`, finite-difference agreement, uniqueness surrogate |
//! | `D1-factor-axioms` | factor axioms on the default grid |
//! | `P1-partials-fd` | analytic partials of product and inverse against central differences |

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::algebra::{
    centered_product, f_anti_product, f_inverse, f_product, inverse_partials, product_partials,
    translate, translated_inverse, ProductKind,
};
use crate::capfactor::{validate_factor, Capitalization, DEFAULT_GRID, DEFAULT_TOL_RECIP};
use crate::error::{Error, Result};
use crate::events::Event;
use crate::evolution::{double_translate_unit, EvolutionCurve};
use crate::numeric::{central_difference, fd_error, fd_step, max_scaled_error, scaled_error};

pub const LAW_IDS: [&str; 15] = [
    "T1-assoc",
    "T1-neutral",
    "T1-inverse",
    "T1-components",
    "T1-isomorphism",
    "T2-anti",
    "T3-oneparam",
    "T4-translation-group",
    "T5-translation-identity",
    "T6-centered-neutral",
    "T6b-double-translation",
    "T8-homomorphism",
    "T9-tangent",
    "D1-factor-axioms",
    "P1-partials-fd",
];

pub const DEFAULT_SEED: u64 = 20_240_601;

/// Sampling sizes and tolerances for the law checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Random samples (events, triples or time pairs) per check.
    pub samples: usize,
    pub atol: f64,
    pub rtol: f64,
    /// Times are drawn from `[-time_range, time_range]`.
    pub time_range: f64,
    /// Event times and capitalization times are drawn from `[-event_range, event_range]`.
    pub event_range: f64,
    /// Capitals are drawn with magnitude in `[min_capital, max_capital]`.
    pub min_capital: f64,
    pub max_capital: f64,
    /// Tolerance for identities that hold up to a few roundings.
    pub exact_tol: f64,
    /// Tolerance for analytic-vs-central-difference comparisons.
    pub fd_tol: f64,
    /// Points of the uniform time grid for the double-translation law.
    pub grid_points: usize,
    /// Relative capital perturbation that the uniqueness check must detect.
    pub perturbation: f64,
    pub tol_recip: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: DEFAULT_SEED,
            samples: 200,
            atol: 1e-12,
            rtol: 1e-9,
            time_range: 20.0,
            event_range: 10.0,
            min_capital: 1e-3,
            max_capital: 100.0,
            exact_tol: 1e-12,
            fd_tol: 1e-6,
            grid_points: 101,
            perturbation: 1e-3,
            tol_recip: DEFAULT_TOL_RECIP,
        }
    }
}

impl VerifyConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Tolerance on the scaled residual `|a - b| / max(1, |b|)` of the
    /// algebraic laws.
    pub fn law_tolerance(&self) -> f64 {
        self.atol + self.rtol
    }
}

fn serialize_real<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_str(&x.to_string())
    }
}

/// One measured quantity inside a law. Passes iff `max_residual <= tolerance`.
/// Counting checks (sign closure, rejected inverses) use the number of
/// violations as residual and tolerance zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub samples: usize,
    #[serde(serialize_with = "serialize_real")]
    pub max_residual: f64,
    #[serde(serialize_with = "serialize_real")]
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn upper(name: &str, samples: usize, max_residual: f64, tolerance: f64) -> Self {
        let max_residual = if max_residual.is_nan() {
            f64::INFINITY
        } else {
            max_residual
        };
        Check {
            name: name.to_string(),
            samples,
            max_residual,
            tolerance,
            passed: max_residual <= tolerance,
        }
    }

    fn severity(&self) -> (bool, f64) {
        let ratio = if self.tolerance > 0.0 {
            self.max_residual / self.tolerance
        } else if self.max_residual > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        (!self.passed, ratio)
    }
}

/// Pass/fail record of one law.
///
/// `max_residual` and `tolerance` are those of the most severe check (a
/// failing one if any), so `passed == (max_residual <= tolerance)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub law_id: String,
    pub samples: usize,
    #[serde(serialize_with = "serialize_real")]
    pub max_residual: f64,
    #[serde(serialize_with = "serialize_real")]
    pub tolerance: f64,
    pub passed: bool,
    pub seed: Option<u64>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl AxiomReport {
    pub fn from_checks(
        law_id: &str,
        seed: Option<u64>,
        checks: Vec<Check>,
        notes: Vec<String>,
    ) -> Self {
        let worst = checks
            .iter()
            .max_by(|a, b| {
                let (fa, ra) = a.severity();
                let (fb, rb) = b.severity();
                fa.cmp(&fb).then(ra.total_cmp(&rb))
            })
            .cloned()
            .unwrap_or_else(|| Check::upper("none", 0, 0.0, 0.0));
        AxiomReport {
            law_id: law_id.to_string(),
            samples: checks.iter().map(|c| c.samples).sum(),
            max_residual: worst.max_residual,
            tolerance: worst.tolerance,
            passed: checks.iter().all(|c| c.passed),
            seed,
            checks,
            notes,
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Human-readable summary, one line per law followed by its checks.
pub fn render_table(reports: &[AxiomReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<30} {:>7} {:>12} {:>12}  result",
        "law", "samples", "residual", "tolerance"
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{:<30} {:>7} {:>12.3e} {:>12.3e}  {}",
            r.law_id,
            r.samples,
            r.max_residual,
            r.tolerance,
            if r.passed { "PASS" } else { "FAIL" }
        );
        for c in &r.checks {
            let _ = writeln!(
                out,
                "  {:<28} {:>7} {:>12.3e} {:>12.3e}  {}",
                c.name,
                c.samples,
                c.max_residual,
                c.tolerance,
                if c.passed { "ok" } else { "FAIL" }
            );
        }
        for n in &r.notes {
            let _ = writeln!(out, "  note: {n}");
        }
    }
    out
}

/// Runs a single law.
pub fn run_law<C: Capitalization + ?Sized>(
    law_id: &str,
    f: &C,
    config: &VerifyConfig,
) -> Result<AxiomReport> {
    let mut law = Law::new(f, config);
    match law_id {
        "T1-assoc" => law.assoc(),
        "T1-neutral" => law.neutral(),
        "T1-inverse" => law.inverse(),
        "T1-components" => law.components(),
        "T1-isomorphism" => law.isomorphism(),
        "T2-anti" => law.anti(),
        "T3-oneparam" => law.one_parameter(),
        "T4-translation-group" => law.translation_group(),
        "T5-translation-identity" => law.translation_identity(),
        "T6-centered-neutral" => law.centered_neutral(),
        "T6b-double-translation" => law.double_translation(),
        "T8-homomorphism" => law.homomorphism(),
        "T9-tangent" => law.tangent(),
        "D1-factor-axioms" => {
            return Ok(validate_factor(f, &DEFAULT_GRID, config.tol_recip));
        }
        "P1-partials-fd" => law.partials(),
        _ => {
            return Err(Error::UnknownLaw {
                id: law_id.to_string(),
                available: LAW_IDS.iter().map(|s| s.to_string()).collect(),
            })
        }
    }
    Ok(AxiomReport::from_checks(
        law_id,
        Some(config.seed),
        law.checks,
        law.notes,
    ))
}

/// Runs every law. Individual failures are reported, not returned as errors.
pub fn run_all<C: Capitalization + ?Sized>(f: &C, config: &VerifyConfig) -> Vec<AxiomReport> {
    LAW_IDS
        .iter()
        .map(|id| run_law(id, f, config).expect("every listed law id is known"))
        .collect()
}

/// Homomorphism law `[μ(t) | μ(t')]_e0 = μ(t +_t0 t')` for one curve, over
/// seeded pairs drawn from `anchor ± time_range`.
pub fn curve_homomorphism<C: Capitalization>(
    curve: &EvolutionCurve<C>,
    config: &VerifyConfig,
) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (e0, line) = (curve.base(), curve.time_line());
    let r = config.time_range;
    let mut acc = Acc::new();
    for _ in 0..config.samples {
        let t = line.t0 + rng.random_range(-r..=r);
        let t2 = line.t0 + rng.random_range(-r..=r);
        acc.record((|| {
            let lhs = centered_product(curve.factor(), &e0, &curve.evolve(t)?, &curve.evolve(t2)?)?;
            Ok(err3(lhs, curve.evolve(line.add(t, t2))?))
        })());
    }
    acc.finish(
        "curve_homomorphism",
        config.law_tolerance(),
        &mut Vec::new(),
    )
}

pub fn all_passed(reports: &[AxiomReport]) -> bool {
    reports.iter().all(|r| r.passed)
}

/// Running maximum of a residual; evaluation errors count as infinite.
struct Acc {
    max: f64,
    samples: usize,
    errors: usize,
}

impl Acc {
    fn new() -> Self {
        Acc {
            max: 0.0,
            samples: 0,
            errors: 0,
        }
    }

    fn record(&mut self, r: Result<f64>) {
        self.samples += 1;
        match r {
            Ok(x) if !x.is_nan() => self.max = self.max.max(x),
            Ok(_) => self.max = f64::INFINITY,
            Err(_) => {
                self.errors += 1;
                self.max = f64::INFINITY;
            }
        }
    }

    /// Counts `false` as one violation.
    fn record_bool(&mut self, r: Result<bool>) {
        self.record(r.map(|ok| if ok { 0.0 } else { 1.0 }));
    }

    fn finish(self, name: &str, tol: f64, notes: &mut Vec<String>) -> Check {
        if self.errors > 0 {
            notes.push(format!("{name}: {} evaluations failed", self.errors));
        }
        Check::upper(name, self.samples, self.max, tol)
    }
}

fn err3(a: Event, b: Event) -> f64 {
    max_scaled_error(a.to_array(), b.to_array())
}

struct Law<'a, C: ?Sized> {
    f: &'a C,
    cfg: &'a VerifyConfig,
    rng: ChaCha8Rng,
    kinks: Vec<f64>,
    checks: Vec<Check>,
    notes: Vec<String>,
}

impl<'a, C: Capitalization + ?Sized> Law<'a, C> {
    fn new(f: &'a C, cfg: &'a VerifyConfig) -> Self {
        Law {
            f,
            cfg,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            kinks: f.kinks(),
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn tol(&self) -> f64 {
        self.cfg.law_tolerance()
    }

    fn push(&mut self, name: &str, acc: Acc, tol: f64) {
        let check = acc.finish(name, tol, &mut self.notes);
        self.checks.push(check);
    }

    fn uniform(&mut self, range: f64) -> f64 {
        self.rng.random_range(-range..=range)
    }

    fn capital(&mut self) -> f64 {
        let m = self
            .rng
            .random_range(self.cfg.min_capital..=self.cfg.max_capital);
        if self.rng.random_bool(0.5) {
            -m
        } else {
            m
        }
    }

    /// Random invertible event.
    fn event(&mut self) -> Event {
        let r = self.cfg.event_range;
        Event::new(self.uniform(r), self.uniform(r), self.capital())
    }

    fn event_with_sign(&mut self, positive: bool) -> Event {
        let e = self.event();
        Event::new(e.t, e.h, if positive { e.c.abs() } else { -e.c.abs() })
    }

    fn time(&mut self) -> f64 {
        self.uniform(self.cfg.time_range)
    }

    /// True when every argument is clear of the factor's kinks, so that
    /// central differences do not straddle one.
    fn clear_of_kinks(&self, args: &[f64]) -> bool {
        args.iter().all(|&x| {
            let clearance = 100.0 * fd_step(x);
            self.kinks.iter().all(|k| (x - k).abs() >= clearance)
        })
    }

    fn kink_note(&mut self, skipped: usize) {
        if skipped > 0 {
            self.notes.push(format!(
                "{skipped} draws within finite-difference reach of a factor kink were redrawn"
            ));
        }
    }

    fn assoc(&mut self) {
        let f = self.f;
        let mut accs = [Acc::new(), Acc::new(), Acc::new()];
        let mut comm = Acc::new();
        for _ in 0..self.cfg.samples {
            let (a, b, c, e0) = (self.event(), self.event(), self.event(), self.event());
            let kinds = [
                ProductKind::FProduct,
                ProductKind::FAntiProduct,
                ProductKind::Centered(e0),
            ];
            for (acc, kind) in accs.iter_mut().zip(kinds) {
                acc.record((|| {
                    let l = kind.apply(f, &kind.apply(f, &a, &b)?, &c)?;
                    let r = kind.apply(f, &a, &kind.apply(f, &b, &c)?)?;
                    Ok(err3(l, r))
                })());
            }
            comm.record((|| Ok(err3(f_product(f, &a, &b)?, f_product(f, &b, &a)?)))());
        }
        let tol = self.tol();
        let [p, anti, centered] = accs;
        self.push("assoc_f_product", p, tol);
        self.push("assoc_anti_product", anti, tol);
        self.push("assoc_centered", centered, tol);
        self.push("commutativity", comm, tol);
    }

    fn neutral(&mut self) {
        let f = self.f;
        let (mut right, mut left) = (Acc::new(), Acc::new());
        for _ in 0..self.cfg.samples {
            let mut e = self.event();
            if self.rng.random_bool(0.1) {
                e.c = 0.0;
            }
            right.record(f_product(f, &e, &Event::UNIT).map(|p| err3(p, e)));
            left.record(f_product(f, &Event::UNIT, &e).map(|p| err3(p, e)));
        }
        let tol = self.tol();
        self.push("neutral_right", right, tol);
        self.push("neutral_left", left, tol);
    }

    fn inverse(&mut self) {
        let f = self.f;
        let (mut inv, mut zero) = (Acc::new(), Acc::new());
        for _ in 0..self.cfg.samples {
            let e = self.event();
            inv.record((|| {
                Ok(err3(f_product(f, &e, &f_inverse(&e)?)?, Event::UNIT))
            })());
            // a zero event has no inverse: f_inverse refuses it and no product reaches o
            let z = Event::new(e.t, e.h, 0.0);
            let x = self.event();
            zero.record_bool(f_product(f, &z, &x).map(|p| f_inverse(&z).is_err() && p.c == 0.0));
        }
        let tol = self.tol();
        self.push("inverse", inv, tol);
        self.push("zero_events_not_invertible", zero, 0.0);
    }

    fn components(&mut self) {
        let f = self.f;
        let (mut credit, mut debt, mut credit_inv, mut debt_inv) =
            (Acc::new(), Acc::new(), Acc::new(), Acc::new());
        for _ in 0..self.cfg.samples {
            let (a, b) = (self.event_with_sign(true), self.event_with_sign(true));
            credit.record_bool(f_product(f, &a, &b).map(|p| p.classify().strict_credit));
            credit_inv.record_bool(f_inverse(&a).map(|p| p.classify().strict_credit));
            let (a, b) = (self.event_with_sign(false), self.event_with_sign(false));
            debt.record_bool(f_anti_product(f, &a, &b).map(|p| p.classify().strict_debt));
            debt_inv.record_bool(f_inverse(&a).map(|p| p.classify().strict_debt));
        }
        if !Event::UNIT.classify().strict_credit || !Event::NEG_UNIT.classify().strict_debt {
            self.notes.push("neutral elements misclassified".into());
            self.checks
                .push(Check::upper("neutrals_in_components", 1, 1.0, 0.0));
        }
        self.push("credit_closure", credit, 0.0);
        self.push("credit_inverse_closure", credit_inv, 0.0);
        self.push("debt_closure_anti", debt, 0.0);
        self.push("debt_inverse_closure", debt_inv, 0.0);
    }

    fn isomorphism(&mut self) {
        let f = self.f;
        let (mut inter, mut swap, mut ident) = (Acc::new(), Acc::new(), Acc::new());
        for _ in 0..self.cfg.samples {
            let (a, b) = (self.event_with_sign(true), self.event_with_sign(true));
            inter.record((|| {
                let l = f_product(f, &a, &b)?.opposite();
                let r = f_anti_product(f, &a.opposite(), &b.opposite())?;
                Ok(err3(l, r))
            })());
            swap.record_bool(Ok(a.opposite().classify().strict_debt));
        }
        ident.record_bool(Ok(Event::UNIT.opposite() == Event::NEG_UNIT));
        let tol = self.tol();
        self.push("intertwining", inter, tol);
        self.push("credits_onto_debts", swap, 0.0);
        self.push("unit_onto_anti_unit", ident, 0.0);
    }

    fn anti(&mut self) {
        let f = self.f;
        let kind = ProductKind::FAntiProduct;
        let (mut assoc, mut neutral, mut inv, mut comm) =
            (Acc::new(), Acc::new(), Acc::new(), Acc::new());
        for _ in 0..self.cfg.samples {
            let (a, b, c) = (self.event(), self.event(), self.event());
            assoc.record((|| {
                let l = kind.apply(f, &kind.apply(f, &a, &b)?, &c)?;
                let r = kind.apply(f, &a, &kind.apply(f, &b, &c)?)?;
                Ok(err3(l, r))
            })());
            neutral.record(f_anti_product(f, &a, &Event::NEG_UNIT).map(|p| err3(p, a)));
            inv.record((|| {
                Ok(err3(
                    f_anti_product(f, &a, &f_inverse(&a)?)?,
                    Event::NEG_UNIT,
                ))
            })());
            comm.record((|| {
                Ok(err3(f_anti_product(f, &a, &b)?, f_anti_product(f, &b, &a)?))
            })());
        }
        let tol = self.tol();
        self.push("assoc", assoc, tol);
        self.push("neutral_neg_unit", neutral, tol);
        self.push("inverse", inv, tol);
        self.push("commutativity", comm, tol);
    }

    fn one_parameter(&mut self) {
        let f = self.f;
        let unit = EvolutionCurve::unit(f);
        let mut acc = Acc::new();
        for _ in 0..self.cfg.samples {
            let (t, t2) = (self.time(), self.time());
            acc.record((|| {
                let lhs = f_product(f, &unit.evolve(t)?, &unit.evolve(t2)?)?;
                Ok(err3(lhs, unit.evolve(t + t2)?))
            })());
        }
        let tol = self.tol();
        self.push("one_parameter_group", acc, tol);
    }

    fn translation_group(&mut self) {
        let f = self.f;
        let translated = |e0: &Event, a: &Event, b: &Event| translate(f, e0, &f_product(f, a, b)?);
        let (mut assoc, mut comm, mut neutral, mut inv, mut zero) =
            (Acc::new(), Acc::new(), Acc::new(), Acc::new(), Acc::new());
        for _ in 0..self.cfg.samples {
            let (e0, a, b, c) = (self.event(), self.event(), self.event(), self.event());
            assoc.record((|| {
                let l = translated(&e0, &translated(&e0, &a, &b)?, &c)?;
                let r = translated(&e0, &a, &translated(&e0, &b, &c)?)?;
                Ok(err3(l, r))
            })());
            comm.record((|| {
                Ok(err3(translated(&e0, &a, &b)?, translated(&e0, &b, &a)?))
            })());
            neutral.record(translated(&e0, &a, &e0).map(|p| err3(p, a)));
            inv.record((|| {
                Ok(err3(
                    translated(&e0, &a, &translated_inverse(f, &e0, &a)?)?,
                    e0,
                ))
            })());
            zero.record_bool(Ok(
                translated_inverse(f, &e0, &Event::new(a.t, a.h, 0.0)).is_err()
            ));
        }
        let tol = self.tol();
        self.push("assoc", assoc, tol);
        self.push("commutativity", comm, tol);
        self.push("neutral_e0", neutral, tol);
        self.push("inverse_e_inv_e0_sq", inv, tol);
        self.push("zero_events_not_invertible", zero, 0.0);
    }

    fn translation_identity(&mut self) {
        let f = self.f;
        let mut acc = Acc::new();
        for _ in 0..self.cfg.samples {
            let (e0, a, b) = (self.event(), self.event(), self.event());
            acc.record((|| {
                Ok(err3(
                    centered_product(f, &e0, &a, &b)?,
                    translate(f, &e0, &f_product(f, &a, &b)?)?,
                ))
            })());
        }
        let tol = self.tol();
        self.push("centered_equals_translated", acc, tol);
    }

    fn centered_neutral(&mut self) {
        let f = self.f;
        let (mut right, mut left, mut assoc) = (Acc::new(), Acc::new(), Acc::new());
        for _ in 0..self.cfg.samples {
            let (e0, a, b, c) = (self.event(), self.event(), self.event(), self.event());
            right.record(centered_product(f, &e0, &a, &e0).map(|p| err3(p, a)));
            left.record(centered_product(f, &e0, &e0, &a).map(|p| err3(p, a)));
            assoc.record((|| {
                let l = centered_product(f, &e0, &centered_product(f, &e0, &a, &b)?, &c)?;
                let r = centered_product(f, &e0, &a, &centered_product(f, &e0, &b, &c)?)?;
                Ok(err3(l, r))
            })());
        }
        let tol = self.tol();
        self.push("neutral_right", right, tol);
        self.push("neutral_left", left, tol);
        self.push("assoc", assoc, tol);
    }

    fn double_translation(&mut self) {
        let f = self.f;
        let bases = (self.cfg.samples / 20).max(1);
        let n = self.cfg.grid_points.max(2);
        let range = self.cfg.time_range;
        let mut acc = Acc::new();
        for _ in 0..bases {
            let e0 = self.event();
            let curve = EvolutionCurve::new(e0, f);
            for i in 0..n {
                let t = -range + 2.0 * range * i as f64 / (n - 1) as f64;
                acc.record((|| {
                    Ok(err3(double_translate_unit(f, &e0, t)?, curve.evolve(t)?))
                })());
            }
        }
        let tol = self.tol();
        self.push("double_translation", acc, tol);
    }

    fn homomorphism(&mut self) {
        let f = self.f;
        let (mut direct, mut capital, mut base) = (Acc::new(), Acc::new(), Acc::new());
        for _ in 0..self.cfg.samples {
            let e0 = self.event();
            let (t, t2) = (self.time(), self.time());
            let curve = EvolutionCurve::new(e0, f);
            let target = curve.evolve(curve.time_line().add(t, t2));
            direct.record((|| {
                let lhs = centered_product(f, &e0, &curve.evolve(t)?, &curve.evolve(t2)?)?;
                Ok(err3(lhs, target.clone()?))
            })());
            // capital-evolution form: M(t) M(t') f(h0+h+h') f(h0) / (c0 f(h0+h) f(h0+h'))
            capital.record((|| {
                let (h, h2) = (t - e0.t, t2 - e0.t);
                let m = curve.capital_evolution(t)? * curve.capital_evolution(t2)?;
                let c = m * f.factor(e0.h + h + h2)? * f.factor(e0.h)?
                    / (e0.c * f.factor(e0.h + h)? * f.factor(e0.h + h2)?);
                Ok(scaled_error(c, target.clone()?.c))
            })());
            base.record(curve.evolve(e0.t).map(|p| err3(p, e0)));
        }
        let tol = self.tol();
        self.push("centered_homomorphism", direct, tol);
        self.push("capital_evolution_form", capital, tol);
        self.push("passes_through_e0", base, 0.0);
    }

    fn tangent(&mut self) {
        let f = self.f;
        let eps = self.cfg.perturbation;
        let (mut origin, mut unit, mut fd, mut gap) =
            (Acc::new(), Acc::new(), Acc::new(), Acc::new());
        let mut skipped = 0;

        unit.record((|| {
            let v = EvolutionCurve::unit(f).tangent(0.0)?;
            Ok(max_scaled_error(
                v.direction.to_array(),
                [1.0, 1.0, f.derivative(0.0)?],
            ))
        })());

        let mut max_gap = 0.0f64;
        for _ in 0..self.cfg.samples {
            let e0 = self.event();
            let curve = EvolutionCurve::new(e0, f);
            origin.record((|| {
                let v = curve.tangent(e0.t)?;
                let expected = [1.0, 1.0, e0.c * f.force_of_interest(e0.h)?];
                Ok(max_scaled_error(v.direction.to_array(), expected))
            })());

            let t = loop {
                let t = self.time();
                let h = e0.h + (t - e0.t);
                if self.clear_of_kinks(&[h, e0.h]) {
                    break t;
                }
                skipped += 1;
            };
            fd.record((|| {
                let v = curve.tangent(t)?;
                let p = curve.evolve(t)?;
                let dt = central_difference(t, |s| curve.evolve(s).map(|e| e.t))?;
                let dh = central_difference(t, |s| curve.evolve(s).map(|e| e.h))?;
                let dc = central_difference(t, |s| curve.capital_evolution(s))?;
                Ok(fd_error(v.direction.dt, dt, p.t)
                    .max(fd_error(v.direction.dh, dh, p.h))
                    .max(fd_error(v.direction.dc, dc, p.c)))
            })());

            // a curve through a scaled capital breaks the homomorphism law
            let (t, t2) = (self.time(), self.time());
            let nu = |s: f64| {
                curve
                    .evolve(s)
                    .map(|e| Event::new(e.t, e.h, e.c * (1.0 + eps)))
            };
            match (|| {
                let lhs = centered_product(f, &e0, &nu(t)?, &nu(t2)?)?;
                let rhs = nu(curve.time_line().add(t, t2))?;
                Ok::<_, Error>(((lhs.c - rhs.c) / rhs.c).abs())
            })() {
                Ok(g) if g.is_finite() => max_gap = max_gap.max(g),
                _ => gap.errors += 1,
            }
        }
        gap.samples = self.cfg.samples;
        gap.max = (eps / 10.0 - max_gap).max(0.0);
        self.notes.push(format!(
            "perturbing the capital by {eps:e} (relative) moves the homomorphism residual to {max_gap:.3e}"
        ));
        self.kink_note(skipped);
        let exact = self.cfg.exact_tol;
        let fd_tol = self.cfg.fd_tol;
        self.push("tangent_at_origin", origin, exact);
        self.push("unit_tangent", unit, exact);
        self.push("tangent_fd", fd, fd_tol);
        self.push("uniqueness_shortfall", gap, 0.0);
    }

    fn partials(&mut self) {
        let f = self.f;
        let (mut prod, mut inv, mut closed) = (Acc::new(), Acc::new(), Acc::new());
        let mut skipped = 0;
        for _ in 0..self.cfg.samples {
            let (a, b) = loop {
                let (a, b) = (self.event(), self.event());
                if self.clear_of_kinks(&[-a.h, -b.h, a.h + b.h, a.h, b.h]) {
                    break (a, b);
                }
                skipped += 1;
            };
            prod.record((|| {
                let analytic = product_partials(f, &a, &b)?.to_array();
                let value = f_product(f, &a, &b)?.to_array();
                let args = [a.t, a.h, a.c, b.t, b.h, b.c];
                let mut worst = 0.0f64;
                for (k, partial) in analytic.iter().enumerate() {
                    let at = |x: f64| {
                        let mut v = args;
                        v[k] = x;
                        f_product(
                            f,
                            &Event::new(v[0], v[1], v[2]),
                            &Event::new(v[3], v[4], v[5]),
                        )
                    };
                    for (j, p) in partial.to_array().iter().enumerate() {
                        let numeric =
                            central_difference(args[k], |x| at(x).map(|e| e.to_array()[j]))?;
                        worst = worst.max(fd_error(*p, numeric, value[j]));
                    }
                }
                Ok(worst)
            })());
            inv.record((|| {
                let analytic = inverse_partials(&a)?;
                let value = f_inverse(&a)?.to_array();
                let args = a.to_array();
                let mut worst = 0.0f64;
                for (k, partial) in analytic.iter().enumerate() {
                    for (j, p) in partial.to_array().iter().enumerate() {
                        let numeric = central_difference(args[k], |x| {
                            let mut v = args;
                            v[k] = x;
                            f_inverse(&Event::from(v)).map(|e| e.to_array()[j])
                        })?;
                        worst = worst.max(fd_error(*p, numeric, value[j]));
                    }
                }
                Ok(worst)
            })());
            closed.record((|| {
                let p = product_partials(f, &a, &b)?;
                let dc = f.factor(-a.h)? * b.c * f.factor(-b.h)? * f.factor(a.h + b.h)?;
                let dinv = -1.0 / (a.c * a.c);
                let exact = p.dc.c.to_bits() == dc.to_bits()
                    && inverse_partials(&a)?[2].c.to_bits() == dinv.to_bits();
                Ok(if exact { 0.0 } else { 1.0 })
            })());
        }
        self.kink_note(skipped);
        let fd_tol = self.cfg.fd_tol;
        self.push("product_partials_fd", prod, fd_tol);
        self.push("inverse_partials_fd", inv, fd_tol);
        self.push("capital_partials_closed_form", closed, 0.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capfactor::{simple_interest, CapFactor};

    fn exp05() -> CapFactor {
        CapFactor::exponential(0.05).unwrap()
    }

    #[test]
    fn assoc_passes_for_exponential() {
        let r = run_law("T1-assoc", &exp05(), &VerifyConfig::default()).unwrap();
        assert!(r.passed, "{}", render_table(std::slice::from_ref(&r)));
        assert!(r.max_residual <= 1e-9);
        assert_eq!(r.seed, Some(DEFAULT_SEED));
    }

    #[test]
    fn factor_axioms_fail_for_simple_interest() {
        let r = run_law(
            "D1-factor-axioms",
            &simple_interest(0.05),
            &VerifyConfig::default(),
        )
        .unwrap();
        assert!(!r.passed);
        assert!(r.max_residual > r.tolerance);
    }

    #[test]
    fn tangent_for_constant_factor_is_exact() {
        let r = run_law(
            "T9-tangent",
            &CapFactor::exponential(0.0).unwrap(),
            &VerifyConfig::default(),
        )
        .unwrap();
        assert!(r.passed, "{}", render_table(std::slice::from_ref(&r)));
        assert_eq!(r.check("tangent_at_origin").unwrap().max_residual, 0.0);
    }

    #[test]
    fn unknown_law_lists_ids() {
        let err = run_law("nonsense", &exp05(), &VerifyConfig::default()).unwrap_err();
        match err {
            Error::UnknownLaw { available, .. } => assert_eq!(available.len(), LAW_IDS.len()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn all_laws_pass_for_builtin_factors() {
        for f in [
            exp05(),
            CapFactor::odd_poly_exp(vec![0.05, 0.001]).unwrap(),
            CapFactor::tabulated_odd_exp(vec![(0.5, 0.02), (2.0, 0.09), (10.0, 0.5)]).unwrap(),
        ] {
            let reports = run_all(&f, &VerifyConfig::default());
            assert_eq!(reports.len(), 15);
            assert!(all_passed(&reports), "{:?}\n{}", f, render_table(&reports));
        }
    }

    #[test]
    fn tabulated_runs_note_redrawn_samples() {
        let f =
            CapFactor::tabulated_odd_exp(vec![(0.5, 0.02), (1.0, 0.05), (1.5, 0.06), (2.0, 0.09)])
                .unwrap();
        let r = run_law("P1-partials-fd", &f, &VerifyConfig::default()).unwrap();
        assert!(r.passed);
        let d1 = run_law("D1-factor-axioms", &f, &VerifyConfig::default()).unwrap();
        assert!(d1.notes.iter().any(|n| n.contains("piecewise")));
    }

    #[test]
    fn reports_are_deterministic() {
        let f = CapFactor::odd_poly_exp(vec![0.05, 0.001]).unwrap();
        let cfg = VerifyConfig::default().with_seed(7);
        assert_eq!(run_all(&f, &cfg), run_all(&f, &cfg));
        let other = run_law("T1-assoc", &f, &VerifyConfig::default().with_seed(8)).unwrap();
        assert_ne!(other, run_law("T1-assoc", &f, &cfg).unwrap());
    }

    #[test]
    fn passed_tracks_headline_residual() {
        let checks = vec![
            Check::upper("a", 10, 1e-10, 1e-9),
            Check::upper("b", 10, 3.0, 0.0),
            Check::upper("c", 10, 1e-7, 1e-6),
        ];
        let r = AxiomReport::from_checks("x", None, checks, vec![]);
        assert!(!r.passed);
        assert_eq!((r.max_residual, r.tolerance), (3.0, 0.0));
        assert_eq!(r.samples, 30);

        let ok = AxiomReport::from_checks(
            "y",
            None,
            vec![
                Check::upper("a", 1, 5e-10, 1e-9),
                Check::upper("c", 1, 1e-7, 1e-6),
            ],
            vec![],
        );
        assert!(ok.passed);
        assert_eq!(ok.max_residual, 5e-10);
    }

    #[test]
    fn non_finite_residuals_serialize_as_strings() {
        let r =
            AxiomReport::from_checks("x", None, vec![Check::upper("a", 1, f64::NAN, 0.0)], vec![]);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"max_residual\":\"inf\""), "{json}");
    }
}
