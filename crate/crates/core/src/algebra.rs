//! Products induced by a capitalization factor on capitalized events.
//!
//! * f-product: `(t+t', h+h', c f(-h) c' f(-h') f(h+h'))`. Both capitals are
//!   discounted to their origins and recapitalized over the summed
//!   displacement. Neutral element `o = (0, 0, 1)`.
//! * f-anti-product: the same with the capital negated. Neutral `-o`.
//! * centered product at `e0`: the f-product translated by `e0`, i.e.
//!   `e e' e0⁻¹`. Neutral `e0`.
//!
//! The invertible events are exactly those with nonzero capital. Strict
//! credits form a group under the f-product, strict debts a group under the
//! anti-product, and [`Event::opposite`] is an isomorphism between them.

use crate::capfactor::Capitalization;
use crate::error::{Error, Result};
use crate::events::{Event, State};

/// Which binary operation to use on events.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProductKind {
    FProduct,
    FAntiProduct,
    /// Product centered at an invertible event.
    Centered(Event),
}

impl ProductKind {
    pub fn centered(e0: Event) -> Result<Self> {
        if !e0.is_invertible() {
            return Err(Error::CenterNotInvertible(e0));
        }
        Ok(ProductKind::Centered(e0))
    }

    pub fn apply<F: Capitalization + ?Sized>(&self, f: &F, e: &Event, e2: &Event) -> Result<Event> {
        match self {
            ProductKind::FProduct => f_product(f, e, e2),
            ProductKind::FAntiProduct => f_anti_product(f, e, e2),
            ProductKind::Centered(e0) => centered_product(f, e0, e, e2),
        }
    }

    pub fn neutral(&self) -> Event {
        match self {
            ProductKind::FProduct => Event::UNIT,
            ProductKind::FAntiProduct => Event::NEG_UNIT,
            ProductKind::Centered(e0) => *e0,
        }
    }

    /// Inverse of `e` for this product. The f-product and the anti-product
    /// share the same inverse `(-t, -h, 1/c)`.
    pub fn inverse<F: Capitalization + ?Sized>(&self, f: &F, e: &Event) -> Result<Event> {
        match self {
            ProductKind::FProduct | ProductKind::FAntiProduct => f_inverse(e),
            ProductKind::Centered(e0) => translated_inverse(f, e0, e),
        }
    }
}

/// Capital of the f-product, `c f(-h) c' f(-h') f(h+h')`.
fn product_capital<F: Capitalization + ?Sized>(f: &F, e: &Event, e2: &Event) -> Result<f64> {
    Ok(e.c * e2.c * f.ratio(&[-e.h, -e2.h, e.h + e2.h], &[])?)
}

/// The f-product `[e|e']_f`. Commutative bitwise.
pub fn f_product<F: Capitalization + ?Sized>(f: &F, e: &Event, e2: &Event) -> Result<Event> {
    Ok(Event::new(
        e.t + e2.t,
        e.h + e2.h,
        product_capital(f, e, e2)?,
    ))
}

/// The f-anti-product `[e|e']_(f,-)`.
pub fn f_anti_product<F: Capitalization + ?Sized>(f: &F, e: &Event, e2: &Event) -> Result<Event> {
    Ok(Event::new(
        e.t + e2.t,
        e.h + e2.h,
        -product_capital(f, e, e2)?,
    ))
}

/// `(-t, -h, 1/c)`, the inverse under every factor.
pub fn f_inverse(e: &Event) -> Result<Event> {
    if !e.is_invertible() {
        return Err(Error::NotInvertible(*e));
    }
    Ok(Event::new(-e.t, -e.h, 1.0 / e.c))
}

/// The product centered at `e0`:
/// `(t+t'-t0, h+h'-h0, (c/f(h)) (c'/f(h')) (c0⁻¹/f(-h0)) f(h+h'-h0))`.
pub fn centered_product<F: Capitalization + ?Sized>(
    f: &F,
    e0: &Event,
    e: &Event,
    e2: &Event,
) -> Result<Event> {
    if !e0.is_invertible() {
        return Err(Error::CenterNotInvertible(*e0));
    }
    let h = e.h + e2.h - e0.h;
    let c = e.c * e2.c * e0.c.recip() * f.ratio(&[h], &[e.h, e2.h, -e0.h])?;
    Ok(Event::new(e.t + (e2.t - e0.t), h, c))
}

/// Translation by `e0`: `x e0⁻¹` under the f-product.
pub fn translate<F: Capitalization + ?Sized>(f: &F, e0: &Event, x: &Event) -> Result<Event> {
    if !e0.is_invertible() {
        return Err(Error::CenterNotInvertible(*e0));
    }
    f_product(f, x, &f_inverse(e0)?)
}

/// Inverse of `e` in the semigroup translated by `e0`: `e⁻¹ e0²`.
pub fn translated_inverse<F: Capitalization + ?Sized>(
    f: &F,
    e0: &Event,
    e: &Event,
) -> Result<Event> {
    if !e0.is_invertible() {
        return Err(Error::CenterNotInvertible(*e0));
    }
    f_product(f, &f_inverse(e)?, &f_product(f, e0, e0)?)
}

/// Product of several events in closed form:
/// `(Σt, Σh, (Π c_i / f(h_i)) f(Σh))`.
pub fn n_fold_product<F: Capitalization + ?Sized>(f: &F, events: &[Event]) -> Result<Event> {
    if events.is_empty() {
        return Err(Error::EmptyProduct);
    }
    let (mut t, mut h, mut c) = (0.0, 0.0, 1.0);
    let mut down = Vec::with_capacity(events.len());
    for e in events {
        t += e.t;
        h += e.h;
        c *= e.c;
        down.push(e.h);
    }
    Ok(Event::new(t, h, c * f.ratio(&[h], &down)?))
}

/// State product: the f-product with the reference time dropped.
pub fn state_product<F: Capitalization + ?Sized>(f: &F, s: &State, s2: &State) -> Result<State> {
    f_product(f, &s.at(0.0), &s2.at(0.0)).map(|e| e.state())
}

pub fn state_anti_product<F: Capitalization + ?Sized>(
    f: &F,
    s: &State,
    s2: &State,
) -> Result<State> {
    f_anti_product(f, &s.at(0.0), &s2.at(0.0)).map(|e| e.state())
}

/// Partial derivatives of the f-product with respect to each of its six
/// scalar arguments; each entry is the derivative of the event `[e|e']_f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductPartials {
    pub dt: Event,
    pub dh: Event,
    pub dc: Event,
    pub dt2: Event,
    pub dh2: Event,
    pub dc2: Event,
}

impl ProductPartials {
    pub fn to_array(self) -> [Event; 6] {
        [self.dt, self.dh, self.dc, self.dt2, self.dh2, self.dc2]
    }
}

/// Analytic partials of the f-product.
///
/// The capital derivative in `h` follows the chain rule,
/// `c c' f(-h') [f(-h) f'(h+h') - f'(-h) f(h+h')]`. The one-term expression
/// `-c f'(-h) c' f(-h') f'(h+h')` sometimes quoted for it does not match
/// finite differences.
pub fn product_partials<F: Capitalization + ?Sized>(
    f: &F,
    e: &Event,
    e2: &Event,
) -> Result<ProductPartials> {
    let (fm, fm2, fs) = (f.factor(-e.h)?, f.factor(-e2.h)?, f.factor(e.h + e2.h)?);
    let (dfm, dfm2, dfs) = (
        f.derivative(-e.h)?,
        f.derivative(-e2.h)?,
        f.derivative(e.h + e2.h)?,
    );
    let dh_c = e.c * e2.c * fm2 * (fm * dfs - dfm * fs);
    let dh2_c = e2.c * e.c * fm * (fm2 * dfs - dfm2 * fs);
    Ok(ProductPartials {
        dt: Event::new(1.0, 0.0, 0.0),
        dh: Event::new(0.0, 1.0, dh_c),
        dc: Event::new(0.0, 0.0, fm * e2.c * fm2 * fs),
        dt2: Event::new(1.0, 0.0, 0.0),
        dh2: Event::new(0.0, 1.0, dh2_c),
        dc2: Event::new(0.0, 0.0, e.c * fm * fm2 * fs),
    })
}

/// Partials of `e ↦ e⁻¹` with respect to `t`, `h` and `c`:
/// `(-1,0,0)`, `(0,-1,0)`, `(0,0,-1/c²)`.
pub fn inverse_partials(e: &Event) -> Result<[Event; 3]> {
    if !e.is_invertible() {
        return Err(Error::NotInvertible(*e));
    }
    Ok([
        Event::new(-1.0, 0.0, 0.0),
        Event::new(0.0, -1.0, 0.0),
        Event::new(0.0, 0.0, -1.0 / (e.c * e.c)),
    ])
}
