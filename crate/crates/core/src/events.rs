//! Capitalized financial events and their states.
//!
//! Times are in time units and capitals in currency units. Units are not
//! tracked: the product of two capitals is read as a capital by dividing by
//! one monetary unit.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A capitalized financial event `(t, h, c)`.
///
/// `t` is the reference time, `h` the capitalization time (the event has been
/// under capitalization since `t - h`) and `c` the capital at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub h: f64,
    pub c: f64,
}

/// The state `(h, c)` of an event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub h: f64,
    pub c: f64,
}

/// Sign classes of an event. Credits and debts overlap on zero events, so
/// each class is reported as its own flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub zero: bool,
    pub credit: bool,
    pub strict_credit: bool,
    pub debt: bool,
    pub strict_debt: bool,
}

impl Event {
    /// The unit event `o = (0, 0, 1)`, neutral for the f-product.
    pub const UNIT: Event = Event {
        t: 0.0,
        h: 0.0,
        c: 1.0,
    };
    /// `-o = (0, 0, -1)`, neutral for the f-anti-product.
    pub const NEG_UNIT: Event = Event {
        t: 0.0,
        h: 0.0,
        c: -1.0,
    };

    pub const fn new(t: f64, h: f64, c: f64) -> Self {
        Event { t, h, c }
    }

    pub fn classify(&self) -> Classification {
        let c = self.c;
        Classification {
            zero: c == 0.0,
            credit: c >= 0.0,
            strict_credit: c > 0.0,
            debt: c <= 0.0,
            strict_debt: c < 0.0,
        }
    }

    /// `(t, h, -c)`.
    pub fn opposite(&self) -> Event {
        Event::new(self.t, self.h, -self.c)
    }

    /// Invertible in the event semigroup iff the capital is nonzero.
    pub fn is_invertible(&self) -> bool {
        self.c != 0.0
    }

    pub fn state(&self) -> State {
        State {
            h: self.h,
            c: self.c,
        }
    }

    pub fn multitime(&self) -> (f64, f64) {
        (self.t, self.h)
    }

    pub fn reference_time(&self) -> f64 {
        self.t
    }

    /// Time at which the event entered capitalization, `t - h`.
    pub fn origin_time(&self) -> f64 {
        self.t - self.h
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.h.is_finite() && self.c.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.t, self.h, self.c]
    }
}

impl State {
    pub const fn new(h: f64, c: f64) -> Self {
        State { h, c }
    }

    pub fn opposite(&self) -> State {
        State::new(self.h, -self.c)
    }

    /// The event at reference time `t` with this state.
    pub fn at(self, t: f64) -> Event {
        Event::new(t, self.h, self.c)
    }
}

impl From<[f64; 3]> for Event {
    fn from([t, h, c]: [f64; 3]) -> Self {
        Event::new(t, h, c)
    }
}

/// Formats as the `t,h,c` literal using the shortest decimal that round-trips.
impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.t, self.h, self.c)
    }
}

impl FromStr for Event {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || Error::EventLiteral(s.to_string());
        let mut parts = s.split(',').map(|p| p.trim().parse::<f64>());
        let mut next = || parts.next().ok_or_else(err)?.map_err(|_| err());
        let (t, h, c) = (next()?, next()?, next()?);
        if parts.next().is_some() {
            return Err(err());
        }
        let e = Event::new(t, h, c);
        if !e.is_finite() {
            return Err(err());
        }
        Ok(e)
    }
}
