//! Time-dependent boundary perturbations.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::format::fmt_f64;

#[derive(Debug, Clone, PartialEq)]
pub enum DriveSignal {
    /// Zero at τ = 0, `amplitude` afterwards.
    Step { amplitude: f64 },
    /// On for the first `duty * period` of every period, starting just after τ = 0.
    Square { amplitude: f64, period: f64, duty: f64 },
    /// Holds the value of the last breakpoint at or before τ; zero before the first.
    Piecewise { breakpoints: Vec<(f64, f64)> },
}

impl DriveSignal {
    pub fn step(amplitude: f64) -> Self {
        DriveSignal::Step { amplitude }
    }

    pub fn square(amplitude: f64, period: f64, duty: f64) -> Result<Self> {
        let s = DriveSignal::Square {
            amplitude,
            period,
            duty,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn piecewise(breakpoints: Vec<(f64, f64)>) -> Result<Self> {
        let s = DriveSignal::Piecewise { breakpoints };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DriveSignal::Step { amplitude } => finite("amplitude", *amplitude),
            DriveSignal::Square {
                amplitude,
                period,
                duty,
            } => {
                finite("amplitude", *amplitude)?;
                if !(*period > 0.0 && period.is_finite()) {
                    return Err(Error::invalid("period", "must be positive"));
                }
                if !(*duty > 0.0 && *duty < 1.0) {
                    return Err(Error::invalid("duty", "must lie in (0, 1)"));
                }
                Ok(())
            }
            DriveSignal::Piecewise { breakpoints } => {
                if breakpoints.is_empty() {
                    return Err(Error::invalid("breakpoints", "need at least one"));
                }
                for (t, v) in breakpoints {
                    finite("breakpoint time", *t)?;
                    finite("breakpoint value", *v)?;
                }
                if breakpoints.windows(2).any(|p| p[1].0 <= p[0].0) {
                    return Err(Error::invalid("breakpoints", "times must be strictly increasing"));
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, tau: f64) -> Result<f64> {
        if !(tau >= 0.0) {
            return Err(Error::OutOfDomain {
                position: tau,
                lower: 0.0,
                upper: f64::INFINITY,
            });
        }
        Ok(match self {
            DriveSignal::Step { amplitude } => {
                if tau > 0.0 {
                    *amplitude
                } else {
                    0.0
                }
            }
            DriveSignal::Square {
                amplitude,
                period,
                duty,
            } => {
                // same arithmetic as `breakpoints`, so edges agree exactly
                let mut n = (tau / period).floor();
                if tau >= (n + 1.0) * period {
                    n += 1.0;
                } else if tau < n * period {
                    n -= 1.0;
                }
                if tau > 0.0 && tau < n * period + duty * period {
                    *amplitude
                } else {
                    0.0
                }
            }
            DriveSignal::Piecewise { breakpoints } => breakpoints
                .iter()
                .take_while(|(t, _)| *t <= tau)
                .last()
                .map_or(0.0, |(_, v)| *v),
        })
    }

    /// Largest absolute value the signal takes.
    pub fn peak(&self) -> f64 {
        match self {
            DriveSignal::Step { amplitude } | DriveSignal::Square { amplitude, .. } => amplitude.abs(),
            DriveSignal::Piecewise { breakpoints } => breakpoints.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max),
        }
    }

    /// Same shape with peak `amplitude`; piecewise signals are rescaled.
    pub fn with_amplitude(&self, amplitude: f64) -> Self {
        match self {
            DriveSignal::Step { .. } => DriveSignal::Step { amplitude },
            DriveSignal::Square { period, duty, .. } => DriveSignal::Square {
                amplitude,
                period: *period,
                duty: *duty,
            },
            DriveSignal::Piecewise { breakpoints } => {
                let peak = self.peak();
                let scale = if peak > 0.0 { amplitude / peak } else { 0.0 };
                DriveSignal::Piecewise {
                    breakpoints: breakpoints.iter().map(|(t, v)| (*t, v * scale)).collect(),
                }
            }
        }
    }

    /// Discontinuity times in `(0, tau_end)`, sorted.
    pub fn breakpoints(&self, tau_end: f64) -> Vec<f64> {
        let mut out = Vec::new();
        match self {
            DriveSignal::Step { .. } => {}
            DriveSignal::Square { period, duty, .. } => {
                let mut start = 0.0;
                let mut n = 0u64;
                while start < tau_end {
                    let off = n as f64 * period + duty * period;
                    if n > 0 {
                        out.push(start);
                    }
                    if off < tau_end {
                        out.push(off);
                    }
                    n += 1;
                    start = n as f64 * period;
                }
            }
            DriveSignal::Piecewise { breakpoints } => {
                out.extend(breakpoints.iter().map(|(t, _)| *t).filter(|t| *t > 0.0 && *t < tau_end))
            }
        }
        out
    }
}

fn finite(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, "must be finite"))
    }
}

impl fmt::Display for DriveSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DriveSignal::Step { amplitude } => write!(f, "step({})", fmt_f64(*amplitude)),
            DriveSignal::Square {
                amplitude,
                period,
                duty,
            } => write!(
                f,
                "square({}, {}, {})",
                fmt_f64(*amplitude),
                fmt_f64(*period),
                fmt_f64(*duty)
            ),
            DriveSignal::Piecewise { breakpoints } => {
                let parts: Vec<String> = breakpoints
                    .iter()
                    .map(|(t, v)| format!("{}:{}", fmt_f64(*t), fmt_f64(*v)))
                    .collect();
                write!(f, "piecewise({})", parts.join(", "))
            }
        }
    }
}

impl FromStr for DriveSignal {
    type Err = Error;

    /// Parses `step(5.0)`, `square(5.0, 40.0, 0.5)` or `piecewise(0:0, 10:5, 50:0)`.
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let parse_err = || Error::Parse(format!("malformed drive `{text}`"));
        let open = text.find('(').ok_or_else(parse_err)?;
        if !text.ends_with(')') {
            return Err(parse_err());
        }
        let name = text[..open].trim();
        let body = &text[open + 1..text.len() - 1];
        let num = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number `{}` in drive `{text}`", s.trim())))
        };
        let args: Vec<&str> = body.split(',').collect();
        match name {
            "step" => match args.as_slice() {
                [a] => Ok(DriveSignal::step(num(a)?)),
                _ => Err(parse_err()),
            },
            "square" => match args.as_slice() {
                [a, p, d] => DriveSignal::square(num(a)?, num(p)?, num(d)?),
                _ => Err(parse_err()),
            },
            "piecewise" => {
                let points = args
                    .iter()
                    .map(|pair| {
                        let (t, v) = pair.split_once(':').ok_or_else(parse_err)?;
                        Ok((num(t)?, num(v)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                DriveSignal::piecewise(points)
            }
            _ => Err(parse_err()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn step_case_split() {
        let s = DriveSignal::step(5.0);
        assert_eq!(s.eval(0.0).unwrap(), 0.0);
        assert_eq!(s.eval(0.01).unwrap(), 5.0);
        assert!(s.eval(-1.0).is_err());
    }

    #[test]
    fn square_phases() {
        let p = 40.0;
        let s = DriveSignal::square(5.0, p, 0.5).unwrap();
        assert_eq!(s.eval(0.75 * p).unwrap(), 0.0);
        assert_eq!(s.eval(0.25 * p).unwrap(), 5.0);
        assert_eq!(s.eval(0.5 * p).unwrap(), 0.0);
        assert_eq!(s.eval(p).unwrap(), 5.0);
        assert_eq!(s.eval(0.0).unwrap(), 0.0);
        assert_eq!(s.breakpoints(100.0), vec![20.0, 40.0, 60.0, 80.0]);
    }

    #[test]
    fn piecewise_holds_last_value() {
        let s: DriveSignal = "piecewise(0:0, 10:5, 50:0)".parse().unwrap();
        assert_eq!(s.eval(5.0).unwrap(), 0.0);
        assert_eq!(s.eval(10.0).unwrap(), 5.0);
        assert_eq!(s.eval(49.9).unwrap(), 5.0);
        assert_eq!(s.eval(50.0).unwrap(), 0.0);
        assert_eq!(s.breakpoints(100.0), vec![10.0, 50.0]);
    }

    #[test]
    fn amplitude_change_keeps_shape() {
        let sq = DriveSignal::square(5.0, 40.0, 0.5).unwrap().with_amplitude(3.0);
        assert_eq!(sq, DriveSignal::square(3.0, 40.0, 0.5).unwrap());
        let pw = DriveSignal::piecewise(vec![(0.0, 2.0), (1.0, -4.0)])
            .unwrap()
            .with_amplitude(2.0);
        assert_eq!(pw.eval(0.5).unwrap(), 1.0);
        assert_eq!(pw.eval(1.5).unwrap(), -2.0);
    }

    #[test]
    fn parse_and_display() {
        for text in ["step(5.0)", "square(5.0, 40.0, 0.5)", "piecewise(0.0:0.0, 10.0:5.0)"] {
            let s: DriveSignal = text.parse().unwrap();
            assert_eq!(s.to_string(), text);
        }
        assert!("square(5, 40)".parse::<DriveSignal>().is_err());
        assert!("square(5, 40, 1.5)".parse::<DriveSignal>().is_err());
        assert!("piecewise(10:1, 5:2)".parse::<DriveSignal>().is_err());
        assert!("ramp(1)".parse::<DriveSignal>().is_err());
        assert!("step 5".parse::<DriveSignal>().is_err());
    }

    proptest! {
        #[test]
        fn right_continuous(tau in 1e-3f64..200.0, duty in 0.05f64..0.95) {
            let signals = [
                DriveSignal::step(3.0),
                DriveSignal::square(3.0, 17.0, duty).unwrap(),
                DriveSignal::piecewise(vec![(0.0, 1.0), (13.0, -2.0), (90.0, 4.0)]).unwrap(),
            ];
            for s in &signals {
                let mut ts = s.breakpoints(tau + 1.0);
                ts.push(tau);
                for t in ts {
                    prop_assert_eq!(s.eval(t).unwrap(), s.eval(t + 1e-9).unwrap());
                }
            }
        }

        #[test]
        fn square_tends_to_step(tau in 1e-3f64..39.0) {
            let square = DriveSignal::square(5.0, 40.0, 1.0 - 1e-6).unwrap();
            prop_assert_eq!(square.eval(tau).unwrap(), DriveSignal::step(5.0).eval(tau).unwrap());
        }
    }
}
