use std::fmt::Write as _;
use std::str::FromStr;

use pellet::detection::detect;
use pellet::solver::{fit_surrogate, fit_trinomial};
use pellet::{PelletError, PelletInstance};

/// `a:b:steps`, sampled at `steps` evenly spaced points including both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts.as_slice() else {
            return Err(format!("grid '{s}' is not of the form a:b:steps"));
        };
        let start: f64 = a.parse().map_err(|_| format!("bad grid start '{a}'"))?;
        let end: f64 = b.parse().map_err(|_| format!("bad grid end '{b}'"))?;
        let steps: usize = n.parse().map_err(|_| format!("bad grid size '{n}'"))?;
        if !(start >= 0.0 && end > start && end.is_finite()) {
            return Err(format!("grid needs 0 <= a < b, got {start}:{end}"));
        }
        if steps < 2 {
            return Err("grid needs at least 2 points".into());
        }
        Ok(Grid { start, end, steps })
    }
}

impl Grid {
    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let last = (self.steps - 1) as f64;
        (0..self.steps).map(move |i| {
            let t = i as f64 / last;
            (1.0 - t) * self.start + t * self.end
        })
    }
}

/// CSV of `x, phi, f, h` with the majorant and surrogate fitted at `x_bar`
/// (`x*` when not given). `h` reads `pole` at or beyond its pole.
pub fn curves_csv(
    inst: &PelletInstance,
    x_bar: Option<f64>,
    grid: &Grid,
) -> Result<String, PelletError> {
    let x_bar = match x_bar {
        Some(x) => x,
        None => detect(inst, pellet::DEFAULT_TOL)?.x_star,
    };
    let tri = fit_trinomial(inst, x_bar)?;
    let sur = fit_surrogate(&tri, x_bar)?;
    let mut out = String::from("x,phi,f,h\n");
    for x in grid.points() {
        let (phi, _) = inst.phi(x);
        let (f, _) = tri.eval(x);
        let h = match sur.eval(x) {
            Some(h) => format!("{h:e}"),
            None => "pole".to_string(),
        };
        let _ = writeln!(out, "{x:e},{phi:e},{f:e},{h}");
    }
    Ok(out)
}
