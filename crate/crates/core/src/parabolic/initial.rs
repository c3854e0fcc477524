//! Initial data: builders, sign classification and file loading.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{GridFunction, SignChange};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DataKind {
    TypeAPos,
    TypeANeg,
    TypeB(f64),
    TypeC(f64),
    Piecewise,
    Custom,
}

/// Sign class of a sampled datum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DataClass {
    APos,
    ANeg,
    /// Negative then positive, zero at `x0`.
    B(f64),
    /// Positive then negative, zero at `x0`.
    C(f64),
    Other,
}

impl fmt::Display for DataClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataClass::APos => f.write_str("A+"),
            DataClass::ANeg => f.write_str("A-"),
            DataClass::B(x) => write!(f, "B({x:.4})"),
            DataClass::C(x) => write!(f, "C({x:.4})"),
            DataClass::Other => f.write_str("other"),
        }
    }
}

type Sampler = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct InitialData {
    pub kind: DataKind,
    pub description: String,
    pub ell: f64,
    sampler: Sampler,
    /// Values used at nodes falling exactly on a jump, keyed by abscissa.
    breaks: Vec<(f64, f64)>,
}

impl fmt::Debug for InitialData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InitialData")
            .field("kind", &self.kind)
            .field("description", &self.description)
            .field("ell", &self.ell)
            .finish()
    }
}

impl InitialData {
    /// Wraps an arbitrary sampler; rejects data that do not vanish at the ends.
    pub fn custom(ell: f64, description: &str, g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        Self::build(DataKind::Custom, ell, description.to_string(), Arc::new(g), Vec::new())
    }

    fn build(kind: DataKind, ell: f64, description: String, sampler: Sampler, breaks: Vec<(f64, f64)>) -> Result<Self> {
        if !(ell > 0.0 && ell.is_finite()) {
            return Err(Error::InvalidInput(format!("domain length must be positive, got {ell}")));
        }
        let tol = 1e-12;
        for x in [0.0, ell] {
            let v = sampler(x);
            if !v.is_finite() || v.abs() > tol {
                return Err(Error::Compatibility(format!("u0({x}) = {v}, expected 0")));
            }
        }
        Ok(Self { kind, description, ell, sampler, breaks })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.sampler.as_ref()(x)
    }

    /// Samples onto `n_cells` cells; jump nodes take the left value.
    pub fn sample(&self, n_cells: usize) -> GridFunction {
        let dx = self.ell / n_cells as f64;
        let mut g = GridFunction::sample(self.ell, n_cells, |x| self.eval(x));
        for &(xb, left) in &self.breaks {
            let q = xb / dx;
            if (q - q.round()).abs() < 1e-9 {
                g.values_mut()[q.round() as usize] = left;
            }
        }
        let n = g.n_cells();
        g.values_mut()[0] = 0.0;
        g.values_mut()[n] = 0.0;
        g
    }

    /// `x (ell - x)` (type A+) or its negative.
    pub fn quadratic(ell: f64, positive: bool) -> Self {
        let s = if positive { 1.0 } else { -1.0 };
        let (kind, d) = if positive {
            (DataKind::TypeAPos, "x(l-x)")
        } else {
            (DataKind::TypeANeg, "-x(l-x)")
        };
        Self::build(kind, ell, d.into(), Arc::new(move |x| s * x * (ell - x)), Vec::new())
            .expect("vanishes at both ends")
    }

    /// `x (ell - x)(x - x0)`: type B; `-x (ell - x)(x - x0)`: type C.
    pub fn cubic(ell: f64, x0: f64, type_b: bool) -> Result<Self> {
        if !(x0 > 0.0 && x0 < ell) {
            return Err(Error::InvalidInput(format!("zero {x0} must lie inside (0, {ell})")));
        }
        let s = if type_b { 1.0 } else { -1.0 };
        let (kind, d) = if type_b {
            (DataKind::TypeB(x0), format!("x(l-x)(x-{x0})"))
        } else {
            (DataKind::TypeC(x0), format!("-x(l-x)(x-{x0})"))
        };
        Self::build(kind, ell, d, Arc::new(move |x| s * x * (ell - x) * (x - x0)), Vec::new())
    }
}

/// Piecewise-linear interpolant of `points`; a repeated abscissa encodes a
/// jump from the first to the second value.
pub fn piecewise_initial(points: &[(f64, f64)]) -> Result<InitialData> {
    if points.len() < 2 {
        return Err(Error::InvalidInput("need at least two points".into()));
    }
    if points.iter().any(|(x, u)| !x.is_finite() || !u.is_finite()) {
        return Err(Error::InvalidInput("non-finite point".into()));
    }
    if points.windows(2).any(|w| w[1].0 < w[0].0) {
        return Err(Error::InvalidInput("abscissae must be non-decreasing".into()));
    }
    if points.windows(3).any(|w| w[0].0 == w[1].0 && w[1].0 == w[2].0) {
        return Err(Error::InvalidInput("at most two points may share an abscissa".into()));
    }
    let (x_first, u_first) = points[0];
    let (ell, u_last) = points[points.len() - 1];
    if x_first != 0.0 {
        return Err(Error::InvalidInput(format!("first abscissa must be 0, got {x_first}")));
    }
    if u_first != 0.0 || u_last != 0.0 {
        return Err(Error::Compatibility(format!("endpoint values must be 0, got {u_first} and {u_last}")));
    }
    let pts: Vec<(f64, f64)> = points.to_vec();
    let breaks: Vec<(f64, f64)> = pts.windows(2).filter(|w| w[0].0 == w[1].0).map(|w| (w[0].0, w[0].1)).collect();
    let sampler = move |x: f64| {
        let x = x.clamp(0.0, ell);
        // last segment with x_k <= x, so a jump takes the right value
        let k = pts.partition_point(|p| p.0 <= x).saturating_sub(1).min(pts.len() - 2);
        let (x1, u1) = pts[k];
        let (x2, u2) = pts[k + 1];
        if x2 == x1 {
            u2
        } else {
            u1 + (u2 - u1) * (x - x1) / (x2 - x1)
        }
    };
    InitialData::build(DataKind::Piecewise, ell, format!("piecewise ({} points)", points.len()), Arc::new(sampler), breaks)
}

/// `-x` on `[0, 0.48]`, then `0.5 - (0.5/0.7)(x - 0.3)` up to 1: a jump
/// from `-0.48` to about `0.371` at `0.48`.
pub fn datum_jump() -> InitialData {
    let right = |x: f64| 0.5 - 0.5 / 0.7 * (x - 0.3);
    let mut d = piecewise_initial(&[(0.0, 0.0), (0.48, -0.48), (0.48, right(0.48)), (1.0, right(1.0))])
        .expect("valid piecewise datum");
    d.description = "-x on [0,0.48], 0.5-(x-0.3)/1.4 on (0.48,1]".into();
    d
}

/// `-0.5 x` on `[0, 0.2]`, linear through zero at 0.5 up to `0.1` at 0.8,
/// then `0.5 (1 - x)`: continuous with kinks at 0.2 and 0.8.
pub fn datum_kinks() -> InitialData {
    let mut d = piecewise_initial(&[(0.0, 0.0), (0.2, -0.1), (0.8, 0.1), (1.0, 0.0)]).expect("valid piecewise datum");
    d.description = "-0.5x on [0,0.2], (x-0.5)/3 on [0.2,0.8], 0.5(1-x) on [0.8,1]".into();
    d
}

/// Reads `x,u` rows (header optional) as a piecewise-linear datum.
pub fn load_initial(path: &Path) -> Result<InitialData> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path)?;
    let mut pts = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() < 2 {
            return Err(Error::InvalidInput(format!("{}: line {} needs two columns", path.display(), line + 1)));
        }
        match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
            (Ok(x), Ok(u)) => pts.push((x, u)),
            _ if line == 0 => continue,
            _ => {
                return Err(Error::InvalidInput(format!(
                    "{}: line {} is not numeric",
                    path.display(),
                    line + 1
                )))
            }
        }
    }
    let mut d = piecewise_initial(&pts)?;
    d.description = format!("file {}", path.display());
    Ok(d)
}

/// Parses `quad-pos`, `quad-neg`, `cubic:<x0>`, `cubic-neg:<x0>`, `jump`,
/// `kinks` or `file:<path>`. The built-in shapes assume the given `ell`;
/// `jump` and `kinks` need `ell = 1`.
pub fn parse_initial(spec: &str, ell: f64) -> Result<InitialData> {
    let number = |v: &str| {
        v.parse::<f64>().map_err(|_| Error::InvalidInput(format!("cannot parse '{v}' as a number in '{spec}'")))
    };
    let unit = |d: InitialData| {
        if (ell - 1.0).abs() > 1e-12 {
            Err(Error::InvalidInput(format!("datum '{spec}' is defined on [0, 1], got ell = {ell}")))
        } else {
            Ok(d)
        }
    };
    match spec {
        "quad-pos" => Ok(InitialData::quadratic(ell, true)),
        "quad-neg" => Ok(InitialData::quadratic(ell, false)),
        "jump" => unit(datum_jump()),
        "kinks" => unit(datum_kinks()),
        _ => {
            if let Some(v) = spec.strip_prefix("cubic:") {
                InitialData::cubic(ell, number(v)?, true)
            } else if let Some(v) = spec.strip_prefix("cubic-neg:") {
                InitialData::cubic(ell, number(v)?, false)
            } else if let Some(p) = spec.strip_prefix("file:") {
                let d = load_initial(Path::new(p))?;
                if (d.ell - ell).abs() > 1e-12 * ell {
                    return Err(Error::InvalidInput(format!("datum file covers [0, {}], expected ell = {ell}", d.ell)));
                }
                Ok(d)
            } else {
                Err(Error::InvalidInput(format!(
                    "unknown initial datum '{spec}' (expected quad-pos, quad-neg, cubic:<x0>, cubic-neg:<x0>, jump, kinks or file:<path>)"
                )))
            }
        }
    }
}

/// Classifies a sampled datum by its interior sign pattern.
pub fn classify_grid(u: &GridFunction) -> DataClass {
    let interior = &u.values()[1..u.n_cells()];
    if interior.iter().all(|&v| v >= 0.0) && interior.iter().any(|&v| v > 0.0) {
        return DataClass::APos;
    }
    if interior.iter().all(|&v| v <= 0.0) && interior.iter().any(|&v| v < 0.0) {
        return DataClass::ANeg;
    }
    match u.single_zero_crossing() {
        Some((x0, SignChange::NegToPos)) => DataClass::B(x0),
        Some((x0, SignChange::PosToNeg)) => DataClass::C(x0),
        None => DataClass::Other,
    }
}

pub fn classify_initial(u0: &InitialData, n_cells: usize) -> DataClass {
    classify_grid(&u0.sample(n_cells))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        let b = InitialData::cubic(1.0, 0.45, true).unwrap();
        match classify_initial(&b, 400) {
            DataClass::B(x) => assert!((x - 0.45).abs() < 1e-9),
            c => panic!("{c:?}"),
        }
        let c = InitialData::cubic(1.0, 0.45, false).unwrap();
        assert!(matches!(classify_initial(&c, 400), DataClass::C(x) if (x - 0.45).abs() < 1e-9));
        assert_eq!(classify_initial(&InitialData::quadratic(1.0, true), 400), DataClass::APos);
        assert_eq!(classify_initial(&InitialData::quadratic(1.0, false), 400), DataClass::ANeg);
        let zero = piecewise_initial(&[(0.0, 0.0), (1.0, 0.0)]).unwrap();
        assert_eq!(classify_initial(&zero, 64), DataClass::Other);
        let wiggle = InitialData::custom(1.0, "sin", |x| (3.0 * std::f64::consts::PI * x).sin()).unwrap();
        assert_eq!(classify_initial(&wiggle, 300), DataClass::Other);
    }

    #[test]
    fn jump_datum() {
        let d = datum_jump();
        assert!((d.eval(0.48) - (0.5 - 0.5 / 0.7 * 0.18)).abs() < 1e-12);
        assert_eq!(d.eval(0.3), -0.3);
        let g = d.sample(100);
        assert!((g.values()[48] + 0.48).abs() < 1e-12);
        assert!(g.values()[49] > 0.3);
        assert!(matches!(classify_grid(&g), DataClass::B(x) if (x - 0.48).abs() < 0.01));
    }

    #[test]
    fn kink_datum_is_continuous() {
        let d = datum_kinks();
        assert!((d.eval(0.2) + 0.1).abs() < 1e-15);
        assert!((d.eval(0.5)).abs() < 1e-15);
        assert!((d.eval(0.8) - 0.1).abs() < 1e-15);
        let g = d.sample(200);
        assert!(g.values().windows(2).all(|w| (w[1] - w[0]).abs() < 0.01));
    }

    #[test]
    fn parses_names() {
        assert_eq!(parse_initial("cubic:0.45", 1.0).unwrap().kind, DataKind::TypeB(0.45));
        assert_eq!(parse_initial("cubic-neg:0.3", 1.0).unwrap().kind, DataKind::TypeC(0.3));
        assert_eq!(parse_initial("quad-neg", 2.0).unwrap().kind, DataKind::TypeANeg);
        assert!(parse_initial("jump", 2.0).is_err());
        assert!(parse_initial("sine", 1.0).is_err());
        assert!(parse_initial("cubic:x", 1.0).is_err());
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("u0.csv");
        std::fs::write(&p, "x,u\n0,0\n0.5,-0.2\n0.5,0.3\n1,0\n").unwrap();
        let d = parse_initial(&format!("file:{}", p.display()), 1.0).unwrap();
        assert_eq!(d.eval(0.25), -0.1);
        assert_eq!(d.eval(0.75), 0.15);
    }

    #[test]
    fn incompatible_data_rejected() {
        assert!(matches!(piecewise_initial(&[(0.0, 0.0), (1.0, 0.2)]), Err(Error::Compatibility(_))));
        assert!(InitialData::custom(1.0, "one", |_| 1.0).is_err());
        assert!(piecewise_initial(&[(0.0, 0.0), (0.6, 1.0), (0.5, 0.0), (1.0, 0.0)]).is_err());
    }
}
