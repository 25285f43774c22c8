//! The JSON input document and its conversion to exact structures.
//!
//! ```json
//! {
//!   "generators": ["2"],
//!   "map": ["x1+1"], "start": ["1"], "observable": "x1",
//!   "recurrence": {"order": 1, "coeffs": ["1", "1"], "init": ["0", "1"]},
//!   "ode": {"order": 1, "poly_coeffs": ["-1", "1"], "init": ["1"]},
//!   "values": ["1", "2", "4"]
//! }
//! ```
//!
//! Every field is optional. Map and observable expressions use `x1, …, xn`,
//! recurrence coefficients use `n`, ODE coefficients use `x`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use orbitlab_core::dynamics::{ExtRational, RationalSelfMap};
use orbitlab_core::exact_numbers::{ExactRational, PrimeSet};
use orbitlab_core::holonomic::{DFiniteODE, PRecurrence};
use orbitlab_core::multgroup::MultSubgroup;
use orbitlab_core::poly::{default_names, RatFunc};
use orbitlab_core::upoly::{UniPoly, UniRatFunc};

use crate::expr::{parse_constant, parse_expr, ExprError, ExprErrorKind};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primes: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recurrence: Option<RecurrenceDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ode: Option<OdeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecurrenceDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    pub coeffs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<u64>,
    pub init: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdeDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    pub poly_coeffs: Vec<String>,
    pub init: Vec<String>,
}

/// A dynamical system with a start point and an observable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct System {
    pub map: RationalSelfMap,
    pub start: Vec<ExactRational>,
    pub observable: RatFunc,
}

/// Everything an input document can describe.
#[derive(Debug, Clone, Default)]
pub struct Problem {
    pub group: Option<MultSubgroup>,
    pub primes: Option<PrimeSet>,
    pub system: Option<System>,
    pub recurrence: Option<PRecurrence>,
    pub ode: Option<DFiniteODE>,
    pub values: Option<Vec<ExtRational>>,
}

impl PartialEq for Problem {
    fn eq(&self, other: &Problem) -> bool {
        self.group.as_ref().map(MultSubgroup::generators) == other.group.as_ref().map(MultSubgroup::generators)
            && self.primes == other.primes
            && self.system == other.system
            && self.recurrence == other.recurrence
            && self.ode == other.ode
            && self.values == other.values
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InputErrorKind {
    Json,
    SyntaxError,
    UnknownVariable,
    NonIntegerExponent,
    DivisionByZero,
    Invalid,
}

/// A parse or validation failure. `line` and `column` point into the input
/// text when the offending string can be located there.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("{field}: {message} (line {line}, column {column}, token `{token}`)")]
pub struct InputError {
    pub kind: InputErrorKind,
    pub field: String,
    pub line: usize,
    pub column: usize,
    pub token: String,
    pub message: String,
}

fn invalid(field: &str, message: impl Into<String>) -> InputError {
    InputError {
        kind: InputErrorKind::Invalid,
        field: field.to_string(),
        line: 0,
        column: 0,
        token: String::new(),
        message: message.into(),
    }
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    /// Line and column of character `offset` inside the first occurrence of
    /// the JSON string literal `s`.
    fn locate(&self, s: &str, offset: usize) -> (usize, usize) {
        let Ok(quoted) = serde_json::to_string(s) else { return (0, offset) };
        let Some(pos) = self.text.find(&quoted) else { return (0, offset) };
        let before = &self.text[..pos];
        let line = before.matches('\n').count() + 1;
        let line_start = before.rfind('\n').map_or(0, |i| i + 1);
        let column = self.text[line_start..pos].chars().count() + 1 + offset;
        (line, column)
    }

    fn expr_error(&self, field: &str, src: &str, e: ExprError) -> InputError {
        let kind = match e.kind {
            ExprErrorKind::Syntax => InputErrorKind::SyntaxError,
            ExprErrorKind::UnknownVariable => InputErrorKind::UnknownVariable,
            ExprErrorKind::NonIntegerExponent => InputErrorKind::NonIntegerExponent,
            ExprErrorKind::DivisionByZero => InputErrorKind::DivisionByZero,
        };
        let (line, column) = self.locate(src, e.column);
        InputError { kind, field: field.to_string(), line, column, token: e.token, message: e.message }
    }

    fn expr(&self, field: &str, src: &str, vars: &[&str]) -> Result<RatFunc, InputError> {
        parse_expr(src, vars).map_err(|e| self.expr_error(field, src, e))
    }

    fn constant(&self, field: &str, src: &str) -> Result<ExactRational, InputError> {
        parse_constant(src).map_err(|e| self.expr_error(field, src, e))
    }

    fn constants(&self, field: &str, list: &[String]) -> Result<Vec<ExactRational>, InputError> {
        list.iter().enumerate().map(|(i, s)| self.constant(&format!("{field}[{i}]"), s)).collect()
    }
}

/// Parses an input document.
pub fn parse_system(text: &str) -> Result<Problem, InputError> {
    let doc: InputDoc = serde_json::from_str(text).map_err(|e| InputError {
        kind: InputErrorKind::Json,
        field: String::new(),
        line: e.line(),
        column: e.column(),
        token: String::new(),
        message: e.to_string(),
    })?;
    build_problem(&doc, &Ctx { text })
}

fn build_problem(doc: &InputDoc, ctx: &Ctx) -> Result<Problem, InputError> {
    let mut problem = Problem::default();

    if let Some(gens) = &doc.generators {
        let gens = ctx.constants("generators", gens)?;
        problem.group = Some(MultSubgroup::new(gens).map_err(|e| invalid("generators", e.to_string()))?);
    }
    if let Some(primes) = &doc.primes {
        problem.primes = Some(PrimeSet::new(primes.iter().copied()).map_err(|e| invalid("primes", e.to_string()))?);
    }

    if let Some(map) = &doc.map {
        let dim = doc.dim.unwrap_or(map.len());
        if dim != map.len() || dim == 0 {
            return Err(invalid("map", format!("expected {dim} coordinates, got {}", map.len())));
        }
        let names = default_names(dim);
        let vars: Vec<&str> = names.iter().map(String::as_str).collect();
        let coords = map
            .iter()
            .enumerate()
            .map(|(i, s)| ctx.expr(&format!("map[{i}]"), s, &vars))
            .collect::<Result<Vec<_>, _>>()?;
        let map = RationalSelfMap::new(coords).map_err(|e| invalid("map", e.to_string()))?;
        let start = ctx.constants("start", doc.start.as_deref().unwrap_or_default())?;
        if start.len() != dim {
            return Err(invalid("start", format!("expected {dim} coordinates, got {}", start.len())));
        }
        let observable = match &doc.observable {
            Some(s) => ctx.expr("observable", s, &vars)?,
            None => RatFunc::var(dim, 0),
        };
        problem.system = Some(System { map, start, observable });
    } else if doc.start.is_some() || doc.observable.is_some() || doc.dim.is_some() {
        return Err(invalid("map", "start, observable and dim need a map"));
    }

    if let Some(rec) = &doc.recurrence {
        let coeffs = rec
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let field = format!("recurrence.coeffs[{i}]");
                let f = ctx.expr(&field, s, &["n"])?;
                UniRatFunc::from_ratfunc(&f).ok_or_else(|| invalid(&field, "not a rational function of n"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if coeffs.is_empty() {
            return Err(invalid("recurrence.coeffs", "at least one coefficient is required"));
        }
        if let Some(order) = rec.order {
            if order + 1 != coeffs.len() {
                return Err(invalid("recurrence.order", format!("order {order} needs {} coefficients", order + 1)));
            }
        }
        let init = ctx.constants("recurrence.init", &rec.init)?;
        let built = match rec.shift {
            Some(p) => PRecurrence::new(coeffs, p, init),
            None => PRecurrence::with_minimal_shift(coeffs, init),
        };
        problem.recurrence = Some(built.map_err(|e| invalid("recurrence", e.to_string()))?);
    }

    if let Some(ode) = &doc.ode {
        let coeffs = ode
            .poly_coeffs
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let field = format!("ode.poly_coeffs[{i}]");
                let f = ctx.expr(&field, s, &["x"])?;
                if !f.is_polynomial() {
                    return Err(invalid(&field, "ODE coefficients must be polynomials"));
                }
                UniPoly::from_multi(f.numerator()).ok_or_else(|| invalid(&field, "not a polynomial in x"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(order) = ode.order {
            if order + 1 != coeffs.len() {
                return Err(invalid("ode.order", format!("order {order} needs {} coefficients", order + 1)));
            }
        }
        let init = ctx.constants("ode.init", &ode.init)?;
        problem.ode = Some(DFiniteODE::new(coeffs, init).map_err(|e| invalid("ode", e.to_string()))?);
    }

    if let Some(values) = &doc.values {
        let parsed = values
            .iter()
            .enumerate()
            .map(|(i, s)| {
                if s.trim() == "inf" {
                    Ok(ExtRational::Infinity)
                } else {
                    ctx.constant(&format!("values[{i}]"), s).map(ExtRational::Finite)
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        problem.values = Some(parsed);
    }
    Ok(problem)
}

/// The canonical document describing `problem`.
pub fn to_doc(problem: &Problem) -> InputDoc {
    let strs = |v: &[ExactRational]| v.iter().map(ToString::to_string).collect::<Vec<_>>();
    let mut doc = InputDoc {
        generators: problem.group.as_ref().map(|g| strs(g.generators())),
        primes: problem.primes.as_ref().map(|p| p.primes().to_vec()),
        ..InputDoc::default()
    };
    if let Some(sys) = &problem.system {
        let names = default_names(sys.map.dimension());
        let vars: Vec<&str> = names.iter().map(String::as_str).collect();
        doc.dim = Some(sys.map.dimension());
        doc.map = Some(sys.map.coordinates().iter().map(|f| f.render(&vars)).collect());
        doc.start = Some(strs(&sys.start));
        doc.observable = Some(sys.observable.render(&vars));
    }
    if let Some(rec) = &problem.recurrence {
        doc.recurrence = Some(RecurrenceDoc {
            order: Some(rec.order()),
            coeffs: rec.coeffs().iter().map(|r| r.render("n")).collect(),
            shift: Some(rec.shift()),
            init: strs(rec.init()),
        });
    }
    if let Some(ode) = &problem.ode {
        doc.ode = Some(OdeDoc {
            order: Some(ode.order()),
            poly_coeffs: ode.coeffs().iter().map(|p| p.render("x")).collect(),
            init: strs(ode.init()),
        });
    }
    doc.values = problem.values.as_ref().map(|v| v.iter().map(ToString::to_string).collect());
    doc
}

/// Pretty JSON for `problem`, accepted back by [`parse_system`].
pub fn serialize_problem(problem: &Problem) -> String {
    serde_json::to_string_pretty(&to_doc(problem)).expect("document serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use orbitlab_core::exact_numbers::rat;

    #[test]
    fn intro_system() {
        let p = parse_system(r#"{"map":["x1+1"],"start":["1"],"observable":"x1"}"#).unwrap();
        let sys = p.system.as_ref().unwrap();
        assert_eq!(sys.map.dimension(), 1);
        assert_eq!(sys.start, vec![rat(1)]);
        assert_eq!(parse_system(&serialize_problem(&p)).unwrap(), p);
    }

    #[test]
    fn group_only() {
        let p = parse_system(r#"{"generators":["2"]}"#).unwrap();
        assert_eq!(p.group.unwrap().generators(), &[rat(2)]);
    }

    #[test]
    fn non_integer_exponent_is_located() {
        let e = parse_system("{\n  \"map\": [\"x1^1.5\"], \"start\": [\"1\"]\n}").unwrap_err();
        assert_eq!(e.kind, InputErrorKind::NonIntegerExponent);
        assert_eq!((e.field.as_str(), e.line, e.token.as_str()), ("map[0]", 2, "1.5"));
        // the opening quote sits at column 11, the token 4 characters later
        assert_eq!(e.column, 15);
    }

    #[test]
    fn bad_json_and_fields() {
        assert_eq!(parse_system("{\"map\": [").unwrap_err().kind, InputErrorKind::Json);
        assert_eq!(parse_system(r#"{"mapp": []}"#).unwrap_err().kind, InputErrorKind::Json);
        let e = parse_system(r#"{"map":["x1+y"],"start":["1"]}"#).unwrap_err();
        assert_eq!(e.kind, InputErrorKind::UnknownVariable);
        let e = parse_system(r#"{"map":["x1"],"start":["1","2"]}"#).unwrap_err();
        assert_eq!(e.kind, InputErrorKind::Invalid);
    }

    #[test]
    fn recurrence_and_ode_round_trip() {
        let text = r#"{
            "generators": ["2", "3"],
            "primes": [3, 2],
            "recurrence": {"order": 1, "coeffs": ["(4*n+2)/(n+2)", "0"], "init": ["1", "1"]},
            "ode": {"poly_coeffs": ["-1", "1"], "init": ["1"]},
            "values": ["1", "inf", "-3/4"]
        }"#;
        let p = parse_system(text).unwrap();
        assert_eq!(p.recurrence.as_ref().unwrap().order(), 1);
        assert_eq!(p.values.as_ref().unwrap()[1], ExtRational::Infinity);
        assert_eq!(parse_system(&serialize_problem(&p)).unwrap(), p);
    }
}
