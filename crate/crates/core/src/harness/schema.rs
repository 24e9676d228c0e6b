//! JSON documents for elements, operators and certificates.
//!
//! ```json
//! {"d": 2, "m": 3, "entries": [[[re, im], ...], ...]}   // element
//! {"d": 2, "m": 3, "A": [[[re, im], ...], ...]}         // operator (m×m)
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modspace::ModuleElement;
use crate::opspace::AdjointableOperator;
use crate::serial::{matrix_from_rows, matrix_rows};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementDoc {
    pub d: usize,
    pub m: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorDoc {
    pub d: usize,
    pub m: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<[f64; 2]>>,
}

impl ElementDoc {
    pub fn from_element(x: &ModuleElement) -> Self {
        ElementDoc {
            d: x.d(),
            m: x.m(),
            entries: matrix_rows(x.entries()),
        }
    }

    pub fn to_element(&self) -> Result<ModuleElement> {
        let a = matrix_from_rows("entries", &self.entries, self.d, self.m).map_err(Error::Parse)?;
        ModuleElement::new(a)
    }
}

impl OperatorDoc {
    pub fn from_operator(t: &AdjointableOperator) -> Self {
        OperatorDoc {
            d: t.d(),
            m: t.m(),
            a: matrix_rows(t.matrix()),
        }
    }

    pub fn to_operator(&self) -> Result<AdjointableOperator> {
        let a = matrix_from_rows("A", &self.a, self.m, self.m).map_err(Error::Parse)?;
        AdjointableOperator::new(self.d, a)
    }
}

/// Two elements under the keys `x` and `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDoc {
    pub x: ElementDoc,
    pub y: ElementDoc,
}

fn parse<'a, T: Deserialize<'a>>(text: &'a str, origin: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{origin}: {e}")))
}

pub fn parse_element(text: &str, origin: &str) -> Result<ModuleElement> {
    parse::<ElementDoc>(text, origin)?
        .to_element()
        .map_err(|e| prefix(e, origin))
}

pub fn parse_operator(text: &str, origin: &str) -> Result<AdjointableOperator> {
    parse::<OperatorDoc>(text, origin)?
        .to_operator()
        .map_err(|e| prefix(e, origin))
}

fn prefix(e: Error, origin: &str) -> Error {
    match e {
        Error::Parse(msg) => Error::Parse(format!("{origin}: {msg}")),
        Error::Shape(msg) => Error::Shape(format!("{origin}: {msg}")),
        other => other,
    }
}

pub fn element_json(x: &ModuleElement) -> String {
    serde_json::to_string(&ElementDoc::from_element(x)).expect("element serializes")
}

pub fn operator_json(t: &AdjointableOperator) -> String {
    serde_json::to_string(&OperatorDoc::from_operator(t)).expect("operator serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn element_round_trip() {
        let text = r#"{"d":1,"m":2,"entries":[[[1.0,0.0],[0.5,-2.0]]]}"#;
        let x = parse_element(text, "x.json").unwrap();
        assert_eq!(element_json(&x), text);
    }

    #[test]
    fn reports_line_and_field() {
        let err = parse_element("{\"d\":1,\n\"m\":2,\n\"entries\": 5}", "x.json").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        let err =
            parse_element(r#"{"d":2,"m":2,"entries":[[[1,0],[0,0]]]}"#, "x.json").unwrap_err();
        assert!(err.to_string().contains("`entries`"), "{err}");
        let err = parse_element(r#"{"d":1,"m":2,"entries":[[[1,0]]]}"#, "x.json").unwrap_err();
        assert!(err.to_string().contains("row 0"), "{err}");
    }

    #[test]
    fn operator_round_trip() {
        let text = r#"{"d":3,"m":1,"A":[[[2.0,1.0]]]}"#;
        let t = parse_operator(text, "t.json").unwrap();
        assert_eq!(t.d(), 3);
        assert_eq!(operator_json(&t), text);
    }
}
