//! Recursive-descent parser for counterfactual formulas.
//!
//! ```text
//! formula  := 'Y' '(' exp (',' mspec)* ')'
//! mspec    := fixed | 'M' INT '(' exp (',' mspec)* ')'
//! exp      := 'a' '*'? | IDENT
//! fixed    := 'm' INT '*' | IDENT
//! ```
//!
//! Parsing happens in two passes: a scenario-free pass builds a raw tree
//! with byte offsets, then the tree is checked against the scenario so that
//! arity and index problems get their own error class.

use super::{CfExpr, ExposureLevel, MediatorSpec, Scenario, ScenarioError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CfError {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("arity error at byte {pos}: M{mediator} takes {expected} parent spec(s), found {found}")]
    Arity {
        pos: usize,
        mediator: usize,
        expected: usize,
        found: usize,
    },
    #[error("unknown mediator M{index} at byte {pos}: scenario declares {declared} mediator(s)")]
    UnknownMediator {
        pos: usize,
        index: usize,
        declared: usize,
    },
    #[error("misplaced mediator at byte {pos}: expected M{expected}, found M{found}")]
    MisplacedMediator {
        pos: usize,
        expected: usize,
        found: usize,
    },
    #[error("formula has {found} mediator slot(s) but the scenario declares {expected}")]
    MediatorCount { expected: usize, found: usize },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

/// Parses `text` as a formula over `scenario`.
pub fn parse_cf(text: &str, scenario: Scenario) -> Result<CfExpr, CfError> {
    scenario.validate()?;
    let raw = RawParser::new(text)?.formula()?;
    build(&raw, scenario)
}

pub(super) fn parse_inferred(text: &str) -> Result<CfExpr, CfError> {
    parse_cf_inferred(text).map(|(expr, _)| expr)
}

/// Parses `text` and infers the scenario from its shape: one slot is a
/// single mediator, any nesting makes a chain, otherwise the mediators are
/// non-sequential.
pub fn parse_cf_inferred(text: &str) -> Result<(CfExpr, Scenario), CfError> {
    let raw = RawParser::new(text)?.formula()?;
    let k = raw.slots.len();
    let nested = raw
        .slots
        .iter()
        .any(|s| matches!(s, RawSpec::Cf { parents, .. } if !parents.is_empty()));
    let scenario = match k {
        0 | 1 => Scenario::SingleMediator,
        _ if nested => Scenario::OnePathChain(k),
        _ => Scenario::NonSeq(k),
    };
    Ok((build(&raw, scenario)?, scenario))
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    LParen,
    RParen,
    Comma,
}

#[derive(Debug)]
struct RawFormula {
    exposure: ExposureLevel,
    slots: Vec<RawSpec>,
}

#[derive(Debug)]
enum RawSpec {
    Fixed(String),
    Cf {
        pos: usize,
        index: usize,
        exposure: ExposureLevel,
        parents: Vec<RawSpec>,
        close_pos: usize,
    },
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, CfError> {
    let mut toks = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            c if c.is_whitespace() => i += 1,
            '(' => {
                toks.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                toks.push((i, Tok::RParen));
                i += 1;
            }
            ',' => {
                toks.push((i, Tok::Comma));
                i += 1;
            }
            c if is_word_char(c) => {
                let start = i;
                while i < bytes.len() && is_word_char(bytes[i] as char) {
                    i += 1;
                }
                while i < bytes.len() && bytes[i] == b'*' {
                    i += 1;
                }
                toks.push((start, Tok::Word(text[start..i].to_string())));
            }
            '*' => {
                return Err(CfError::Syntax {
                    pos: i,
                    message: "`*` must follow a name".into(),
                })
            }
            other => {
                return Err(CfError::Syntax {
                    pos: i,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(toks)
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '-' || c == '+'
}

/// `M<digits>` names a mediator counterfactual.
fn mediator_index(word: &str) -> Option<usize> {
    let digits = word.strip_prefix('M')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

struct RawParser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl RawParser {
    fn new(text: &str) -> Result<Self, CfError> {
        Ok(RawParser {
            toks: lex(text)?,
            at: 0,
            end: text.len(),
        })
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|t| t.0).unwrap_or(self.end)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn bump(&mut self) -> Option<(usize, Tok)> {
        let t = self.toks.get(self.at).cloned();
        if t.is_some() {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, CfError> {
        Err(CfError::Syntax {
            pos: self.pos(),
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<usize, CfError> {
        match self.peek() {
            Some(t) if *t == tok => Ok(self.bump().map(|t| t.0).unwrap_or(0)),
            Some(t) => self.err(format!("expected {what}, found {}", describe(t))),
            None => self.err(format!("expected {what}, found end of input")),
        }
    }

    fn formula(mut self) -> Result<RawFormula, CfError> {
        match self.bump() {
            Some((_, Tok::Word(w))) if w == "Y" => {}
            Some((p, t)) => {
                return Err(CfError::Syntax {
                    pos: p,
                    message: format!("formula must start with `Y`, found {}", describe(&t)),
                })
            }
            None => return self.err("empty formula"),
        }
        self.expect(Tok::LParen, "`(`")?;
        let exposure = self.exposure()?;
        let mut slots = Vec::new();
        while self.peek() == Some(&Tok::Comma) {
            self.bump();
            slots.push(self.mspec()?);
        }
        self.expect(Tok::RParen, "`,` or `)`")?;
        if let Some(t) = self.peek() {
            return self.err(format!("trailing input {}", describe(t)));
        }
        Ok(RawFormula { exposure, slots })
    }

    fn exposure(&mut self) -> Result<ExposureLevel, CfError> {
        match self.peek() {
            Some(Tok::Word(w)) if mediator_index(w).is_none() => {
                let w = w.clone();
                self.bump();
                Ok(match w.as_str() {
                    "a" => ExposureLevel::Treatment,
                    "a*" => ExposureLevel::Reference,
                    _ => ExposureLevel::Named(w),
                })
            }
            Some(t) => self.err(format!("expected an exposure level, found {}", describe(t))),
            None => self.err("expected an exposure level, found end of input"),
        }
    }

    fn mspec(&mut self) -> Result<RawSpec, CfError> {
        let pos = self.pos();
        let word = match self.peek() {
            Some(Tok::Word(w)) => w.clone(),
            Some(t) => return self.err(format!("expected a mediator spec, found {}", describe(t))),
            None => return self.err("expected a mediator spec, found end of input"),
        };
        self.bump();
        let Some(index) = mediator_index(&word) else {
            if self.peek() == Some(&Tok::LParen) {
                return Err(CfError::Syntax {
                    pos,
                    message: format!("`{word}` is not a mediator name (expected M<n>)"),
                });
            }
            return Ok(RawSpec::Fixed(word));
        };
        if self.peek() != Some(&Tok::LParen) {
            return self.err(format!("expected `(` after {word}"));
        }
        self.bump();
        let exposure = self.exposure()?;
        let mut parents = Vec::new();
        while self.peek() == Some(&Tok::Comma) {
            self.bump();
            parents.push(self.mspec()?);
        }
        let close_pos = self.expect(Tok::RParen, "`,` or `)`")?;
        Ok(RawSpec::Cf {
            pos,
            index,
            exposure,
            parents,
            close_pos,
        })
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Word(w) => format!("`{w}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
    }
}

fn build(raw: &RawFormula, scenario: Scenario) -> Result<CfExpr, CfError> {
    let k = scenario.mediators();
    let mut mediators = Vec::with_capacity(raw.slots.len());
    for (slot, spec) in raw.slots.iter().enumerate() {
        mediators.push(build_spec(spec, slot + 1, scenario)?);
    }
    if raw.slots.len() != k {
        return Err(CfError::MediatorCount {
            expected: k,
            found: raw.slots.len(),
        });
    }
    Ok(CfExpr {
        exposure: raw.exposure.clone(),
        mediators,
    })
}

fn build_spec(spec: &RawSpec, expected: usize, scenario: Scenario) -> Result<MediatorSpec, CfError> {
    match spec {
        RawSpec::Fixed(label) => Ok(MediatorSpec::Fixed(label.clone())),
        RawSpec::Cf {
            pos,
            index,
            exposure,
            parents,
            close_pos,
        } => {
            let declared = scenario.mediators();
            if *index == 0 || *index > declared {
                return Err(CfError::UnknownMediator {
                    pos: *pos,
                    index: *index,
                    declared,
                });
            }
            if *index != expected {
                return Err(CfError::MisplacedMediator {
                    pos: *pos,
                    expected,
                    found: *index,
                });
            }
            let arity = scenario.parent_arity(*index);
            if parents.len() != arity {
                return Err(CfError::Arity {
                    pos: *close_pos,
                    mediator: *index,
                    expected: arity,
                    found: parents.len(),
                });
            }
            let parents = parents
                .iter()
                .map(|p| build_spec(p, index - 1, scenario))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(MediatorSpec::Counterfactual {
                exposure: exposure.clone(),
                parents,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfexpr::format_cf;
    use ExposureLevel::{Reference as R, Treatment as T};

    const SEQ2: Scenario = Scenario::OnePathChain(2);

    #[test]
    fn parses_single_mediator_formula() {
        let e = parse_cf("Y(a, M1(a*))", Scenario::SingleMediator).unwrap();
        assert_eq!(e, CfExpr::single(T, R));
    }

    #[test]
    fn parses_all_reference_chain() {
        let e = parse_cf("Y(a*, M1(a*), M2(a*, M1(a*)))", SEQ2).unwrap();
        assert_eq!(e, CfExpr::seq2(R, R, R));
    }

    #[test]
    fn missing_parent_is_arity_error() {
        let err = parse_cf("Y(a, M1(a), M2(a))", SEQ2).unwrap_err();
        assert!(
            matches!(err, CfError::Arity { mediator: 2, expected: 1, found: 0, .. }),
            "{err:?}"
        );
    }

    #[test]
    fn extra_parent_in_nonseq_is_arity_error() {
        let err = parse_cf("Y(a, M1(a), M2(a, M1(a)))", Scenario::NonSeq(2)).unwrap_err();
        assert!(matches!(err, CfError::Arity { mediator: 2, expected: 0, found: 1, .. }));
    }

    #[test]
    fn unknown_and_misplaced_indices() {
        let err = parse_cf("Y(a, M1(a), M3(a, M2(a)))", SEQ2).unwrap_err();
        assert!(matches!(err, CfError::UnknownMediator { index: 3, declared: 2, .. }));
        let err = parse_cf("Y(a, M2(a, M1(a)), M1(a))", SEQ2).unwrap_err();
        assert!(matches!(err, CfError::MisplacedMediator { expected: 1, found: 2, .. }));
    }

    #[test]
    fn wrong_slot_count() {
        let err = parse_cf("Y(a, M1(a))", SEQ2).unwrap_err();
        assert_eq!(err, CfError::MediatorCount { expected: 2, found: 1 });
    }

    #[test]
    fn syntax_errors_report_position() {
        let err = parse_cf("Y(a, M1(a*)", Scenario::SingleMediator).unwrap_err();
        assert_eq!(
            err,
            CfError::Syntax {
                pos: 11,
                message: "expected `,` or `)`, found end of input".into()
            }
        );
        let err = parse_cf("Z(a, M1(a))", Scenario::SingleMediator).unwrap_err();
        assert!(matches!(err, CfError::Syntax { pos: 0, .. }));
        let err = parse_cf("Y(a, M1(a)) x", Scenario::SingleMediator).unwrap_err();
        assert!(matches!(err, CfError::Syntax { pos: 12, .. }));
        let err = parse_cf("Y(a, M1 a)", Scenario::SingleMediator).unwrap_err();
        assert!(matches!(err, CfError::Syntax { pos: 8, .. }));
        let err = parse_cf("Y(a, m1*(a))", Scenario::SingleMediator).unwrap_err();
        assert!(matches!(err, CfError::Syntax { pos: 5, .. }));
        let err = parse_cf("Y(a; M1(a))", Scenario::SingleMediator).unwrap_err();
        assert!(matches!(err, CfError::Syntax { pos: 3, .. }));
    }

    #[test]
    fn whitespace_is_insignificant() {
        let e = parse_cf("  Y ( a ,M1( a* ) ,  M2(a,M1(a*)) ) ", SEQ2).unwrap();
        assert_eq!(format_cf(&e), "Y(a, M1(a*), M2(a, M1(a*)))");
    }

    #[test]
    fn named_levels_and_fixed_labels() {
        let e = parse_cf("Y(a, M1(a**), M2(a*, M1(a**)))", SEQ2).unwrap();
        assert_eq!(e.mediators[0], MediatorSpec::natural(ExposureLevel::named("a**")));
        let e = parse_cf("Y(a, m1*, M2(a*, m1*))", SEQ2).unwrap();
        assert_eq!(e.mediators[1], MediatorSpec::nested(R, MediatorSpec::fixed("m1*")));
        let e = parse_cf("Y(1, 29.5, high)", Scenario::NonSeq(2)).unwrap();
        assert_eq!(format_cf(&e), "Y(1, 29.5, high)");
    }

    #[test]
    fn inferred_scenario() {
        let e: CfExpr = "Y(a, M1(a), M2(a*, M1(a)))".parse().unwrap();
        assert_eq!(e, CfExpr::seq2(T, T, R));
        let e: CfExpr = "Y(a, M1(a), M2(a*))".parse().unwrap();
        assert_eq!(e, CfExpr::nonseq2(T, T, R));
    }

    #[test]
    fn longer_chains_nest_one_predecessor() {
        let text = "Y(a, M1(a*), M2(a, M1(a*)), M3(a*, M2(a, M1(a*))))";
        let e = parse_cf(text, Scenario::OnePathChain(3)).unwrap();
        assert_eq!(format_cf(&e), text);
    }
}
