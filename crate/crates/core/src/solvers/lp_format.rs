//! CPLEX-LP text format: writer and a parser for the subset the writer emits.
//!
//! Sections are `Minimize`, `Subject To`, `Bounds`, `End`. Numbers carry 17
//! significant digits, so a write/parse round trip reproduces every `f64`
//! bit-for-bit. The writer lists every variable in the `Bounds` section in
//! index order; the parser restores that ordering when the section is
//! complete, which makes round trips structurally exact.

use super::{LpModel, Relation};
use crate::error::{Result, SpoError};
use std::collections::HashMap;
use std::fmt::Write as _;

fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Renders the model in CPLEX-LP format.
pub fn write_lp(model: &LpModel) -> String {
    let mut out = String::new();
    out.push_str("Minimize\n obj:");
    let mut line_len = 5;
    let mut first = true;
    for (j, &c) in model.objective.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let term = render_term(c, &model.names[j], first);
        first = false;
        if line_len + term.len() > 200 {
            out.push_str("\n   ");
            line_len = 3;
        }
        out.push_str(&term);
        line_len += term.len();
    }
    out.push_str("\nSubject To\n");
    for (i, con) in model.constraints.iter().enumerate() {
        let _ = write!(out, " c{i}:");
        let mut line_len = 4;
        let mut first = true;
        for (j, &a) in con.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let term = render_term(a, &model.names[j], first);
            first = false;
            if line_len + term.len() > 200 {
                out.push_str("\n   ");
                line_len = 3;
            }
            out.push_str(&term);
            line_len += term.len();
        }
        if first {
            // Constant row: keep it parseable with an explicit zero term.
            let _ = write!(out, " 0 {}", model.names[0]);
        }
        let rel = match con.relation {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        };
        let _ = write!(out, " {rel} {}\n", fmt_num(con.rhs));
    }
    out.push_str("Bounds\n");
    for (j, (lo, up)) in model.bounds.iter().enumerate() {
        let name = &model.names[j];
        match (lo, up) {
            (None, None) => {
                let _ = writeln!(out, " {name} free");
            }
            (Some(l), None) => {
                let _ = writeln!(out, " {name} >= {}", fmt_num(*l));
            }
            (None, Some(u)) => {
                let _ = writeln!(out, " -infinity <= {name} <= {}", fmt_num(*u));
            }
            (Some(l), Some(u)) => {
                let _ = writeln!(out, " {} <= {name} <= {}", fmt_num(*l), fmt_num(*u));
            }
        }
    }
    out.push_str("End\n");
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Word(String),
    Number(f64),
    Plus,
    Minus,
    Le,
    Ge,
    Eq,
    Colon,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let bytes: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '\\' {
            // Comment to end of line.
            while i < bytes.len() && bytes[i] != '\n' {
                i += 1;
            }
        } else if c == '+' {
            tokens.push(Token::Plus);
            i += 1;
        } else if c == '-' {
            tokens.push(Token::Minus);
            i += 1;
        } else if c == ':' {
            tokens.push(Token::Colon);
            i += 1;
        } else if c == '<' || c == '>' || c == '=' {
            let mut j = i + 1;
            if j < bytes.len() && bytes[j] == '=' {
                j += 1;
            }
            tokens.push(match c {
                '<' => Token::Le,
                '>' => Token::Ge,
                _ => Token::Eq,
            });
            i = j;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() {
                let d = bytes[i];
                if d.is_ascii_digit() || d == '.' {
                    i += 1;
                } else if (d == 'e' || d == 'E')
                    && i + 1 < bytes.len()
                    && (bytes[i + 1].is_ascii_digit() || bytes[i + 1] == '+' || bytes[i + 1] == '-')
                {
                    i += 2;
                } else {
                    break;
                }
            }
            let text: String = bytes[start..i].iter().collect();
            let v: f64 = text
                .parse()
                .map_err(|_| SpoError::Parse(format!("bad number {text:?}")))?;
            tokens.push(Token::Number(v));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_alphanumeric() || bytes[i] == '_') {
                i += 1;
            }
            tokens.push(Token::Word(bytes[start..i].iter().collect()));
        } else {
            return Err(SpoError::Parse(format!("unexpected character {c:?}")));
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    var_ids: HashMap<String, usize>,
    var_names: Vec<String>,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn var_id(&mut self, name: &str) -> usize {
        if let Some(&id) = self.var_ids.get(name) {
            return id;
        }
        let id = self.var_names.len();
        self.var_ids.insert(name.to_string(), id);
        self.var_names.push(name.to_string());
        id
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Token::Word(w)) if w.eq_ignore_ascii_case(kw))
    }

    /// Linear expression: signed terms until a relation or section keyword.
    fn parse_terms(&mut self) -> Result<Vec<(usize, f64)>> {
        let mut terms = Vec::new();
        loop {
            if self.at_section_boundary() {
                break;
            }
            match self.peek() {
                Some(Token::Le | Token::Ge | Token::Eq) | None => break,
                _ => {}
            }
            let mut sign = 1.0;
            loop {
                match self.peek() {
                    Some(Token::Plus) => {
                        self.pos += 1;
                    }
                    Some(Token::Minus) => {
                        sign = -sign;
                        self.pos += 1;
                    }
                    _ => break,
                }
            }
            let coeff = if let Some(Token::Number(v)) = self.peek() {
                let v = *v;
                self.pos += 1;
                v
            } else {
                1.0
            };
            match self.next() {
                Some(Token::Word(name)) => {
                    let id = self.var_id(&name);
                    terms.push((id, sign * coeff));
                }
                other => {
                    return Err(SpoError::Parse(format!(
                        "expected a variable name, found {other:?}"
                    )))
                }
            }
        }
        Ok(terms)
    }

    fn at_section_boundary(&self) -> bool {
        self.at_keyword("subject")
            || self.at_keyword("bounds")
            || self.at_keyword("end")
            || self.at_keyword("st")
    }
}

/// Parses the CPLEX-LP subset produced by [`write_lp`].
pub fn parse_lp(text: &str) -> Result<LpModel> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        var_ids: HashMap::new(),
        var_names: Vec::new(),
    };

    if !p.at_keyword("minimize") {
        return Err(SpoError::Parse("expected Minimize section".into()));
    }
    p.pos += 1;
    // Optional objective label.
    if matches!(p.peek(), Some(Token::Word(_)))
        && matches!(p.tokens.get(p.pos + 1), Some(Token::Colon))
    {
        p.pos += 2;
    }
    let obj_terms = p.parse_terms()?;

    let mut constraints: Vec<(Vec<(usize, f64)>, Relation, f64)> = Vec::new();
    if p.at_keyword("subject") {
        p.pos += 1;
        if !p.at_keyword("to") {
            return Err(SpoError::Parse("expected To after Subject".into()));
        }
        p.pos += 1;
    } else if p.at_keyword("st") {
        p.pos += 1;
    }
    while !(p.at_keyword("bounds") || p.at_keyword("end")) {
        if p.peek().is_none() {
            return Err(SpoError::Parse("unterminated constraint section".into()));
        }
        if matches!(p.peek(), Some(Token::Word(_)))
            && matches!(p.tokens.get(p.pos + 1), Some(Token::Colon))
        {
            p.pos += 2;
        }
        let terms = p.parse_terms()?;
        let relation = match p.next() {
            Some(Token::Le) => Relation::Le,
            Some(Token::Ge) => Relation::Ge,
            Some(Token::Eq) => Relation::Eq,
            other => {
                return Err(SpoError::Parse(format!(
                    "expected a relation, found {other:?}"
                )))
            }
        };
        let mut sign = 1.0;
        while matches!(p.peek(), Some(Token::Minus | Token::Plus)) {
            if matches!(p.peek(), Some(Token::Minus)) {
                sign = -sign;
            }
            p.pos += 1;
        }
        let rhs = match p.next() {
            Some(Token::Number(v)) => sign * v,
            other => {
                return Err(SpoError::Parse(format!(
                    "expected a right-hand side, found {other:?}"
                )))
            }
        };
        constraints.push((terms, relation, rhs));
    }

    // Bounds: `x free`, `x >= l`, `l <= x <= u`, `-infinity <= x <= u`.
    let mut bounds: HashMap<usize, (Option<f64>, Option<f64>)> = HashMap::new();
    let mut bounds_order: Vec<usize> = Vec::new();
    if p.at_keyword("bounds") {
        p.pos += 1;
        while !p.at_keyword("end") {
            let mut lead_sign = 1.0;
            let mut lead_num: Option<f64> = None;
            loop {
                match p.peek() {
                    Some(Token::Minus) => {
                        lead_sign = -lead_sign;
                        p.pos += 1;
                    }
                    Some(Token::Plus) => {
                        p.pos += 1;
                    }
                    Some(Token::Number(v)) => {
                        lead_num = Some(lead_sign * *v);
                        p.pos += 1;
                        break;
                    }
                    Some(Token::Word(w)) if w.eq_ignore_ascii_case("infinity") => {
                        lead_num = Some(lead_sign * f64::INFINITY);
                        p.pos += 1;
                        break;
                    }
                    Some(Token::Word(w)) if w.eq_ignore_ascii_case("inf") => {
                        lead_num = Some(lead_sign * f64::INFINITY);
                        p.pos += 1;
                        break;
                    }
                    _ => break,
                }
            }
            if let Some(lo) = lead_num {
                // `lo <= x <= up`
                if !matches!(p.next(), Some(Token::Le)) {
                    return Err(SpoError::Parse("expected <= in bound".into()));
                }
                let name = match p.next() {
                    Some(Token::Word(w)) => w,
                    other => {
                        return Err(SpoError::Parse(format!(
                            "expected variable in bound, found {other:?}"
                        )))
                    }
                };
                if !matches!(p.next(), Some(Token::Le)) {
                    return Err(SpoError::Parse("expected <= in bound".into()));
                }
                let mut sign = 1.0;
                while matches!(p.peek(), Some(Token::Minus | Token::Plus)) {
                    if matches!(p.peek(), Some(Token::Minus)) {
                        sign = -sign;
                    }
                    p.pos += 1;
                }
                let up = match p.next() {
                    Some(Token::Number(v)) => sign * v,
                    other => {
                        return Err(SpoError::Parse(format!(
                            "expected upper bound, found {other:?}"
                        )))
                    }
                };
                let id = p.var_id(&name);
                let lo_opt = if lo.is_finite() { Some(lo) } else { None };
                bounds.insert(id, (lo_opt, Some(up)));
                bounds_order.push(id);
            } else {
                let name = match p.next() {
                    Some(Token::Word(w)) => w,
                    other => {
                        return Err(SpoError::Parse(format!(
                            "expected variable in bound, found {other:?}"
                        )))
                    }
                };
                let id = p.var_id(&name);
                match p.peek() {
                    Some(Token::Word(w)) if w.eq_ignore_ascii_case("free") => {
                        p.pos += 1;
                        bounds.insert(id, (None, None));
                    }
                    Some(Token::Ge) => {
                        p.pos += 1;
                        let mut sign = 1.0;
                        while matches!(p.peek(), Some(Token::Minus | Token::Plus)) {
                            if matches!(p.peek(), Some(Token::Minus)) {
                                sign = -sign;
                            }
                            p.pos += 1;
                        }
                        let lo = match p.next() {
                            Some(Token::Number(v)) => sign * v,
                            other => {
                                return Err(SpoError::Parse(format!(
                                    "expected lower bound, found {other:?}"
                                )))
                            }
                        };
                        bounds.insert(id, (Some(lo), None));
                    }
                    Some(Token::Le) => {
                        p.pos += 1;
                        let mut sign = 1.0;
                        while matches!(p.peek(), Some(Token::Minus | Token::Plus)) {
                            if matches!(p.peek(), Some(Token::Minus)) {
                                sign = -sign;
                            }
                            p.pos += 1;
                        }
                        let up = match p.next() {
                            Some(Token::Number(v)) => sign * v,
                            other => {
                                return Err(SpoError::Parse(format!(
                                    "expected upper bound, found {other:?}"
                                )))
                            }
                        };
                        bounds.insert(id, (Some(0.0), Some(up)));
                    }
                    other => {
                        return Err(SpoError::Parse(format!(
                            "unexpected token in bounds: {other:?}"
                        )))
                    }
                }
                bounds_order.push(id);
            }
        }
    }
    if !p.at_keyword("end") {
        return Err(SpoError::Parse("expected End".into()));
    }

    // When the bounds section lists every variable, adopt its ordering.
    let n = p.var_names.len();
    let order: Vec<usize> = if bounds_order.len() == n {
        bounds_order.clone()
    } else {
        (0..n).collect()
    };
    let mut position = vec![0usize; n];
    for (new_idx, &old_idx) in order.iter().enumerate() {
        position[old_idx] = new_idx;
    }

    let mut model = LpModel::new(n);
    for (new_idx, &old_idx) in order.iter().enumerate() {
        model.names[new_idx] = p.var_names[old_idx].clone();
    }
    for (id, coeff) in obj_terms {
        model.objective[position[id]] += coeff;
    }
    for (terms, relation, rhs) in constraints {
        let mut row = vec![0.0; n];
        for (id, coeff) in terms {
            row[position[id]] += coeff;
        }
        model.add_constraint(row, relation, rhs);
    }
    for (id, b) in bounds {
        model.bounds[position[id]] = b;
    }
    Ok(model)
}

fn render_term(coeff: f64, name: &str, first: bool) -> String {
    if first {
        format!(" {} {}", fmt_num(coeff), name)
    } else if coeff < 0.0 {
        format!(" - {} {}", fmt_num(-coeff), name)
    } else {
        format!(" + {} {}", fmt_num(coeff), name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::simplex_solve;

    fn sample_model() -> LpModel {
        let mut lp = LpModel::new(3);
        lp.objective = vec![1.5, 0.0, -0.25];
        lp.set_name(0, "B_0_0");
        lp.set_name(1, "B_0_1");
        lp.set_name(2, "p_0_0");
        lp.set_bounds(0, None, None);
        lp.set_bounds(1, Some(-1.0), Some(2.5));
        lp.set_bounds(2, Some(0.0), None);
        lp.add_constraint(vec![1.0, -2.0, 0.0], Relation::Eq, 0.125);
        lp.add_constraint(vec![0.0, 1.0, 1.0], Relation::Ge, -3.0);
        lp.add_constraint(vec![1.0, 0.0, 4.0], Relation::Le, 10.0);
        lp
    }

    #[test]
    fn writer_emits_required_sections() {
        let text = write_lp(&sample_model());
        for section in ["Minimize", "Subject To", "Bounds", "End"] {
            assert!(text.contains(section), "missing {section} in:\n{text}");
        }
    }

    #[test]
    fn round_trip_is_structurally_exact() {
        let model = sample_model();
        let text = write_lp(&model);
        let parsed = parse_lp(&text).unwrap();
        assert_eq!(parsed, model);
    }

    #[test]
    fn round_trip_preserves_awkward_numbers() {
        let mut lp = LpModel::new(2);
        lp.objective = vec![1.0 / 3.0, -1e-17];
        lp.add_constraint(vec![0.1 + 0.2, 1.0], Relation::Le, 17.000000000000004);
        let parsed = parse_lp(&write_lp(&lp)).unwrap();
        assert_eq!(parsed, lp);
    }

    #[test]
    fn round_trip_solves_identically() {
        let model = sample_model();
        let direct = simplex_solve(&model).unwrap();
        let reparsed = simplex_solve(&parse_lp(&write_lp(&model)).unwrap()).unwrap();
        assert_eq!(direct.status, reparsed.status);
        assert!((direct.objective_value - reparsed.objective_value).abs() <= 1e-8);
    }
}
