use super::{Formula, FormulaError, MAX_PROPS};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Until,
    Release,
    Eventually,
    Always,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, FormulaError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            c if c.is_whitespace() => {
                i += 1;
            }
            '!' | '~' => {
                out.push((Tok::Not, col));
                i += 1;
            }
            '&' => {
                out.push((Tok::And, col));
                i += if chars.get(i + 1) == Some(&'&') { 2 } else { 1 };
            }
            '|' => {
                out.push((Tok::Or, col));
                i += if chars.get(i + 1) == Some(&'|') { 2 } else { 1 };
            }
            '(' => {
                out.push((Tok::LParen, col));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, col));
                i += 1;
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push((Tok::Implies, col));
                i += 2;
            }
            c if c.is_alphanumeric() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                let tok = match word.as_str() {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "U" => Tok::Until,
                    "R" => Tok::Release,
                    "F" => Tok::Eventually,
                    "G" => Tok::Always,
                    "X" => return Err(FormulaError::NextOperator { column: col }),
                    _ => Tok::Ident(word),
                };
                out.push((tok, col));
            }
            _ => {
                return Err(FormulaError::Syntax {
                    column: col,
                    message: format!("unexpected character '{c}'"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_col: usize,
    names: Vec<String>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn err<T>(&self, message: &str) -> Result<T, FormulaError> {
        Err(FormulaError::Syntax {
            column: self.toks.get(self.pos).map(|(_, c)| *c).unwrap_or(self.end_col),
            message: message.to_string(),
        })
    }

    fn formula(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.or()?;
        if self.peek() == Some(&Tok::Implies) {
            self.pos += 1;
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, FormulaError> {
        let mut acc = self.and()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            acc = Formula::or(acc, self.and()?);
        }
        Ok(acc)
    }

    fn and(&mut self) -> Result<Formula, FormulaError> {
        let mut acc = self.binary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            acc = Formula::and(acc, self.binary()?);
        }
        Ok(acc)
    }

    fn binary(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.unary()?;
        match self.peek() {
            Some(Tok::Until) => {
                self.pos += 1;
                Ok(Formula::until(lhs, self.binary()?))
            }
            Some(Tok::Release) => {
                self.pos += 1;
                Ok(Formula::release(lhs, self.binary()?))
            }
            _ => Ok(lhs),
        }
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        match self.peek() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::Eventually) => {
                self.pos += 1;
                Ok(Formula::eventually(self.unary()?))
            }
            Some(Tok::Always) => {
                self.pos += 1;
                Ok(Formula::always(self.unary()?))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, FormulaError> {
        match self.peek().cloned() {
            Some(Tok::True) => {
                self.pos += 1;
                Ok(Formula::True)
            }
            Some(Tok::False) => {
                self.pos += 1;
                Ok(Formula::False)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let idx = match self.names.iter().position(|n| *n == name) {
                    Some(i) => i,
                    None => {
                        self.names.push(name);
                        self.names.len() - 1
                    }
                };
                Ok(Formula::Atom(idx))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(f)
            }
            Some(_) => self.err("unexpected token"),
            None => self.err("unexpected end of input"),
        }
    }
}

fn natural_key(s: &str) -> (String, u64, String) {
    let digits_at = s
        .char_indices()
        .rev()
        .take_while(|(_, c)| c.is_ascii_digit())
        .last()
        .map(|(i, _)| i);
    match digits_at {
        Some(i) if s[i..].len() < 19 => (s[..i].to_string(), s[i..].parse().unwrap_or(0), s.to_string()),
        _ => (s.to_string(), 0, s.to_string()),
    }
}

fn remap(f: &Formula, map: &[usize]) -> Formula {
    use Formula::*;
    match f {
        True => True,
        False => False,
        Atom(i) => Atom(map[*i]),
        Not(a) => Formula::not(remap(a, map)),
        Eventually(a) => Formula::eventually(remap(a, map)),
        Always(a) => Formula::always(remap(a, map)),
        And(a, b) => Formula::and(remap(a, map), remap(b, map)),
        Or(a, b) => Formula::or(remap(a, map), remap(b, map)),
        Implies(a, b) => Formula::implies(remap(a, map), remap(b, map)),
        Until(a, b) => Formula::until(remap(a, map), remap(b, map)),
        Release(a, b) => Formula::release(remap(a, map), remap(b, map)),
    }
}

pub(super) fn parse(
    text: &str,
    table: Option<&[String]>,
) -> Result<(Formula, Vec<String>), FormulaError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        end_col: text.chars().count() + 1,
        names: Vec::new(),
    };
    let f = p.formula()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    let seen = p.names;
    let target: Vec<String> = match table {
        Some(t) => {
            for n in &seen {
                if !t.contains(n) {
                    return Err(FormulaError::UnknownProposition(n.clone()));
                }
            }
            t.to_vec()
        }
        None => {
            let mut sorted = seen.clone();
            sorted.sort_by_key(|s| natural_key(s));
            sorted
        }
    };
    if target.len() > MAX_PROPS {
        return Err(FormulaError::TooManyPropositions(target.len()));
    }
    let map: Vec<usize> = seen
        .iter()
        .map(|n| target.iter().position(|t| t == n).unwrap())
        .collect();
    Ok((remap(&f, &map), target))
}
