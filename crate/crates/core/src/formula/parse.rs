use std::collections::HashSet;

use super::syntax::{name, Fixpoint, Name, SurfaceFormula, TemporalOp, DEFAULT_ACTION};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("variable {0} is used both as a binder and as a free proposition")]
    Unbound(String),
    #[error("variable {0} occurs under an odd number of negations")]
    NegativeVariable(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Tilde,
    Amp,
    Bar,
    Implies,
    Iff,
    Lt,
    Gt,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Dot,
    Eof,
}

struct Lexer {
    tokens: Vec<(Token, usize, usize)>,
}

impl Lexer {
    fn new(text: &str) -> Result<Self, ParseError> {
        let mut tokens = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line_no = lineno + 1;
            if line.trim_start().starts_with('#') {
                continue;
            }
            let chars: Vec<char> = line.chars().collect();
            let mut i = 0;
            while i < chars.len() {
                let c = chars[i];
                let col = i + 1;
                if c.is_whitespace() {
                    i += 1;
                    continue;
                }
                if c.is_ascii_alphabetic() || c == '_' {
                    let start = i;
                    while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                        i += 1;
                    }
                    let word: String = chars[start..i].iter().collect();
                    tokens.push((Token::Ident(word), line_no, col));
                    continue;
                }
                let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
                let (tok, len) = if rest.starts_with("<=>") {
                    (Token::Iff, 3)
                } else if rest.starts_with("=>") {
                    (Token::Implies, 2)
                } else {
                    let tok = match c {
                        '~' | '!' => Token::Tilde,
                        '&' => Token::Amp,
                        '|' => Token::Bar,
                        '<' => Token::Lt,
                        '>' => Token::Gt,
                        '[' => Token::LBracket,
                        ']' => Token::RBracket,
                        '(' => Token::LParen,
                        ')' => Token::RParen,
                        '.' => Token::Dot,
                        _ => {
                            return Err(ParseError::Syntax {
                                line: line_no,
                                column: col,
                                message: format!("unexpected character '{c}'"),
                            })
                        }
                    };
                    (tok, 1)
                };
                tokens.push((tok, line_no, col));
                i += len;
            }
        }
        let (line, column) = tokens.last().map(|t| (t.1, t.2 + 1)).unwrap_or((1, 1));
        tokens.push((Token::Eof, line, column));
        Ok(Lexer { tokens })
    }
}

struct Parser {
    tokens: Vec<(Token, usize, usize)>,
    pos: usize,
    bound: Vec<Name>,
}

const KEYWORDS: [&str; 8] = ["true", "false", "mu", "nu", "AG", "AF", "EF", "EG"];

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn advance(&mut self) -> Token {
        let tok = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let (_, line, column) = self.tokens[self.pos];
        Err(ParseError::Syntax {
            line,
            column,
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Token, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.advance();
            Ok(())
        } else {
            self.error(format!("expected {what}, found {:?}", self.peek()))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Token::Ident(w) if !KEYWORDS.contains(&w.as_str()) => {
                self.advance();
                Ok(w)
            }
            other => self.error(format!("expected identifier, found {other:?}")),
        }
    }

    fn formula(&mut self) -> Result<SurfaceFormula, ParseError> {
        if let Token::Ident(w) = self.peek() {
            let op = match w.as_str() {
                "mu" => Some(Fixpoint::Mu),
                "nu" => Some(Fixpoint::Nu),
                _ => None,
            };
            if let Some(op) = op {
                self.advance();
                let x = self.ident()?;
                self.expect(Token::Dot, "'.'")?;
                self.bound.push(name(&x));
                let body = self.formula();
                self.bound.pop();
                return Ok(SurfaceFormula::fix(op, &x, body?));
            }
        }
        self.iff()
    }

    /// Binders extend as far right as possible, so they may close any binary chain.
    fn operand(&mut self, next: fn(&mut Self) -> Result<SurfaceFormula, ParseError>) -> Result<SurfaceFormula, ParseError> {
        if matches!(self.peek(), Token::Ident(w) if w == "mu" || w == "nu") {
            self.formula()
        } else {
            next(self)
        }
    }

    fn iff(&mut self) -> Result<SurfaceFormula, ParseError> {
        let mut left = self.implies()?;
        while *self.peek() == Token::Iff {
            self.advance();
            let right = self.operand(Self::implies)?;
            left = SurfaceFormula::iff(left, right);
        }
        Ok(left)
    }

    fn implies(&mut self) -> Result<SurfaceFormula, ParseError> {
        let left = self.or()?;
        if *self.peek() == Token::Implies {
            self.advance();
            let right = self.operand(Self::implies)?;
            return Ok(SurfaceFormula::implies(left, right));
        }
        Ok(left)
    }

    fn or(&mut self) -> Result<SurfaceFormula, ParseError> {
        let mut parts = vec![self.and()?];
        while *self.peek() == Token::Bar {
            self.advance();
            parts.push(self.operand(Self::and)?);
        }
        Ok(SurfaceFormula::disj(parts))
    }

    fn and(&mut self) -> Result<SurfaceFormula, ParseError> {
        let mut parts = vec![self.unary()?];
        while *self.peek() == Token::Amp {
            self.advance();
            parts.push(self.operand(Self::unary)?);
        }
        Ok(SurfaceFormula::conj(parts))
    }

    fn unary(&mut self) -> Result<SurfaceFormula, ParseError> {
        match self.peek().clone() {
            Token::Tilde => {
                self.advance();
                Ok(SurfaceFormula::not(self.operand(Self::unary)?))
            }
            Token::Lt => {
                self.advance();
                let action = self.action(Token::Gt, "'>'")?;
                Ok(SurfaceFormula::Diamond(action, Box::new(self.operand(Self::unary)?)))
            }
            Token::LBracket => {
                self.advance();
                let action = self.action(Token::RBracket, "']'")?;
                Ok(SurfaceFormula::Box(action, Box::new(self.operand(Self::unary)?)))
            }
            Token::LParen => {
                self.advance();
                let f = self.formula()?;
                self.expect(Token::RParen, "')'")?;
                Ok(f)
            }
            Token::Ident(w) => {
                let temporal = match w.as_str() {
                    "AG" => Some(TemporalOp::AG),
                    "AF" => Some(TemporalOp::AF),
                    "EF" => Some(TemporalOp::EF),
                    "EG" => Some(TemporalOp::EG),
                    _ => None,
                };
                self.advance();
                if let Some(op) = temporal {
                    return Ok(SurfaceFormula::temporal(op, self.operand(Self::unary)?));
                }
                match w.as_str() {
                    "true" => Ok(SurfaceFormula::True),
                    "false" => Ok(SurfaceFormula::False),
                    "mu" | "nu" => self.error("binder must be parenthesized here"),
                    _ if self.bound.iter().any(|b| &**b == w) => Ok(SurfaceFormula::var(&w)),
                    _ => Ok(SurfaceFormula::prop(&w)),
                }
            }
            other => self.error(format!("unexpected {other:?}")),
        }
    }

    fn action(&mut self, close: Token, what: &str) -> Result<Name, ParseError> {
        if *self.peek() == close {
            self.advance();
            return Ok(name(DEFAULT_ACTION));
        }
        let a = self.ident()?;
        self.expect(close, what)?;
        Ok(name(&a))
    }
}

/// Parses one formula in the text grammar; `#` lines are comments.
pub fn parse(text: &str) -> Result<SurfaceFormula, ParseError> {
    let lexer = Lexer::new(text)?;
    let mut parser = Parser {
        tokens: lexer.tokens,
        pos: 0,
        bound: Vec::new(),
    };
    let f = parser.formula()?;
    if *parser.peek() != Token::Eof {
        return parser.error(format!("trailing input {:?}", parser.peek()));
    }
    check_scoping(&f)?;
    Ok(f)
}

fn check_scoping(f: &SurfaceFormula) -> Result<(), ParseError> {
    let mut binders = HashSet::new();
    let mut props = HashSet::new();
    collect_names(f, &mut binders, &mut props);
    if let Some(x) = binders.intersection(&props).min() {
        return Err(ParseError::Unbound(x.to_string()));
    }
    check_polarity(f, false)
}

fn collect_names(f: &SurfaceFormula, binders: &mut HashSet<Name>, props: &mut HashSet<Name>) {
    use SurfaceFormula as S;
    match f {
        S::Prop(p) => {
            props.insert(p.clone());
        }
        S::Fix(_, x, g) => {
            binders.insert(x.clone());
            collect_names(g, binders, props);
        }
        S::Not(g) | S::Diamond(_, g) | S::Box(_, g) | S::Temporal(_, g) => collect_names(g, binders, props),
        S::And(a, b) | S::Or(a, b) | S::Implies(a, b) | S::Iff(a, b) => {
            collect_names(a, binders, props);
            collect_names(b, binders, props);
        }
        S::True | S::False | S::Var(_) => {}
    }
}

/// Variables must occur positively relative to their binder.
fn check_polarity(f: &SurfaceFormula, negated: bool) -> Result<(), ParseError> {
    fn go(f: &SurfaceFormula, neg: bool, bound: &mut Vec<(Name, bool)>) -> Result<(), ParseError> {
        use SurfaceFormula as S;
        match f {
            S::Var(x) => {
                let at_binder = bound.iter().rev().find(|(y, _)| y == x).map(|b| b.1).unwrap_or(false);
                if at_binder != neg {
                    return Err(ParseError::NegativeVariable(x.to_string()));
                }
                Ok(())
            }
            S::Not(g) => go(g, !neg, bound),
            S::And(a, b) | S::Or(a, b) => {
                go(a, neg, bound)?;
                go(b, neg, bound)
            }
            S::Implies(a, b) => {
                go(a, !neg, bound)?;
                go(b, neg, bound)
            }
            S::Iff(a, b) => {
                for side in [a, b] {
                    if mentions_bound_var(side, bound) {
                        go(side, neg, bound)?;
                        go(side, !neg, bound)?;
                    }
                }
                Ok(())
            }
            S::Diamond(_, g) | S::Box(_, g) | S::Temporal(_, g) => go(g, neg, bound),
            S::Fix(_, x, g) => {
                bound.push((x.clone(), neg));
                let r = go(g, neg, bound);
                bound.pop();
                r
            }
            S::True | S::False | S::Prop(_) => Ok(()),
        }
    }
    go(f, negated, &mut Vec::new())
}

fn mentions_bound_var(f: &SurfaceFormula, bound: &[(Name, bool)]) -> bool {
    use SurfaceFormula as S;
    match f {
        S::Var(x) => bound.iter().any(|(y, _)| y == x),
        S::Not(g) | S::Diamond(_, g) | S::Box(_, g) | S::Temporal(_, g) => mentions_bound_var(g, bound),
        S::Fix(_, _, g) => mentions_bound_var(g, bound),
        S::And(a, b) | S::Or(a, b) | S::Implies(a, b) | S::Iff(a, b) => {
            mentions_bound_var(a, bound) || mentions_bound_var(b, bound)
        }
        S::True | S::False | S::Prop(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use SurfaceFormula as S;

    #[test]
    fn binder_over_diamond() {
        let f = parse("mu X. <a> X").unwrap();
        assert_eq!(f, S::fix(Fixpoint::Mu, "X", S::diamond("a", S::var("X"))));
    }

    #[test]
    fn negated_conjunct() {
        assert_eq!(parse("p & ~p").unwrap(), S::and(S::prop("p"), S::not(S::prop("p"))));
    }

    #[test]
    fn temporal_operator() {
        assert_eq!(parse("AG p").unwrap(), S::temporal(TemporalOp::AG, S::prop("p")));
    }

    #[test]
    fn precedence_chain() {
        let f = parse("a | b & c => d <=> e").unwrap();
        let expected = S::iff(
            S::implies(S::or(S::prop("a"), S::and(S::prop("b"), S::prop("c"))), S::prop("d")),
            S::prop("e"),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn implication_is_right_associative() {
        let f = parse("a => b => c").unwrap();
        assert_eq!(f, S::implies(S::prop("a"), S::implies(S::prop("b"), S::prop("c"))));
    }

    #[test]
    fn default_action_and_comments() {
        let f = parse("# comment\n<> p & [] q").unwrap();
        assert_eq!(f, S::and(S::diamond("", S::prop("p")), S::boxed("", S::prop("q"))));
    }

    #[test]
    fn binder_inside_conjunction_extends_right() {
        let f = parse("p & mu X. <> X | q").unwrap();
        let expected = S::and(
            S::prop("p"),
            S::fix(Fixpoint::Mu, "X", S::or(S::diamond("", S::var("X")), S::prop("q"))),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn reports_position() {
        match parse("p &\n  & q") {
            Err(ParseError::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_binder_name_used_freely() {
        assert!(matches!(parse("X & mu X. <> X"), Err(ParseError::Unbound(_))));
    }

    #[test]
    fn rejects_negative_variable() {
        assert!(matches!(parse("mu X. ~<> X"), Err(ParseError::NegativeVariable(_))));
        assert!(parse("~mu X. ~<> ~X").is_ok());
    }

    #[test]
    fn display_round_trip() {
        for text in ["mu X. p & <a> X | [b] q", "AG (p => q <=> r)", "~(p & q) | nu Y. [] Y"] {
            let f = parse(text).unwrap();
            assert_eq!(parse(&f.to_string()).unwrap(), f, "{text}");
        }
    }
}
