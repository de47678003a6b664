use std::fmt;

use super::PddlError;

/// Line/column of a token, both 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sexp {
    Atom(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s, _) => Some(s),
            Sexp::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items, _) => Some(items),
            Sexp::Atom(..) => None,
        }
    }

    /// Head keyword of a list, if the first item is an atom.
    pub fn head(&self) -> Option<&str> {
        self.as_list().and_then(|l| l.first()).and_then(Sexp::as_atom)
    }

    pub fn token(&self) -> String {
        match self {
            Sexp::Atom(s, _) => s.clone(),
            Sexp::List(items, _) => match items.first().and_then(Sexp::as_atom) {
                Some(h) => format!("({h} ...)"),
                None => "(...)".to_string(),
            },
        }
    }
}

/// Reads exactly one s-expression from `text`. Identifiers are lowercased;
/// `;` starts a comment running to the end of the line.
pub fn read(text: &str) -> Result<Sexp, PddlError> {
    let tokens = tokenize(text);
    let mut iter = tokens.into_iter().peekable();
    let first = match iter.next() {
        Some(t) => t,
        None => {
            return Err(PddlError::Syntax {
                pos: Pos { line: 1, col: 1 },
                token: "<eof>".into(),
                message: "empty input".into(),
            })
        }
    };
    let expr = read_from(first, &mut iter)?;
    if let Some((tok, pos)) = iter.next() {
        return Err(PddlError::Syntax {
            pos,
            token: tok,
            message: "trailing input after top-level expression".into(),
        });
    }
    Ok(expr)
}

fn read_from<I>(first: (String, Pos), iter: &mut std::iter::Peekable<I>) -> Result<Sexp, PddlError>
where
    I: Iterator<Item = (String, Pos)>,
{
    let (tok, pos) = first;
    match tok.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match iter.next() {
                    None => {
                        return Err(PddlError::Syntax {
                            pos,
                            token: "(".into(),
                            message: "unclosed parenthesis".into(),
                        })
                    }
                    Some((t, _)) if t == ")" => return Ok(Sexp::List(items, pos)),
                    Some(next) => items.push(read_from(next, iter)?),
                }
            }
        }
        ")" => Err(PddlError::Syntax {
            pos,
            token: tok,
            message: "unexpected closing parenthesis".into(),
        }),
        _ => Ok(Sexp::Atom(tok, pos)),
    }
}

fn tokenize(text: &str) -> Vec<(String, Pos)> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut col = 0;
    let mut current = String::new();
    let mut start = Pos::default();
    let mut in_comment = false;
    for ch in text.chars() {
        if ch == '\n' {
            line += 1;
            col = 0;
        } else {
            col += 1;
        }
        if in_comment {
            if ch == '\n' {
                in_comment = false;
            }
            continue;
        }
        let here = Pos { line, col };
        match ch {
            ';' | '(' | ')' => {
                if !current.is_empty() {
                    out.push((std::mem::take(&mut current), start));
                }
                match ch {
                    ';' => in_comment = true,
                    _ => out.push((ch.to_string(), here)),
                }
            }
            c if c.is_whitespace() => {
                if !current.is_empty() {
                    out.push((std::mem::take(&mut current), start));
                }
            }
            c => {
                if current.is_empty() {
                    start = here;
                }
                current.extend(c.to_lowercase());
            }
        }
    }
    if !current.is_empty() {
        out.push((current, start));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists_with_comments() {
        let e = read("(define ; comment (\n  (Domain X))").unwrap();
        let l = e.as_list().unwrap();
        assert_eq!(l[0].as_atom(), Some("define"));
        assert_eq!(l[1].head(), Some("domain"));
        assert_eq!(l[1].as_list().unwrap()[1].as_atom(), Some("x"));
        assert_eq!(l[1].pos(), Pos { line: 2, col: 3 });
    }

    #[test]
    fn reports_unbalanced_parens() {
        assert!(matches!(read("(a (b)"), Err(PddlError::Syntax { .. })));
        match read("(a) )") {
            Err(PddlError::Syntax { pos, token, .. }) => {
                assert_eq!(token, ")");
                assert_eq!(pos, Pos { line: 1, col: 5 });
            }
            other => panic!("{other:?}"),
        }
        assert!(read("  ").is_err());
    }
}
