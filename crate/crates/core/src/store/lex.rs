//! Tokenizer shared by the Turtle reader and the query parser.

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Iri(String),
    PName { prefix: String, local: String },
    Word(String),
    Str(String),
    Number(String),
    Var(String),
    DoubleCaret,
    At(String),
    Punct(char),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct LexError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '%' | '.')
}

pub(crate) fn lex(text: &str) -> Result<Vec<Spanned>, LexError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut line_start) = (0usize, 1usize, 0usize);
    while i < chars.len() {
        let c = chars[i];
        let col = i - line_start + 1;
        let err = |message: String| LexError { line, col, message };
        if c == '\n' {
            line += 1;
            i += 1;
            line_start = i;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let tok = match c {
            '<' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && chars[j] != '>' {
                    if chars[j].is_whitespace() {
                        return Err(err("whitespace inside IRI".into()));
                    }
                    j += 1;
                }
                if j == chars.len() {
                    return Err(err("unterminated IRI".into()));
                }
                i = j + 1;
                Tok::Iri(chars[start..j].iter().collect())
            }
            '"' => {
                let mut s = String::new();
                let mut j = i + 1;
                loop {
                    match chars.get(j) {
                        None | Some('\n') => return Err(err("unterminated string".into())),
                        Some('"') => break,
                        Some('\\') => {
                            let e = match chars.get(j + 1) {
                                Some('n') => '\n',
                                Some('r') => '\r',
                                Some('t') => '\t',
                                Some('"') => '"',
                                Some('\\') => '\\',
                                Some('\'') => '\'',
                                other => {
                                    return Err(err(format!("bad escape {other:?}")));
                                }
                            };
                            s.push(e);
                            j += 2;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            j += 1;
                        }
                    }
                }
                i = j + 1;
                Tok::Str(s)
            }
            '^' => {
                if chars.get(i + 1) != Some(&'^') {
                    return Err(err("expected `^^`".into()));
                }
                i += 2;
                Tok::DoubleCaret
            }
            '?' | '$' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                if j == start {
                    return Err(err("empty variable name".into()));
                }
                i = j;
                Tok::Var(chars[start..j].iter().collect())
            }
            '@' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '-') {
                    j += 1;
                }
                i = j;
                Tok::At(chars[start..j].iter().collect())
            }
            '.' | ';' | ',' | '{' | '}' | '*' | '(' | ')' | '[' | ']' => {
                if c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) {
                    return Err(err("number must start with a digit".into()));
                }
                i += 1;
                Tok::Punct(c)
            }
            c if c.is_ascii_digit() || ((c == '-' || c == '+') && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) => {
                let start = i;
                let mut j = i + 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if chars.get(j) == Some(&'.') && chars.get(j + 1).is_some_and(|d| d.is_ascii_digit()) {
                    j += 1;
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                }
                i = j;
                Tok::Number(chars[start..j].iter().collect())
            }
            c if c == ':' || c.is_alphabetic() || c == '_' => {
                let start = i;
                let mut j = i;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_' || chars[j] == '-') {
                    j += 1;
                }
                if chars.get(j) == Some(&':') {
                    let prefix: String = chars[start..j].iter().collect();
                    let ls = j + 1;
                    let mut k = ls;
                    while k < chars.len() && is_name_char(chars[k]) {
                        k += 1;
                    }
                    while k > ls && chars[k - 1] == '.' {
                        k -= 1;
                    }
                    i = k;
                    Tok::PName {
                        prefix,
                        local: chars[ls..k].iter().collect(),
                    }
                } else {
                    i = j;
                    Tok::Word(chars[start..j].iter().collect())
                }
            }
            other => return Err(err(format!("unexpected character `{other}`"))),
        };
        out.push(Spanned { tok, line, col });
    }
    Ok(out)
}
