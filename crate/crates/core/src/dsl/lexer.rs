use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Num(i64),
    Ident(String),
    Sym(&'static str),
    End,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Num(n) => format!("number {n}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::End => "end of input".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

const SYMBOLS: [&str; 16] = ["..", ">=", "+", "-", "*", "/", "^", "(", ")", "[", "]", "{", "}", ",", ";", "="];

/// Splits `src` into tokens. Positions start at `(line, col)` so that a
/// field taken out of a larger file reports positions in that file.
pub fn tokenize(src: &str, line: usize, col: usize) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let (mut line, mut col) = (line, col);
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        let start = (line, col);
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let text: String = chars[i..j].iter().collect();
            let n = text
                .parse::<i64>()
                .map_err(|_| ParseError::new(start.0, start.1, format!("number {text} is too large")))?;
            out.push(Token { tok: Tok::Num(n), line: start.0, col: start.1 });
            col += j - i;
            i = j;
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let text: String = chars[i..j].iter().collect();
            out.push(Token { tok: Tok::Ident(text), line: start.0, col: start.1 });
            col += j - i;
            i = j;
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(s) => {
                out.push(Token { tok: Tok::Sym(s), line: start.0, col: start.1 });
                col += s.len();
                i += s.len();
            }
            None => return Err(ParseError::new(start.0, start.1, format!("unexpected character `{c}`"))),
        }
    }
    out.push(Token { tok: Tok::End, line, col });
    Ok(out)
}
