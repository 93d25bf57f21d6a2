use std::fmt;

/// Syntax error with a 1-based position and the tokens that would have
/// been accepted there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
    pub expected: Vec<String>,
}

impl ParseError {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> ParseError {
        ParseError { line, col, message: message.into(), expected: Vec::new() }
    }

    pub fn expecting(mut self, expected: &[&str]) -> ParseError {
        self.expected = expected.iter().map(|s| s.to_string()).collect();
        self
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)?;
        if !self.expected.is_empty() {
            let items: Vec<String> = self.expected.iter().map(|x| format!("`{x}`")).collect();
            write!(f, " (expected {})", items.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}
