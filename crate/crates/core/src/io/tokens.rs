use super::LoadError;

/// Whitespace tokenizer that remembers the line each token came from.
pub(crate) struct Tokens<'a> {
    tokens: Vec<(&'a str, usize)>,
    pos: usize,
    last_line: usize,
}

impl<'a> Tokens<'a> {
    /// Tokenizes `text`, skipping the first `skip_lines` lines and anything
    /// after `comment` on a line.
    pub fn new(text: &'a str, skip_lines: usize, comment: Option<char>) -> Self {
        let mut tokens = Vec::new();
        let mut last_line = 0;
        for (i, line) in text.lines().enumerate().skip(skip_lines) {
            let line_no = i + 1;
            last_line = line_no;
            let body = match comment.and_then(|c| line.find(c)) {
                Some(cut) => &line[..cut],
                None => line,
            };
            tokens.extend(body.split_whitespace().map(|t| (t, line_no)));
        }
        Self {
            tokens,
            pos: 0,
            last_line,
        }
    }

    pub fn next(&mut self) -> Option<(&'a str, usize)> {
        let t = self.tokens.get(self.pos).copied();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn peek(&self) -> Option<&'a str> {
        self.tokens.get(self.pos).map(|t| t.0)
    }

    /// Line of the next token, or of the end of file.
    pub fn line(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.last_line, |t| t.1)
    }

    pub fn expect(&mut self, what: &str) -> Result<(&'a str, usize), LoadError> {
        let line = self.line();
        self.next()
            .ok_or_else(|| LoadError::parse(line, format!("unexpected end of file, expected {what}")))
    }

    pub fn usize(&mut self, what: &str) -> Result<usize, LoadError> {
        let (t, line) = self.expect(what)?;
        t.parse()
            .map_err(|_| LoadError::parse(line, format!("expected {what}, found `{t}`")))
    }

    pub fn i64(&mut self, what: &str) -> Result<i64, LoadError> {
        let (t, line) = self.expect(what)?;
        t.parse()
            .map_err(|_| LoadError::parse(line, format!("expected {what}, found `{t}`")))
    }

    pub fn f64(&mut self, what: &str) -> Result<f64, LoadError> {
        let (t, line) = self.expect(what)?;
        t.parse()
            .map_err(|_| LoadError::parse(line, format!("expected {what}, found `{t}`")))
    }

    pub fn skip(&mut self, n: usize) -> Result<(), LoadError> {
        if self.pos + n > self.tokens.len() {
            return Err(LoadError::parse(self.last_line, "unexpected end of file"));
        }
        self.pos += n;
        Ok(())
    }
}
