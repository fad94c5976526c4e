use super::{ParseDiagnostic, SourceSpan};

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Quoted(String),
    Number(String),
    LParen,
    RParen,
    Comma,
    Dot,
    ColonDash,
    Arrow,
    QueryStart,
    Question,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Quoted(s) => format!("string \"{s}\""),
            Tok::Number(s) => format!("number `{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::ColonDash => "`:-`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::QueryStart => "`?-`".into(),
            Tok::Question => "`?`".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

pub(crate) fn tokenize(text: &str, file: &str) -> Result<Vec<Token>, Vec<ParseDiagnostic>> {
    let mut lexer = Lexer { chars: text.chars().collect(), pos: 0, line: 1, column: 1, file };
    let mut tokens = Vec::new();
    let mut errors = Vec::new();
    while let Some(result) = lexer.next_token() {
        match result {
            Ok(t) => tokens.push(t),
            Err(e) => errors.push(e),
        }
    }
    if errors.is_empty() {
        Ok(tokens)
    } else {
        Err(errors)
    }
}

struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
    file: &'a str,
}

impl Lexer<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<char> {
        self.chars.get(self.pos + 1).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn span(&self) -> SourceSpan {
        SourceSpan::new(self.file, self.line, self.column)
    }

    fn next_token(&mut self) -> Option<Result<Token, ParseDiagnostic>> {
        loop {
            match self.peek()? {
                c if c.is_whitespace() => {
                    self.bump();
                }
                '%' => {
                    while self.peek().is_some_and(|c| c != '\n') {
                        self.bump();
                    }
                }
                _ => break,
            }
        }
        let span = self.span();
        let c = self.bump()?;
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            ':' if self.peek() == Some('-') => {
                self.bump();
                Tok::ColonDash
            }
            '-' if self.peek() == Some('>') => {
                self.bump();
                Tok::Arrow
            }
            '-' if self.peek() == Some('-') && self.peek2() == Some('>') => {
                self.bump();
                self.bump();
                Tok::Arrow
            }
            '?' if self.peek() == Some('-') => {
                self.bump();
                Tok::QueryStart
            }
            '?' => Tok::Question,
            '"' => return Some(self.quoted(span)),
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::from(c);
                while let Some(c) = self.peek().filter(|c| c.is_ascii_alphanumeric() || *c == '_') {
                    s.push(c);
                    self.bump();
                }
                Tok::Ident(s)
            }
            c if c.is_ascii_digit() => {
                let mut s = String::from(c);
                while let Some(c) = self.peek().filter(char::is_ascii_digit) {
                    s.push(c);
                    self.bump();
                }
                if self.peek() == Some('.') && self.peek2().is_some_and(|c| c.is_ascii_digit()) {
                    s.push('.');
                    self.bump();
                    while let Some(c) = self.peek().filter(char::is_ascii_digit) {
                        s.push(c);
                        self.bump();
                    }
                }
                Tok::Number(s)
            }
            other => return Some(Err(ParseDiagnostic::error(format!("unexpected character `{other}`"), span))),
        };
        Some(Ok(Token { tok, span }))
    }

    fn quoted(&mut self, span: SourceSpan) -> Result<Token, ParseDiagnostic> {
        let mut s = String::new();
        loop {
            match self.bump() {
                None => return Err(ParseDiagnostic::error("unterminated string", span)),
                Some('"') => break,
                Some('\\') => match self.bump() {
                    Some('n') => s.push('\n'),
                    Some('t') => s.push('\t'),
                    Some(c @ ('"' | '\\')) => s.push(c),
                    Some(c) => return Err(ParseDiagnostic::error(format!("unknown escape `\\{c}`"), span)),
                    None => return Err(ParseDiagnostic::error("unterminated string", span)),
                },
                Some(c) => s.push(c),
            }
        }
        Ok(Token { tok: Tok::Quoted(s), span })
    }
}
