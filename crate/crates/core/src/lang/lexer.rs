use super::LangError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Float(f64),
    Str(String),
    // keywords
    KwInt,
    KwFloat,
    KwVoid,
    KwIf,
    KwElse,
    KwFor,
    KwWhile,
    KwReturn,
    KwBreak,
    KwContinue,
    // punctuation
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Amp,
    // operators
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Lt,
    Le,
    Gt,
    Ge,
    EqEq,
    Ne,
    AndAnd,
    OrOr,
    Bang,
    Assign,
    PlusEq,
    MinusEq,
    StarEq,
    SlashEq,
    PercentEq,
    PlusPlus,
    MinusMinus,
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub fn tokenize(source: &str) -> Result<Vec<Token>, LangError> {
    let mut lx = Lexer {
        chars: source.chars().collect(),
        pos: 0,
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    loop {
        lx.skip_trivia()?;
        let (line, col) = (lx.line, lx.col);
        let Some(c) = lx.peek() else {
            out.push(Token { tok: Tok::Eof, line, col });
            return Ok(out);
        };
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            lx.ident()
        } else if c.is_ascii_digit() || (c == '.' && lx.peek_at(1).is_some_and(|d| d.is_ascii_digit())) {
            lx.number(line, col)?
        } else if c == '"' {
            lx.string(line, col)?
        } else if c == '\'' {
            lx.char_lit(line, col)?
        } else {
            lx.punct(line, col)?
        };
        out.push(Token { tok, line, col });
    }
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
}

impl Lexer {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, k: usize) -> Option<char> {
        self.chars.get(self.pos + k).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn at_line_start(&self) -> bool {
        self.chars[..self.pos]
            .iter()
            .rev()
            .take_while(|&&c| c != '\n')
            .all(|c| c.is_whitespace())
    }

    fn skip_trivia(&mut self) -> Result<(), LangError> {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '/' && self.peek_at(1) == Some('/') {
                while self.peek().is_some_and(|c| c != '\n') {
                    self.bump();
                }
            } else if c == '/' && self.peek_at(1) == Some('*') {
                let (line, col) = (self.line, self.col);
                self.bump();
                self.bump();
                loop {
                    match self.peek() {
                        None => return Err(LangError::syntax(line, col, "unterminated comment")),
                        Some('*') if self.peek_at(1) == Some('/') => {
                            self.bump();
                            self.bump();
                            break;
                        }
                        Some(_) => {
                            self.bump();
                        }
                    }
                }
            } else if c == '#' && self.at_line_start() {
                // preprocessor lines such as `#include <stdio.h>` are ignored
                while self.peek().is_some_and(|c| c != '\n') {
                    self.bump();
                }
            } else {
                break;
            }
        }
        Ok(())
    }

    fn ident(&mut self) -> Tok {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(|c| c.is_ascii_alphanumeric() || *c == '_') {
            s.push(c);
            self.bump();
        }
        match s.as_str() {
            "int" => Tok::KwInt,
            "float" | "double" => Tok::KwFloat,
            "void" => Tok::KwVoid,
            "if" => Tok::KwIf,
            "else" => Tok::KwElse,
            "for" => Tok::KwFor,
            "while" => Tok::KwWhile,
            "return" => Tok::KwReturn,
            "break" => Tok::KwBreak,
            "continue" => Tok::KwContinue,
            _ => Tok::Ident(s),
        }
    }

    fn number(&mut self, line: usize, col: usize) -> Result<Tok, LangError> {
        let mut s = String::new();
        let mut is_float = false;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                s.push(c);
            } else if c == '.' && !is_float {
                is_float = true;
                s.push(c);
            } else if (c == 'e' || c == 'E')
                && (self.peek_at(1).is_some_and(|d| d.is_ascii_digit())
                    || (matches!(self.peek_at(1), Some('+') | Some('-'))
                        && self.peek_at(2).is_some_and(|d| d.is_ascii_digit())))
            {
                is_float = true;
                s.push(c);
                self.bump();
                if let Some(sign) = self.peek().filter(|c| *c == '+' || *c == '-') {
                    s.push(sign);
                    self.bump();
                }
                continue;
            } else {
                break;
            }
            self.bump();
        }
        // C suffixes carry no meaning here
        if is_float && matches!(self.peek(), Some('f') | Some('F')) {
            self.bump();
        }
        if self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(LangError::syntax(line, col, format!("malformed number `{s}`")));
        }
        if is_float {
            s.parse::<f64>()
                .map(Tok::Float)
                .map_err(|_| LangError::syntax(line, col, format!("malformed number `{s}`")))
        } else {
            match s.parse::<i64>() {
                Ok(v) if v <= i32::MAX as i64 + 1 => Ok(Tok::Int(v)),
                _ => Err(LangError::syntax(line, col, format!("integer literal `{s}` out of range"))),
            }
        }
    }

    fn escape(&mut self, line: usize, col: usize) -> Result<char, LangError> {
        match self.bump() {
            Some('n') => Ok('\n'),
            Some('t') => Ok('\t'),
            Some('r') => Ok('\r'),
            Some('0') => Ok('\0'),
            Some('\\') => Ok('\\'),
            Some('"') => Ok('"'),
            Some('\'') => Ok('\''),
            Some(other) => Err(LangError::syntax(line, col, format!("unknown escape `\\{other}`"))),
            None => Err(LangError::syntax(line, col, "unterminated literal")),
        }
    }

    fn string(&mut self, line: usize, col: usize) -> Result<Tok, LangError> {
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => return Err(LangError::syntax(line, col, "unterminated string")),
                Some('"') => break,
                Some('\\') => s.push(self.escape(line, col)?),
                Some(c) => s.push(c),
            }
        }
        Ok(Tok::Str(s))
    }

    fn char_lit(&mut self, line: usize, col: usize) -> Result<Tok, LangError> {
        self.bump();
        let c = match self.bump() {
            Some('\\') => self.escape(line, col)?,
            Some(c) if c != '\'' => c,
            _ => return Err(LangError::syntax(line, col, "empty character literal")),
        };
        if self.bump() != Some('\'') {
            return Err(LangError::syntax(line, col, "unterminated character literal"));
        }
        Ok(Tok::Int(c as i64))
    }

    fn punct(&mut self, line: usize, col: usize) -> Result<Tok, LangError> {
        let c = self.bump().unwrap_or('\0');
        let next = self.peek();
        let two = |lx: &mut Lexer, t: Tok| {
            lx.bump();
            t
        };
        Ok(match (c, next) {
            ('(', _) => Tok::LParen,
            (')', _) => Tok::RParen,
            ('{', _) => Tok::LBrace,
            ('}', _) => Tok::RBrace,
            (',', _) => Tok::Comma,
            (';', _) => Tok::Semi,
            ('+', Some('+')) => two(self, Tok::PlusPlus),
            ('+', Some('=')) => two(self, Tok::PlusEq),
            ('+', _) => Tok::Plus,
            ('-', Some('-')) => two(self, Tok::MinusMinus),
            ('-', Some('=')) => two(self, Tok::MinusEq),
            ('-', _) => Tok::Minus,
            ('*', Some('=')) => two(self, Tok::StarEq),
            ('*', _) => Tok::Star,
            ('/', Some('=')) => two(self, Tok::SlashEq),
            ('/', _) => Tok::Slash,
            ('%', Some('=')) => two(self, Tok::PercentEq),
            ('%', _) => Tok::Percent,
            ('<', Some('=')) => two(self, Tok::Le),
            ('<', _) => Tok::Lt,
            ('>', Some('=')) => two(self, Tok::Ge),
            ('>', _) => Tok::Gt,
            ('=', Some('=')) => two(self, Tok::EqEq),
            ('=', _) => Tok::Assign,
            ('!', Some('=')) => two(self, Tok::Ne),
            ('!', _) => Tok::Bang,
            ('&', Some('&')) => two(self, Tok::AndAnd),
            ('&', _) => Tok::Amp,
            ('|', Some('|')) => two(self, Tok::OrOr),
            (other, _) => return Err(LangError::syntax(line, col, format!("unexpected character `{other}`"))),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn operators_and_literals() {
        assert_eq!(
            toks("i <= n; i++ += 1.5e2 'a'"),
            vec![
                Tok::Ident("i".into()),
                Tok::Le,
                Tok::Ident("n".into()),
                Tok::Semi,
                Tok::Ident("i".into()),
                Tok::PlusPlus,
                Tok::PlusEq,
                Tok::Float(150.0),
                Tok::Int(97),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn skips_comments_and_includes() {
        assert_eq!(toks("#include <stdio.h>\n/* x */ int // y\n"), vec![Tok::KwInt, Tok::Eof]);
    }

    #[test]
    fn positions_and_errors() {
        let t = tokenize("int\n  x").unwrap();
        assert_eq!((t[1].line, t[1].col), (2, 3));
        assert!(matches!(tokenize("a @ b"), Err(LangError::Syntax { line: 1, col: 3, .. })));
        assert!(tokenize("\"abc").is_err());
    }
}
