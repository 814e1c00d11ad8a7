//! Comment- and string-aware tokenizer. Only identifiers and punctuation
//! survive; comments and string literals are dropped.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommentSyntax {
    pub line_comments: Vec<String>,
    /// `(open, close)` pairs.
    pub block_comments: Vec<(String, String)>,
    pub string_delimiters: Vec<char>,
}

impl CommentSyntax {
    pub fn c_like() -> Self {
        Self {
            line_comments: vec!["//".into()],
            block_comments: vec![("/*".into(), "*/".into())],
            string_delimiters: vec!['"'],
        }
    }

    pub fn hash() -> Self {
        Self {
            line_comments: vec!["#".into()],
            block_comments: vec![],
            string_delimiters: vec!['"', '\''],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Punct(char),
    /// Number literals and other runs that are not identifiers.
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub text: &'a str,
    pub kind: TokenKind,
    pub line: usize,
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '$'
}

pub fn tokenize<'a>(content: &'a str, syntax: &CommentSyntax) -> Vec<Token<'a>> {
    let bytes = content.as_bytes();
    let mut tokens = Vec::new();
    let mut line = 1usize;
    let mut i = 0usize;

    while i < content.len() {
        let rest = &content[i..];

        if let Some((_, close)) = syntax
            .block_comments
            .iter()
            .find(|(open, _)| rest.starts_with(open.as_str()))
        {
            let open_len = syntax
                .block_comments
                .iter()
                .find(|(_, c)| c == close)
                .map(|(o, _)| o.len())
                .unwrap_or(0);
            let body = &rest[open_len..];
            let consumed = match body.find(close.as_str()) {
                Some(end) => open_len + end + close.len(),
                None => rest.len(),
            };
            line += rest[..consumed].matches('\n').count();
            i += consumed;
            continue;
        }
        if syntax.line_comments.iter().any(|p| rest.starts_with(p.as_str())) {
            i += rest.find('\n').unwrap_or(rest.len());
            continue;
        }

        let c = rest.chars().next().expect("non-empty");
        if syntax.string_delimiters.contains(&c) {
            // Strings end at the matching unescaped delimiter or at end of line.
            let mut j = i + c.len_utf8();
            while j < content.len() {
                let d = content[j..].chars().next().expect("in bounds");
                if d == '\\' {
                    j += 1;
                    if j < content.len() {
                        let skipped = content[j..].chars().next().expect("in bounds");
                        if skipped == '\n' {
                            line += 1;
                        }
                        j += skipped.len_utf8();
                    }
                    continue;
                }
                if d == '\n' {
                    break;
                }
                j += d.len_utf8();
                if d == c {
                    break;
                }
            }
            i = j;
            continue;
        }

        if c == '\n' {
            line += 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        if is_ident_char(c) {
            let len = rest.find(|ch: char| !is_ident_char(ch)).unwrap_or(rest.len());
            let text = &rest[..len];
            let kind = if bytes[i].is_ascii_digit() {
                TokenKind::Other
            } else {
                TokenKind::Ident
            };
            tokens.push(Token { text, kind, line });
            i += len;
            continue;
        }
        tokens.push(Token {
            text: &rest[..c.len_utf8()],
            kind: if c.is_ascii_punctuation() {
                TokenKind::Punct(c)
            } else {
                TokenKind::Other
            },
            line,
        });
        i += c.len_utf8();
    }
    tokens
}
