//! The quiver text format.
//!
//! ```text
//! quiver := item (';' item)* ';'?
//! item   := vertex | arrow | ε
//! vertex := ID
//! arrow  := ID ':' ID '->' ID
//! ID     := [A-Za-z0-9_]+
//! ```
//!
//! Whitespace (including newlines) is insignificant and `#` starts a comment
//! running to the end of the line. Input whose first non-blank character is
//! `{` is read as JSON instead:
//! `{"vertices": ["1", "2"], "arrows": [{"id": "a", "src": "2", "tgt": "1"}]}`.
//! Vertex ids may be given as JSON strings or integers.

use serde::Deserialize;

use super::Quiver;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Colon,
    To,
    Semi,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (l0, c0) = (line, column);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        match c {
            c if c.is_whitespace() => {
                bump(&mut chars);
            }
            '#' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    bump(&mut chars);
                }
            }
            ';' => {
                bump(&mut chars);
                out.push(Spanned { tok: Tok::Semi, line: l0, column: c0 });
            }
            ':' => {
                bump(&mut chars);
                out.push(Spanned { tok: Tok::Colon, line: l0, column: c0 });
            }
            '-' => {
                bump(&mut chars);
                if chars.peek() != Some(&'>') {
                    return Err(syntax(l0, c0, "expected `->`"));
                }
                bump(&mut chars);
                out.push(Spanned { tok: Tok::To, line: l0, column: c0 });
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let mut id = String::new();
                while chars.peek().is_some_and(|&c| c.is_ascii_alphanumeric() || c == '_') {
                    id.push(bump(&mut chars));
                }
                out.push(Spanned { tok: Tok::Ident(id), line: l0, column: c0 });
            }
            other => return Err(syntax(l0, c0, format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct ArrowDecl {
    id: String,
    src: String,
    tgt: String,
    line: usize,
    column: usize,
}

fn parse_dsl(text: &str) -> Result<Quiver> {
    let toks = tokenize(text)?;
    let mut vertices: Vec<(String, usize, usize)> = Vec::new();
    let mut arrows: Vec<ArrowDecl> = Vec::new();
    let mut items: Vec<&[Spanned]> = Vec::new();
    let mut start = 0;
    for (k, t) in toks.iter().enumerate() {
        if t.tok == Tok::Semi {
            items.push(&toks[start..k]);
            start = k + 1;
        }
    }
    items.push(&toks[start..]);
    for item in items {
        match item {
            [] => {}
            [Spanned { tok: Tok::Ident(v), line, column }] => vertices.push((v.clone(), *line, *column)),
            [Spanned { tok: Tok::Ident(a), line, column }, Spanned { tok: Tok::Colon, .. }, Spanned { tok: Tok::Ident(s), .. }, Spanned { tok: Tok::To, .. }, Spanned { tok: Tok::Ident(t), .. }] => {
                arrows.push(ArrowDecl {
                    id: a.clone(),
                    src: s.clone(),
                    tgt: t.clone(),
                    line: *line,
                    column: *column,
                })
            }
            [first, ..] => {
                return Err(syntax(
                    first.line,
                    first.column,
                    "expected a vertex `id` or an arrow `name:src->tgt`",
                ))
            }
        }
    }
    let mut q = Quiver::empty();
    for (v, line, column) in vertices {
        q.add_vertex(&v).map_err(|e| syntax(line, column, e.to_string()))?;
    }
    for a in arrows {
        q.add_arrow(&a.id, &a.src, &a.tgt)
            .map_err(|e| syntax(a.line, a.column, e.to_string()))?;
    }
    Ok(q)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonId {
    Text(String),
    Int(i64),
}

impl JsonId {
    fn into_string(self) -> String {
        match self {
            JsonId::Text(s) => s,
            JsonId::Int(n) => n.to_string(),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonArrow {
    id: JsonId,
    src: JsonId,
    tgt: JsonId,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonQuiver {
    vertices: Vec<JsonId>,
    #[serde(default)]
    arrows: Vec<JsonArrow>,
}

fn parse_json(text: &str) -> Result<Quiver> {
    let raw: JsonQuiver =
        serde_json::from_str(text).map_err(|e| syntax(e.line(), e.column(), e.to_string()))?;
    let mut q = Quiver::empty();
    for v in raw.vertices {
        q.add_vertex(&v.into_string())?;
    }
    for a in raw.arrows {
        q.add_arrow(&a.id.into_string(), &a.src.into_string(), &a.tgt.into_string())?;
    }
    Ok(q)
}

/// Parses either the text format or its JSON equivalent.
pub fn parse_quiver(text: &str) -> Result<Quiver> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_dsl(text)
    }
}

fn valid_id(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(super) fn check_id(kind: &str, s: &str) -> Result<()> {
    if valid_id(s) {
        Ok(())
    } else {
        Err(Error::Quiver(format!("invalid {kind} id `{s}`")))
    }
}
