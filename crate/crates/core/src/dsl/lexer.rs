use super::Diagnostic;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokKind {
    Ident(String),
    Num(u64),
    Punct(&'static str),
    Eof,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tok {
    pub kind: TokKind,
    pub line: usize,
    pub col: usize,
}

const PUNCT: &[&str] = &[
    "|-", "->", "=>", "<-", "/\\", "\\/", "++", "..", "(", ")", "[", "]", "{", "}", ",", ";", ":", ".", "~", "+", "*",
    "=", "\\", "⊢",
];

fn ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

/// Splits `text` into tokens; `#` starts a comment running to the end of
/// the line. Unknown characters are reported and skipped.
pub fn lex(text: &str, diags: &mut Vec<Diagnostic>) -> Vec<Tok> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (lno, col) = (li + 1, i + 1);
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                match s.parse::<u64>() {
                    Ok(n) => out.push(Tok { kind: TokKind::Num(n), line: lno, col }),
                    Err(_) => diags.push(Diagnostic::new(lno, col, format!("number `{s}` is too large"))),
                }
                continue;
            }
            if ident_start(c) {
                let start = i;
                while i < chars.len() && ident_continue(chars[i]) {
                    i += 1;
                }
                out.push(Tok { kind: TokKind::Ident(chars[start..i].iter().collect()), line: lno, col });
                continue;
            }
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            if let Some(p) = PUNCT.iter().find(|p| rest.starts_with(**p)) {
                let kind = if *p == "⊢" { TokKind::Punct("|-") } else { TokKind::Punct(p) };
                out.push(Tok { kind, line: lno, col });
                i += p.chars().count();
                continue;
            }
            diags.push(Diagnostic::new(lno, col, format!("unexpected character `{c}`")));
            i += 1;
        }
    }
    let line = text.lines().count() + 1;
    out.push(Tok { kind: TokKind::Eof, line, col: 1 });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_carry_positions() {
        let mut d = Vec::new();
        let toks = lex("P(x) |- Q\n  # note\n k+1", &mut d);
        assert!(d.is_empty());
        assert_eq!(toks[0].kind, TokKind::Ident("P".into()));
        assert_eq!(toks[4].kind, TokKind::Punct("|-"));
        assert_eq!((toks[4].line, toks[4].col), (1, 6));
        let k = toks.iter().find(|t| t.kind == TokKind::Ident("k".into())).unwrap();
        assert_eq!((k.line, k.col), (3, 2));
    }

    #[test]
    fn bad_characters_are_reported() {
        let mut d = Vec::new();
        lex("P @ Q", &mut d);
        assert_eq!(d.len(), 1);
        assert_eq!((d[0].line, d[0].col), (1, 3));
    }
}
