// SPDX-License-Identifier: Apache-2.0

/// Keyword renames from SMT-LIB 2.5 to 2.6.
const KEYWORDS: &[(&str, &str)] = &[
    ("int.to.str", "str.from_int"),
    ("str.to.int", "str.to_int"),
    ("str.in.re", "str.in_re"),
    ("str.to.re", "str.to_re"),
    ("re.nostr", "re.none"),
    ("re.empty", "re.none"),
];

fn is_symbol_char(c: char) -> bool {
    !(c.is_whitespace() || matches!(c, '(' | ')' | '"' | ';' | '|'))
}

/// Rewrites SMT-LIB 2.5 keywords and `\x` escapes to their 2.6 forms.
///
/// Keywords are replaced only when they form a complete symbol outside of
/// string literals, quoted symbols and comments. Inside string literals
/// `\x0n` becomes `\u{n}` and `\xhh` becomes `\u{hh}`; everything else is
/// copied unchanged.
pub fn translate_25_to_26(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            '"' => i = copy_string_literal(&chars, i, &mut out),
            '|' => {
                let end = chars[i + 1..]
                    .iter()
                    .position(|&c| c == '|')
                    .map_or(chars.len(), |p| i + 2 + p);
                out.extend(&chars[i..end]);
                i = end;
            }
            ';' => {
                let end = chars[i..]
                    .iter()
                    .position(|&c| c == '\n')
                    .map_or(chars.len(), |p| i + p);
                out.extend(&chars[i..end]);
                i = end;
            }
            c if is_symbol_char(c) => {
                let end = chars[i..]
                    .iter()
                    .position(|&c| !is_symbol_char(c))
                    .map_or(chars.len(), |p| i + p);
                let token: String = chars[i..end].iter().collect();
                match KEYWORDS.iter().find(|(old, _)| *old == token) {
                    Some((_, new)) => out.push_str(new),
                    None => out.push_str(&token),
                }
                i = end;
            }
            _ => {
                out.push(c);
                i += 1;
            }
        }
    }
    out
}

/// Copies the literal starting at the opening quote `start`, rewriting
/// escapes; returns the index after the closing quote.
fn copy_string_literal(chars: &[char], start: usize, out: &mut String) -> usize {
    out.push('"');
    let mut i = start + 1;
    while i < chars.len() {
        match chars[i] {
            '"' if chars.get(i + 1) == Some(&'"') => {
                out.push_str("\"\"");
                i += 2;
            }
            '"' => {
                out.push('"');
                return i + 1;
            }
            '\\' if chars.get(i + 1) == Some(&'\\') => {
                out.push_str("\\\\");
                i += 2;
            }
            '\\' if chars.get(i + 1) == Some(&'x') => match (chars.get(i + 2), chars.get(i + 3)) {
                (Some(&hi), Some(&lo)) if hi.is_ascii_hexdigit() && lo.is_ascii_hexdigit() => {
                    if hi == '0' && lo.is_ascii_digit() {
                        out.push_str(&format!("\\u{{{lo}}}"));
                    } else {
                        out.push_str(&format!("\\u{{{hi}{lo}}}"));
                    }
                    i += 4;
                }
                _ => {
                    out.push_str("\\x");
                    i += 2;
                }
            },
            c => {
                out.push(c);
                i += 1;
            }
        }
    }
    i
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_rows() {
        assert_eq!(translate_25_to_26("(str.in.re x r)"), "(str.in_re x r)");
        assert_eq!(translate_25_to_26("(re.empty)"), "(re.none)");
        assert_eq!(translate_25_to_26("re.nostr"), "re.none");
        assert_eq!(translate_25_to_26("(int.to.str 5)"), "(str.from_int 5)");
        assert_eq!(translate_25_to_26("(str.to.int x)"), "(str.to_int x)");
        assert_eq!(translate_25_to_26("(str.to.re \"a\")"), "(str.to_re \"a\")");
        assert_eq!(translate_25_to_26(r#""a\x05b""#), r#""a\u{5}b""#);
        assert_eq!(translate_25_to_26(r#""\x41\x7f""#), r#""\u{41}\u{7f}""#);
    }

    #[test]
    fn untouched_inputs() {
        assert_eq!(translate_25_to_26("(str.len x)"), "(str.len x)");
        assert_eq!(translate_25_to_26("str.in.re2"), "str.in.re2");
        assert_eq!(translate_25_to_26("\"str.in.re\""), "\"str.in.re\"");
        assert_eq!(translate_25_to_26("|str.in.re|"), "|str.in.re|");
        assert_eq!(translate_25_to_26("; str.in.re\nx"), "; str.in.re\nx");
        assert_eq!(translate_25_to_26("\\x05"), "\\x05");
        assert_eq!(translate_25_to_26(r#""\\x41""#), r#""\\x41""#);
        assert_eq!(translate_25_to_26(r#""\xg1""#), r#""\xg1""#);
    }

    #[test]
    fn idempotent_on_sample() {
        let src = "(assert (str.in.re x (re.++ (str.to.re \"\\x0a\") re.empty)))";
        let once = translate_25_to_26(src);
        assert_eq!(translate_25_to_26(&once), once);
    }
}
