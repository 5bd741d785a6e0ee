// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use super::Sort;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("`{op}` expects {expected} argument(s), got {got}")]
    Arity {
        op: String,
        expected: &'static str,
        got: usize,
    },
    #[error("argument {index} of `{op}` has sort {got}, expected {expected}")]
    Sort {
        op: String,
        index: usize,
        expected: Sort,
        got: Sort,
    },
    #[error("`{op}` takes {expected} index parameter(s), got {got}")]
    Params {
        op: String,
        expected: &'static str,
        got: usize,
    },
    #[error("`{0}` is not a recognized operator")]
    Unknown(String),
}

enum Args {
    /// Exactly these sorts.
    Fixed(&'static [Sort]),
    /// At least `min` arguments, all of one sort.
    Many(Sort, usize),
    /// At least `min` arguments of one common (arbitrary) sort.
    SameMany(usize),
}

use Sort::{Bool, Integer, Re, String as Str};

fn signature(op: &str) -> Option<(Args, Sort)> {
    let sig = match op {
        "and" | "or" => (Args::Many(Bool, 1), Bool),
        "not" => (Args::Fixed(&[Bool]), Bool),
        "=>" => (Args::Many(Bool, 2), Bool),
        "=" | "distinct" => (Args::SameMany(2), Bool),
        "<" | "<=" | ">" | ">=" => (Args::Many(Integer, 2), Bool),
        "+" => (Args::Many(Integer, 1), Integer),
        "-" => (Args::Many(Integer, 1), Integer),
        "*" => (Args::Many(Integer, 2), Integer),
        "str.++" => (Args::Many(Str, 1), Str),
        "str.len" => (Args::Fixed(&[Str]), Integer),
        "str.at" => (Args::Fixed(&[Str, Integer]), Str),
        "str.substr" => (Args::Fixed(&[Str, Integer, Integer]), Str),
        "str.indexof" => (Args::Fixed(&[Str, Str, Integer]), Integer),
        "str.contains" | "str.prefixof" | "str.suffixof" => (Args::Fixed(&[Str, Str]), Bool),
        "str.replace" => (Args::Fixed(&[Str, Str, Str]), Str),
        "str.to_int" => (Args::Fixed(&[Str]), Integer),
        "str.from_int" => (Args::Fixed(&[Integer]), Str),
        "str.in_re" => (Args::Fixed(&[Str, Re]), Bool),
        "str.to_re" => (Args::Fixed(&[Str]), Re),
        "re.none" | "re.all" | "re.allchar" => (Args::Fixed(&[]), Re),
        "re.++" | "re.union" | "re.inter" => (Args::Many(Re, 1), Re),
        "re.comp" | "re.*" | "re.+" | "re.opt" => (Args::Fixed(&[Re]), Re),
        "re.range" => (Args::Fixed(&[Str, Str]), Re),
        "re.loop" => (Args::Fixed(&[Re]), Re),
        _ => return None,
    };
    Some(sig)
}

/// Whether `op` belongs to the explicitly modelled operator set. `ite` is
/// handled separately because its result sort depends on its branches.
pub fn is_recognized(op: &str) -> bool {
    op == "ite" || signature(op).is_some()
}

/// Nullary operators written as bare symbols.
pub fn is_builtin_constant(op: &str) -> bool {
    matches!(op, "re.none" | "re.all" | "re.allchar")
}

/// Checks argument sorts and parameters of a recognized operator and returns
/// its result sort.
pub fn check_signature(op: &str, args: &[Sort], params: &[i64]) -> Result<Sort, SignatureError> {
    let expected_params: &[usize] = if op == "re.loop" { &[1, 2] } else { &[0] };
    if !expected_params.contains(&params.len()) {
        return Err(SignatureError::Params {
            op: op.to_string(),
            expected: if op == "re.loop" { "1 or 2" } else { "0" },
            got: params.len(),
        });
    }
    if op == "re.loop" && params.iter().any(|&p| p < 0) {
        return Err(SignatureError::Params {
            op: op.to_string(),
            expected: "non-negative",
            got: params.len(),
        });
    }
    if op == "ite" {
        return check_ite(args);
    }
    let (shape, result) = signature(op).ok_or_else(|| SignatureError::Unknown(op.to_string()))?;
    let mismatch = |index: usize, expected: Sort, got: Sort| SignatureError::Sort {
        op: op.to_string(),
        index: index + 1,
        expected,
        got,
    };
    match shape {
        Args::Fixed(sorts) => {
            if args.len() != sorts.len() {
                return Err(SignatureError::Arity {
                    op: op.to_string(),
                    expected: arity_text(sorts.len()),
                    got: args.len(),
                });
            }
            for (i, (&got, &want)) in args.iter().zip(sorts).enumerate() {
                if !got.fits(want) {
                    return Err(mismatch(i, want, got));
                }
            }
        }
        Args::Many(sort, min) => {
            if args.len() < min {
                return Err(SignatureError::Arity {
                    op: op.to_string(),
                    expected: if min == 1 { "at least 1" } else { "at least 2" },
                    got: args.len(),
                });
            }
            for (i, &got) in args.iter().enumerate() {
                if !got.fits(sort) {
                    return Err(mismatch(i, sort, got));
                }
            }
        }
        Args::SameMany(min) => {
            if args.len() < min {
                return Err(SignatureError::Arity {
                    op: op.to_string(),
                    expected: "at least 2",
                    got: args.len(),
                });
            }
            let common = args.iter().copied().find(|s| *s != Sort::Unknown);
            if let Some(common) = common {
                for (i, &got) in args.iter().enumerate() {
                    if !got.fits(common) {
                        return Err(mismatch(i, common, got));
                    }
                }
            }
        }
    }
    Ok(result)
}

fn check_ite(args: &[Sort]) -> Result<Sort, SignatureError> {
    if args.len() != 3 {
        return Err(SignatureError::Arity {
            op: "ite".into(),
            expected: "3",
            got: args.len(),
        });
    }
    if !args[0].fits(Bool) {
        return Err(SignatureError::Sort {
            op: "ite".into(),
            index: 1,
            expected: Bool,
            got: args[0],
        });
    }
    if !args[2].fits(args[1]) {
        return Err(SignatureError::Sort {
            op: "ite".into(),
            index: 3,
            expected: args[1],
            got: args[2],
        });
    }
    Ok(if args[1] == Sort::Unknown {
        args[2]
    } else {
        args[1]
    })
}

fn arity_text(n: usize) -> &'static str {
    match n {
        0 => "0",
        1 => "1",
        2 => "2",
        3 => "3",
        _ => "several",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concat_requires_strings() {
        assert_eq!(check_signature("str.++", &[Str, Str], &[]), Ok(Str));
        assert!(matches!(
            check_signature("str.++", &[Str, Integer], &[]),
            Err(SignatureError::Sort { index: 2, .. })
        ));
    }

    #[test]
    fn equality_needs_a_common_sort() {
        assert_eq!(check_signature("=", &[Integer, Integer], &[]), Ok(Bool));
        assert!(check_signature("=", &[Integer, Str], &[]).is_err());
        assert_eq!(check_signature("=", &[Sort::Unknown, Str], &[]), Ok(Bool));
    }

    #[test]
    fn loop_takes_parameters() {
        assert_eq!(check_signature("re.loop", &[Re], &[1, 3]), Ok(Re));
        assert!(check_signature("re.loop", &[Re], &[]).is_err());
        assert!(check_signature("re.*", &[Re], &[2]).is_err());
    }

    #[test]
    fn ite_sort_follows_branches() {
        assert_eq!(check_signature("ite", &[Bool, Str, Str], &[]), Ok(Str));
        assert!(check_signature("ite", &[Str, Str, Str], &[]).is_err());
        assert!(check_signature("ite", &[Bool, Str, Integer], &[]).is_err());
    }

    #[test]
    fn arity_violation() {
        assert!(matches!(
            check_signature("str.len", &[], &[]),
            Err(SignatureError::Arity { .. })
        ));
        assert!(matches!(
            check_signature("not", &[Bool, Bool], &[]),
            Err(SignatureError::Arity { .. })
        ));
    }
}
