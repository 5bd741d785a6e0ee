// SPDX-License-Identifier: Apache-2.0

use std::io::{self, BufRead, Write};

use super::{parse_query, Engine, QlangError};

/// Parses and evaluates one query, writing results to `out` and warnings to
/// `err`. The one-shot flag and the REPL both go through here.
pub fn run_query<W: Write, E: Write>(
    engine: &Engine,
    text: &str,
    out: &mut W,
    err: &mut E,
) -> Result<(), QlangError> {
    let q = parse_query(text)?;
    let ev = engine.evaluate(&q)?;
    for w in &ev.warnings {
        writeln!(err, "warning: {w}").map_err(QlangError::Output)?;
    }
    out.write_all(ev.stdout.as_bytes())
        .map_err(QlangError::Output)?;
    out.flush().map_err(QlangError::Output)
}

/// Writes `e` to `err`; syntax errors get a caret under the column.
pub fn report_error<E: Write>(err: &mut E, text: &str, e: &QlangError) -> io::Result<()> {
    writeln!(err, "error: {e}")?;
    if let Some(col) = e.column() {
        writeln!(err, "  {text}")?;
        writeln!(err, "  {}^", " ".repeat(col.saturating_sub(1)))?;
    }
    Ok(())
}

/// Reads one query per line until end of input or `exit`. Errors are
/// reported and the loop continues. The prompt goes to `err` so that `out`
/// carries results only.
pub fn repl<R: BufRead, W: Write, E: Write>(
    engine: &Engine,
    input: R,
    out: &mut W,
    err: &mut E,
    prompt: bool,
) -> io::Result<()> {
    let mut lines = input.lines();
    loop {
        if prompt {
            write!(err, "qlang> ")?;
            err.flush()?;
        }
        let Some(line) = lines.next() else {
            break;
        };
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if text.eq_ignore_ascii_case("exit") || text.eq_ignore_ascii_case("quit") {
            break;
        }
        if let Err(e) = run_query(engine, text, out, err) {
            if let QlangError::Output(io) = &e {
                if io.kind() == io::ErrorKind::BrokenPipe {
                    return Ok(());
                }
            }
            report_error(err, text, &e)?;
        }
    }
    Ok(())
}
