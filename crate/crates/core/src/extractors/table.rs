// SPDX-License-Identifier: Apache-2.0

//! Plain-text tables: a header row, a dashed rule, two spaces between
//! columns. Text columns are left-aligned; columns where every cell is a
//! number are aligned on the decimal point and right-aligned as a block.

fn is_number(s: &str) -> bool {
    !s.is_empty() && s.parse::<f64>().is_ok()
}

fn split_decimal(s: &str) -> (&str, &str) {
    match s.find('.') {
        Some(i) => s.split_at(i),
        None => (s, ""),
    }
}

struct Column {
    numeric: bool,
    width: usize,
    int_width: usize,
    frac_width: usize,
}

fn layout(header: &str, cells: &[&str]) -> Column {
    let numeric = !cells.is_empty() && cells.iter().all(|c| is_number(c));
    let (mut int_width, mut frac_width, mut data) = (0, 0, 0);
    for c in cells {
        if numeric {
            let (i, f) = split_decimal(c);
            int_width = int_width.max(i.len());
            frac_width = frac_width.max(f.len());
        } else {
            data = data.max(c.chars().count());
        }
    }
    if numeric {
        data = int_width + frac_width;
    }
    let min = if header.is_empty() {
        0
    } else {
        header.chars().count() + 2
    };
    Column {
        numeric,
        width: data.max(min),
        int_width,
        frac_width,
    }
}

fn pad_right(s: &str, width: usize) -> String {
    format!("{s:<width$}")
}

fn pad_left(s: &str, width: usize) -> String {
    format!("{s:>width$}")
}

/// Renders `rows` under `headers`. Every row must have `headers.len()` cells.
pub fn render(headers: &[String], rows: &[Vec<String>]) -> String {
    let columns: Vec<Column> = headers
        .iter()
        .enumerate()
        .map(|(i, h)| {
            let cells: Vec<&str> = rows.iter().map(|r| r[i].as_str()).collect();
            layout(h, &cells)
        })
        .collect();
    let mut lines = Vec::with_capacity(rows.len() + 2);
    let header: Vec<String> = headers
        .iter()
        .zip(&columns)
        .map(|(h, c)| {
            if c.numeric {
                pad_left(h, c.width)
            } else {
                pad_right(h, c.width)
            }
        })
        .collect();
    lines.push(header.join("  "));
    lines.push(
        columns
            .iter()
            .map(|c| "-".repeat(c.width))
            .collect::<Vec<_>>()
            .join("  "),
    );
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .zip(&columns)
            .map(|(v, c)| {
                if c.numeric {
                    let (i, f) = split_decimal(v);
                    let aligned =
                        format!("{}{}", pad_left(i, c.int_width), pad_right(f, c.frac_width));
                    pad_left(&aligned, c.width)
                } else {
                    pad_right(v, c.width)
                }
            })
            .collect();
        lines.push(cells.join("  "));
    }
    let mut out = String::new();
    for l in lines {
        out.push_str(l.trim_end());
        out.push('\n');
    }
    out
}
