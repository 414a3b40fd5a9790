//! Run-length encoded pattern files (`x = W, y = H, rule = ...` header,
//! `b`/`o`/`$` runs, `!` terminator).

use thiserror::Error;

use super::Pattern;
use crate::rule::{parse_rule, RuleError, RuleSpec};

const MAX_LINE: usize = 70;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RleError {
    #[error("missing or malformed header line: {0:?}")]
    Header(String),
    #[error("row {row} overflows the declared width {width}")]
    WidthOverflow { row: i64, width: i64 },
    #[error("pattern overflows the declared height {0}")]
    HeightOverflow(i64),
    #[error("unexpected character {0:?} in pattern body")]
    BadChar(char),
    #[error("missing '!' terminator")]
    MissingTerminator,
    #[error("bad rule in header: {0}")]
    Rule(#[from] RuleError),
}

/// Parses an RLE document. Returns the normalized pattern and the header rule
/// if one was given.
pub fn parse_rle(text: &str) -> Result<(Pattern, Option<RuleSpec>), RleError> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| RleError::Header(String::new()))?;
    let (width, height, rule) = parse_header(header)?;

    let mut cells = Vec::new();
    let (mut x, mut y) = (0i64, 0i64);
    let mut run: Option<i64> = None;
    let mut terminated = false;
    'body: for line in lines {
        for ch in line.chars() {
            match ch {
                '0'..='9' => {
                    let d = ch.to_digit(10).unwrap() as i64;
                    run = Some(run.unwrap_or(0).saturating_mul(10).saturating_add(d));
                }
                'b' => {
                    x += run.take().unwrap_or(1);
                    if x > width {
                        return Err(RleError::WidthOverflow { row: y, width });
                    }
                }
                'o' => {
                    let n = run.take().unwrap_or(1);
                    if x + n > width {
                        return Err(RleError::WidthOverflow { row: y, width });
                    }
                    if y >= height {
                        return Err(RleError::HeightOverflow(height));
                    }
                    cells.extend((x..x + n).map(|cx| (cx, y)));
                    x += n;
                }
                '$' => {
                    y += run.take().unwrap_or(1);
                    x = 0;
                }
                '!' => {
                    terminated = true;
                    break 'body;
                }
                c if c.is_whitespace() => {}
                c => return Err(RleError::BadChar(c)),
            }
        }
    }
    if !terminated {
        return Err(RleError::MissingTerminator);
    }
    Ok((Pattern::from_cells(cells), rule))
}

fn parse_header(line: &str) -> Result<(i64, i64, Option<RuleSpec>), RleError> {
    let bad = || RleError::Header(line.to_string());
    let mut width = None;
    let mut height = None;
    let mut rule = None;
    for field in line.split(',') {
        let (key, value) = field.split_once('=').ok_or_else(bad)?;
        let value = value.trim();
        match key.trim().to_ascii_lowercase().as_str() {
            "x" => width = Some(value.parse::<i64>().map_err(|_| bad())?),
            "y" => height = Some(value.parse::<i64>().map_err(|_| bad())?),
            "rule" => rule = Some(parse_rule(value)?),
            _ => return Err(bad()),
        }
    }
    match (width, height) {
        (Some(w), Some(h)) if w >= 0 && h >= 0 => Ok((w, h, rule)),
        _ => Err(bad()),
    }
}

/// Encodes a pattern; lines are at most 70 characters and runs are merged.
pub fn write_rle(pattern: &Pattern, rule: Option<&RuleSpec>) -> String {
    let mut out = format!("x = {}, y = {}", pattern.width(), pattern.height());
    if let Some(r) = rule {
        out.push_str(&format!(", rule = {r}"));
    }
    out.push('\n');

    // Tokens as (count, tag); dead runs at row ends are dropped and row breaks
    // are merged.
    let mut tokens: Vec<(i64, char)> = Vec::new();
    let push = |tokens: &mut Vec<(i64, char)>, n: i64, tag: char| {
        if n == 0 {
            return;
        }
        match tokens.last_mut() {
            Some((count, t)) if *t == tag => *count += n,
            _ => tokens.push((n, tag)),
        }
    };
    let mut pending_rows = 0;
    let cells = pattern.cells();
    let mut i = 0;
    for y in 0..pattern.height() {
        let mut x = 0;
        let mut row_has_cells = false;
        while i < cells.len() && cells[i].1 == y {
            if !row_has_cells {
                push(&mut tokens, pending_rows, '$');
                pending_rows = 0;
                row_has_cells = true;
            }
            let start = cells[i].0;
            let mut end = start;
            while i + 1 < cells.len() && cells[i + 1] == (end + 1, y) {
                end += 1;
                i += 1;
            }
            i += 1;
            push(&mut tokens, start - x, 'b');
            push(&mut tokens, end - start + 1, 'o');
            x = end + 1;
        }
        pending_rows += 1;
    }

    let mut line = String::new();
    for (n, tag) in tokens.into_iter().chain(std::iter::once((1, '!'))) {
        let tok = if n == 1 { tag.to_string() } else { format!("{n}{tag}") };
        if line.len() + tok.len() > MAX_LINE {
            out.push_str(&line);
            out.push('\n');
            line.clear();
        }
        line.push_str(&tok);
    }
    out.push_str(&line);
    out
}
