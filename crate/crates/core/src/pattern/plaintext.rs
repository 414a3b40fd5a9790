//! Plaintext `.cells` files: `!` comment lines, `.` dead, `O` live.

use super::{Pattern, RleError};

pub fn parse_cells(text: &str) -> Result<Pattern, RleError> {
    let mut cells = Vec::new();
    let rows = text.lines().filter(|l| !l.starts_with('!'));
    for (y, row) in rows.enumerate() {
        for (x, ch) in row.trim_end().chars().enumerate() {
            match ch {
                'O' | 'o' | '*' => cells.push((x as i64, y as i64)),
                '.' => {}
                c => return Err(RleError::BadChar(c)),
            }
        }
    }
    Ok(Pattern::from_cells(cells))
}
