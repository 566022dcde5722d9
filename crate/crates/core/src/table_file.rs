//! Plain-text Cayley tables: a line with the order `m`, then `m` rows of
//! `m` whitespace-separated entries. Blank lines and lines starting with
//! `#` are ignored. Element 0 must be the identity.

use crate::group::{ElemId, FiniteGroup, GroupError, MAX_TABLE_ORDER};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TableFileError {
    #[error("empty table file")]
    Empty,
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("expected {expected} rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
}

fn syntax(line: usize, reason: impl Into<String>) -> TableFileError {
    TableFileError::Syntax {
        line,
        reason: reason.into(),
    }
}

pub fn parse_cayley_table(name: &str, text: &str) -> Result<FiniteGroup, TableFileError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (first, header) = lines.next().ok_or(TableFileError::Empty)?;
    let order: usize = header
        .parse()
        .map_err(|_| syntax(first, format!("expected the group order, found {header:?}")))?;
    if order == 0 {
        return Err(syntax(first, "order must be positive"));
    }
    if order > MAX_TABLE_ORDER {
        return Err(GroupError::TableTooLarge {
            order: order as u64,
            cap: MAX_TABLE_ORDER,
        }
        .into());
    }
    let mut table = Vec::with_capacity(order * order);
    let mut rows = 0;
    for (line, row) in lines {
        if rows == order {
            return Err(syntax(
                line,
                format!("unexpected extra row (order is {order})"),
            ));
        }
        let start = table.len();
        for tok in row.split_whitespace() {
            let v: ElemId = tok
                .parse()
                .map_err(|_| syntax(line, format!("not an element index: {tok:?}")))?;
            if v as usize >= order {
                return Err(syntax(line, format!("entry {v} out of range 0..{order}")));
            }
            table.push(v);
        }
        let width = table.len() - start;
        if width != order {
            return Err(syntax(
                line,
                format!("row has {width} entries, expected {order}"),
            ));
        }
        rows += 1;
    }
    if rows != order {
        return Err(TableFileError::RowCount {
            expected: order,
            found: rows,
        });
    }
    Ok(FiniteGroup::from_table(name, order, table)?)
}

/// Canonical text form; power groups are expanded when small enough.
pub fn emit_cayley_table(group: &FiniteGroup) -> Result<String, GroupError> {
    let m = group.len();
    if m > MAX_TABLE_ORDER {
        return Err(GroupError::TableTooLarge {
            order: m as u64,
            cap: MAX_TABLE_ORDER,
        });
    }
    let mut out = format!("{m}\n");
    for a in group.elements() {
        let row: Vec<String> = group
            .elements()
            .map(|b| group.mul(a, b).to_string())
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn klein_four() {
        let text = "# V4\n4\n0 1 2 3\n1 0 3 2\n\n2 3 0 1\n3 2 1 0\n";
        let g = parse_cayley_table("V4", text).unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(
            emit_cayley_table(&g).unwrap(),
            "4\n0 1 2 3\n1 0 3 2\n2 3 0 1\n3 2 1 0\n"
        );
    }

    #[test]
    fn errors_carry_lines() {
        let e = parse_cayley_table("x", "2\n0 1\n1 x\n").unwrap_err();
        assert!(matches!(e, TableFileError::Syntax { line: 3, .. }), "{e}");
        let e = parse_cayley_table("x", "2\n0 1\n1\n").unwrap_err();
        assert!(matches!(e, TableFileError::Syntax { line: 3, .. }));
        assert!(matches!(
            parse_cayley_table("x", "2\n0 1\n"),
            Err(TableFileError::RowCount {
                expected: 2,
                found: 1
            })
        ));
        assert!(matches!(
            parse_cayley_table("x", "2\n0 1\n1 1\n"),
            Err(TableFileError::Group(_))
        ));
        assert!(matches!(
            parse_cayley_table("x", "# nothing\n"),
            Err(TableFileError::Empty)
        ));
    }
}
