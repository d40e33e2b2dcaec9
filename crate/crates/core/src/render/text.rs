use std::fmt::Write;

/// Escapes everything outside printable ASCII as `\u{XXXX}`.
pub fn ascii_safe(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        if c == ' ' || c.is_ascii_graphic() {
            out.push(c);
        } else {
            let _ = write!(out, "\\u{{{:04x}}}", c as u32);
        }
    }
    out
}

/// Fixed-width ASCII table. Sections are separated by a rule line.
pub(crate) fn ascii_table(headers: &[String], sections: &[Vec<Vec<String>>]) -> String {
    let headers: Vec<String> = headers.iter().map(|h| ascii_safe(h)).collect();
    let sections: Vec<Vec<Vec<String>>> = sections
        .iter()
        .map(|rows| rows.iter().map(|r| r.iter().map(|c| ascii_safe(c)).collect()).collect())
        .collect();
    let mut widths: Vec<usize> = headers.iter().map(String::len).collect();
    for row in sections.iter().flatten() {
        for (width, cell) in widths.iter_mut().zip(row) {
            *width = (*width).max(cell.len());
        }
    }

    let rule = {
        let mut line = String::from("+");
        for width in &widths {
            line.push_str(&"-".repeat(width + 2));
            line.push('+');
        }
        line.push('\n');
        line
    };
    let row_line = |cells: &[String]| {
        let mut line = String::from("|");
        for (i, width) in widths.iter().enumerate() {
            let cell = cells.get(i).map(String::as_str).unwrap_or("");
            let _ = write!(line, " {cell:<width$} |");
        }
        line.push('\n');
        line
    };

    let mut out = rule.clone();
    out.push_str(&row_line(&headers));
    out.push_str(&rule);
    for rows in sections.iter().filter(|rows| !rows.is_empty()) {
        for row in rows {
            out.push_str(&row_line(row));
        }
        out.push_str(&rule);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escapes_non_ascii() {
        assert_eq!(ascii_safe("Caf\u{e9}\tok"), "Caf\\u{00e9}\\u{0009}ok");
        assert_eq!(ascii_safe("plain text-1"), "plain text-1");
    }

    #[test]
    fn table_layout() {
        let table = ascii_table(
            &["a".into(), "bb".into()],
            &[vec![vec!["x".into(), "y".into()]], vec![vec!["long".into(), "".into()]]],
        );
        assert_eq!(
            table,
            "+------+----+\n| a    | bb |\n+------+----+\n| x    | y  |\n+------+----+\n| long |    |\n+------+----+\n"
        );
    }

    #[test]
    fn header_only_table() {
        let table = ascii_table(&["item".into()], &[]);
        assert_eq!(table, "+------+\n| item |\n+------+\n");
    }
}
