//! Text formats: the lattice file (exact rational Gram, round-trip safe),
//! shell dumps, and certificate documents.

use crate::design::CertifyReport;
use crate::error::{Error, Result};
use crate::gram::GramMatrix;
use crate::lattice::{Lattice, Provenance, Scale};
use crate::ratmat::{format_rat, parse_rat, RatMat};
use crate::shells::ShellList;
use std::fmt::Write as _;

/// Serialize a lattice: `name`, `dim`, `gram` rows of "p/q" entries, and an
/// optional exact rational `scale`. Symbolic det-power scales are evaluation
/// metadata, not file data, and are omitted.
pub fn write_lattice(l: &Lattice) -> String {
    let n = l.dim();
    let mut out = String::new();
    let _ = writeln!(out, "name {}", l.name);
    let _ = writeln!(out, "dim {}", n);
    let _ = writeln!(out, "gram");
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| format_rat(l.gram.entry(i, j))).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    if let Scale::Rational(r) = &l.scale {
        if !l.scale.is_one() {
            let _ = writeln!(out, "scale {}", format_rat(r));
        }
    }
    out
}

/// Parse the lattice file format. Exact: every rational survives bit-for-bit.
pub fn read_lattice(text: &str) -> Result<Lattice> {
    let mut name: Option<String> = None;
    let mut dim: Option<usize> = None;
    let mut gram_rows: Vec<Vec<crate::ratmat::Rat>> = Vec::new();
    let mut scale: Option<crate::ratmat::Rat> = None;
    let mut in_gram = false;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if in_gram && gram_rows.len() < dim.unwrap_or(0) {
            let row: Option<Vec<_>> = line.split_whitespace().map(parse_rat).collect();
            let row = row.ok_or_else(|| Error::Parse(format!("bad gram row: {line}")))?;
            if row.len() != dim.unwrap_or(0) {
                return Err(Error::Parse(format!(
                    "gram row has {} entries, expected {}",
                    row.len(),
                    dim.unwrap_or(0)
                )));
            }
            gram_rows.push(row);
            continue;
        }
        in_gram = false;
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match key {
            "name" => name = Some(rest.trim().to_string()),
            "dim" => {
                dim = Some(
                    rest.trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad dim: {rest}")))?,
                )
            }
            "gram" => {
                if dim.is_none() {
                    return Err(Error::Parse("dim must precede gram".into()));
                }
                in_gram = true;
            }
            "scale" => {
                scale =
                    Some(parse_rat(rest).ok_or_else(|| Error::Parse(format!("bad scale: {rest}")))?)
            }
            other => return Err(Error::Parse(format!("unknown field: {other}"))),
        }
    }
    let name = name.ok_or_else(|| Error::Parse("missing name".into()))?;
    let dim = dim.ok_or_else(|| Error::Parse("missing dim".into()))?;
    if gram_rows.len() != dim {
        return Err(Error::Parse(format!(
            "gram has {} rows, expected {dim}",
            gram_rows.len()
        )));
    }
    let gram = GramMatrix::new(RatMat::from_rows(gram_rows))?;
    let mut lattice = Lattice::new(name, gram, Provenance::File("inline".into()));
    if let Some(s) = scale {
        use num_traits::Signed;
        if !s.is_positive() {
            return Err(Error::Parse("scale must be positive".into()));
        }
        lattice.scale = Scale::Rational(s);
    }
    Ok(lattice)
}

/// Shell dump: records (k, m_k as rational string, a_k, optional canonical
/// vector list).
pub fn write_shell_dump(name: &str, shells: &ShellList, include_vectors: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "lattice {}", name);
    let _ = writeln!(out, "bound {}", format_rat(&shells.bound));
    for s in &shells.shells {
        let _ = writeln!(
            out,
            "shell {} norm {} count {}",
            s.index,
            format_rat(&s.norm),
            s.count
        );
        if include_vectors {
            match &s.vectors {
                Some(vs) => {
                    for v in vs {
                        let coords: Vec<String> = v.iter().map(|c| c.to_string()).collect();
                        let _ = writeln!(out, "v {}", coords.join(" "));
                    }
                }
                None => {
                    let _ = writeln!(out, "# vectors not materialized (shell too large)");
                }
            }
        }
    }
    out
}

/// Certificate document, human table form.
pub fn write_certificates_table(report: &CertifyReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "design certificates: {} (depth {}, t <= {})",
        report.lattice, report.depth, report.t_max
    );
    let _ = writeln!(out, "{:>3} {:>10} {:>12} {:>3} {:>6} defect", "k", "norm", "count", "t", "pass");
    for c in &report.certificates {
        for o in &c.outcomes {
            let _ = writeln!(
                out,
                "{:>3} {:>10} {:>12} {:>3} {:>6} {}",
                c.shell_index,
                format_rat(&c.norm),
                c.count,
                o.t,
                o.pass,
                format_rat(&o.defect)
            );
        }
    }
    let _ = writeln!(
        out,
        "all shells 2-design to depth: {}; all 4-design: {}",
        report.all_2_design, report.all_4_design
    );
    out
}

/// Certificate document, JSON-like structured form.
pub fn write_certificates_json(report: &CertifyReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{{");
    let _ = writeln!(out, "  \"lattice\": \"{}\",", report.lattice);
    let _ = writeln!(out, "  \"depth\": {},", report.depth);
    let _ = writeln!(out, "  \"t_max\": {},", report.t_max);
    let _ = writeln!(out, "  \"all_2_design\": {},", report.all_2_design);
    let _ = writeln!(out, "  \"all_4_design\": {},", report.all_4_design);
    let _ = writeln!(out, "  \"shells\": [");
    for (i, c) in report.certificates.iter().enumerate() {
        let _ = writeln!(out, "    {{");
        let _ = writeln!(out, "      \"k\": {},", c.shell_index);
        let _ = writeln!(out, "      \"norm\": \"{}\",", format_rat(&c.norm));
        let _ = writeln!(out, "      \"count\": {},", c.count);
        let _ = writeln!(out, "      \"strength\": {},", c.strength);
        let _ = writeln!(out, "      \"tests\": [");
        for (j, o) in c.outcomes.iter().enumerate() {
            let _ = writeln!(
                out,
                "        {{\"t\": {}, \"pass\": {}, \"defect\": \"{}\"}}{}",
                o.t,
                o.pass,
                format_rat(&o.defect),
                if j + 1 < c.outcomes.len() { "," } else { "" }
            );
        }
        let _ = writeln!(out, "      ]");
        let _ = writeln!(
            out,
            "    }}{}",
            if i + 1 < report.certificates.len() { "," } else { "" }
        );
    }
    let _ = writeln!(out, "  ]");
    let _ = writeln!(out, "}}");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog_lattice;
    use crate::ratmat::Rat;

    #[test]
    fn lattice_roundtrip_exact() {
        let mut l = catalog_lattice("A2", None).unwrap();
        l.scale = Scale::Rational(Rat::new(7.into(), 3.into()));
        let text = write_lattice(&l);
        let back = read_lattice(&text).unwrap();
        assert_eq!(back.name, l.name);
        assert_eq!(back.gram, l.gram);
        assert_eq!(back.scale, l.scale);
        // Canonical writer is a fixed point.
        assert_eq!(write_lattice(&back), text);
    }

    #[test]
    fn rational_entries_roundtrip() {
        let text = "name dualA2\ndim 2\ngram\n2/3 -1/3\n-1/3 2/3\n";
        let l = read_lattice(text).unwrap();
        assert_eq!(*l.gram.entry(0, 1), Rat::new((-1).into(), 3.into()));
        assert_eq!(write_lattice(&l), text);
    }

    #[test]
    fn rejects_malformed() {
        assert!(read_lattice("dim 2\ngram\n1 0\n0 1\n").is_err()); // no name
        assert!(read_lattice("name x\ndim 2\ngram\n1 0\n").is_err()); // short
        assert!(read_lattice("name x\ndim 2\ngram\n1 0\n0 x\n").is_err());
        assert!(read_lattice("name x\ndim 2\ngram\n1 2\n2 1\n").is_err()); // not pos def
    }

    #[test]
    fn shell_dump_contains_records() {
        let l = catalog_lattice("A2", None).unwrap();
        let shells =
            crate::shells::first_k_shells(&l, 2, crate::shells::EnumConfig::default()).unwrap();
        let dump = write_shell_dump(&l.name, &shells, true);
        assert!(dump.contains("shell 1 norm 2 count 6"));
        assert!(dump.contains("shell 2 norm 6 count 6"));
        assert!(dump.matches("\nv ").count() == 6, "{dump}");
    }
}
