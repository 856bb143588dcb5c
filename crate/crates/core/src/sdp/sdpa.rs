//! SDPA sparse format (`.dat-s`).
//!
//! The problem `max C . X s.t. A_i . X = b_i` is written as the SDPA dual:
//! `F0 = C`, `Fi = A_i`, `c_i = b_i`. Indices are 1-based in the file.

use std::fmt::Write as _;

use super::{BlockKind, BlockSpec, Entry, SdpError, SdpProblem};

pub fn export_sdpa(p: &SdpProblem) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "* ltlbc SDP");
    let _ = writeln!(s, "{}", p.constraints.len());
    let _ = writeln!(s, "{}", p.blocks.len());
    let sizes: Vec<String> = p
        .blocks
        .iter()
        .map(|b| match b.kind {
            BlockKind::Dense => b.size.to_string(),
            BlockKind::Diagonal => format!("-{}", b.size),
        })
        .collect();
    let _ = writeln!(s, "{}", sizes.join(" "));
    let rhs: Vec<String> = p.rhs.iter().map(|v| format!("{v:.16e}")).collect();
    let _ = writeln!(s, "{}", rhs.join(" "));
    let mut write = |mat: usize, entries: &[Entry]| {
        for e in entries.iter().filter(|e| e.value != 0.0) {
            let _ = writeln!(
                s,
                "{} {} {} {} {:.16e}",
                mat,
                e.block + 1,
                e.row + 1,
                e.col + 1,
                e.value
            );
        }
    };
    write(0, &p.objective);
    for (i, c) in p.constraints.iter().enumerate() {
        write(i + 1, c);
    }
    s
}

pub fn import_sdpa(text: &str) -> Result<SdpProblem, SdpError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('*') && !l.starts_with('"'));
    let bad = |line: usize, m: &str| SdpError::Malformed {
        line,
        message: m.to_string(),
    };
    let clean = |l: &str| l.replace([',', '{', '}', '(', ')'], " ");
    let mut header_num = |what: &str| -> Result<(usize, String), SdpError> {
        let (ln, l) = lines.next().ok_or_else(|| bad(0, &format!("missing {what}")))?;
        Ok((ln, clean(l)))
    };

    let (ln, l) = header_num("constraint count")?;
    let m: usize = first_token(&l)
        .parse()
        .map_err(|_| bad(ln, "bad constraint count"))?;
    let (ln, l) = header_num("block count")?;
    let nb: usize = first_token(&l)
        .parse()
        .map_err(|_| bad(ln, "bad block count"))?;
    let (ln, l) = header_num("block sizes")?;
    let blocks: Vec<BlockSpec> = l
        .split_whitespace()
        .take(nb)
        .map(|t| {
            let v: i64 = t.parse().map_err(|_| bad(ln, "bad block size"))?;
            Ok(if v < 0 {
                BlockSpec::diagonal(v.unsigned_abs() as usize)
            } else {
                BlockSpec::dense(v as usize)
            })
        })
        .collect::<Result<_, SdpError>>()?;
    if blocks.len() != nb {
        return Err(bad(ln, "too few block sizes"));
    }
    let (ln, l) = header_num("right-hand side")?;
    let rhs: Vec<f64> = l
        .split_whitespace()
        .take(m)
        .map(|t| t.parse().map_err(|_| bad(ln, "bad right-hand side")))
        .collect::<Result<_, _>>()?;
    if rhs.len() != m {
        return Err(bad(ln, "too few right-hand sides"));
    }

    let mut p = SdpProblem::new(blocks);
    p.constraints = vec![Vec::new(); m];
    p.rhs = rhs;
    for (ln, l) in lines {
        let l = clean(l);
        let tok: Vec<&str> = l.split_whitespace().collect();
        if tok.len() < 5 {
            return Err(bad(ln, "expected 'matno blkno i j value'"));
        }
        let idx = |t: &str| -> Result<usize, SdpError> {
            t.parse::<usize>().map_err(|_| bad(ln, "bad index"))
        };
        let mat = idx(tok[0])?;
        let blk = idx(tok[1])?;
        let i = idx(tok[2])?;
        let j = idx(tok[3])?;
        let v: f64 = tok[4].parse().map_err(|_| bad(ln, "bad value"))?;
        if mat > m || blk == 0 || i == 0 || j == 0 {
            return Err(bad(ln, "index out of range"));
        }
        let e = Entry::new(blk - 1, i - 1, j - 1, v);
        if mat == 0 {
            p.objective.push(e);
        } else {
            p.constraints[mat - 1].push(e);
        }
    }
    p.validate()?;
    Ok(p)
}

fn first_token(l: &str) -> &str {
    l.split_whitespace().next().unwrap_or("")
}
