//! Line-oriented text formats for instances, inequalities and points.
//!
//! ```text
//! ckp 1                        ineq 1                point 1
//! b 21                         rhs 22                val 4 2 1
//! group 2 a 10 6 c 10 6        term 1 1 2            val 3 1 1/7
//! ```
//!
//! `#` starts a comment and blank lines are ignored. Rationals use the
//! `p` / `p/q` form and are always written in lowest terms.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{Group, Instance, LinearInequality, Point, VarRef};
use crate::numeric::parse_rational;
use crate::Rational;

/// Non-empty lines with comments stripped, paired with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(k, line)| {
        let line = line.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = line.split_whitespace().collect();
        (!tokens.is_empty()).then_some((k + 1, tokens))
    })
}

fn rational(line: usize, token: &str) -> Result<Rational> {
    parse_rational(token).map_err(|m| Error::parse(line, m))
}

fn index(line: usize, token: &str) -> Result<usize> {
    match token.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(Error::parse(
            line,
            format!("expected a positive index, found `{token}`"),
        )),
    }
}

fn expect_header<'a>(lines: &mut impl Iterator<Item = (usize, Vec<&'a str>)>, keyword: &str) -> Result<()> {
    match lines.next() {
        Some((_, t)) if t == [keyword, "1"] => Ok(()),
        Some((line, t)) => Err(Error::parse(
            line,
            format!("expected header `{keyword} 1`, found `{}`", t.join(" ")),
        )),
        None => Err(Error::parse(0, format!("empty input, expected `{keyword} 1`"))),
    }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, "ckp")?;
    let capacity = match lines.next() {
        Some((line, t)) if t.len() == 2 && t[0] == "b" => rational(line, t[1])?,
        Some((line, _)) => return Err(Error::parse(line, "expected `b <rational>`")),
        None => return Err(Error::parse(0, "missing capacity line")),
    };
    let mut groups = Vec::new();
    for (line, t) in lines {
        if t[0] != "group" {
            return Err(Error::parse(line, format!("unexpected keyword `{}`", t[0])));
        }
        let n = t
            .get(1)
            .ok_or_else(|| Error::parse(line, "missing group size"))
            .and_then(|tok| index(line, tok))?;
        if t.len() != 4 + 2 * n || t[2] != "a" || t[3 + n] != "c" {
            return Err(Error::parse(
                line,
                format!("expected `group {n} a <{n} rationals> c <{n} rationals>`"),
            ));
        }
        let weights = t[3..3 + n].iter().map(|s| rational(line, s)).collect::<Result<_>>()?;
        let profits = t[4 + n..].iter().map(|s| rational(line, s)).collect::<Result<_>>()?;
        groups.push(Group::new(weights, profits)?);
    }
    Instance::new(groups, capacity)
}

pub fn write_instance(instance: &Instance) -> String {
    let mut out = format!("ckp 1\nb {}\n", instance.capacity());
    for g in instance.groups() {
        write!(out, "group {} a", g.len()).unwrap();
        for a in g.weights() {
            write!(out, " {a}").unwrap();
        }
        out.push_str(" c");
        for c in g.profits() {
            write!(out, " {c}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn parse_inequality(text: &str) -> Result<LinearInequality> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, "ineq")?;
    let rhs = match lines.next() {
        Some((line, t)) if t.len() == 2 && t[0] == "rhs" => rational(line, t[1])?,
        Some((line, _)) => return Err(Error::parse(line, "expected `rhs <rational>`")),
        None => return Err(Error::parse(0, "missing rhs line")),
    };
    let mut ineq = LinearInequality::new(rhs);
    for (line, t) in lines {
        if t.len() != 4 || t[0] != "term" {
            return Err(Error::parse(line, "expected `term <i> <j> <rational>`"));
        }
        let v = VarRef::new(index(line, t[1])?, index(line, t[2])?);
        ineq.add_term(v, rational(line, t[3])?);
    }
    Ok(ineq)
}

pub fn write_inequality(ineq: &LinearInequality) -> String {
    let mut out = format!("ineq 1\nrhs {}\n", ineq.rhs());
    for (v, c) in ineq.terms() {
        writeln!(out, "term {} {} {c}", v.group, v.slot).unwrap();
    }
    out
}

pub fn parse_point(text: &str) -> Result<Point> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, "point")?;
    let mut point = Point::zero();
    let mut seen = std::collections::BTreeSet::new();
    for (line, t) in lines {
        if t.len() != 4 || t[0] != "val" {
            return Err(Error::parse(line, "expected `val <i> <j> <rational>`"));
        }
        let v = VarRef::new(index(line, t[1])?, index(line, t[2])?);
        if !seen.insert(v) {
            return Err(Error::parse(line, format!("duplicate entry for {v}")));
        }
        point
            .set(v, rational(line, t[3])?)
            .map_err(|e| Error::parse(line, e.to_string()))?;
    }
    Ok(point)
}

pub fn write_point(point: &Point) -> String {
    let mut out = String::from("point 1\n");
    out.push_str(&point_entries(point));
    out
}

/// The `val i j x` lines of a point, without header.
pub fn point_entries(point: &Point) -> String {
    let mut out = String::new();
    for (v, x) in point.iter() {
        writeln!(out, "val {} {} {x}", v.group, v.slot).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, ratio};
    use proptest::prelude::*;

    const EX43: &str = "# example\nckp 1\nb 21\n\ngroup 1 a 2 c 2\ngroup 1 a 4 c 4\ngroup 1 a 8 c 8\ngroup 2 a 10 6 c 10 6  # heavy\ngroup 2 a 8 4 c 8 4\n";

    #[test]
    fn parses_instance_with_comments() {
        let inst = parse_instance(EX43).unwrap();
        assert_eq!(inst.num_groups(), 5);
        assert_eq!(inst.dimension(), 7);
        assert_eq!(*inst.weight(VarRef::new(4, 2)), int(6));
        assert_eq!(parse_instance(&write_instance(&inst)).unwrap(), inst);
    }

    #[test]
    fn canonical_output() {
        let text = "ckp 1\nb 42/2\ngroup 2 a 20/2 6 c -0 12/8\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(write_instance(&inst), "ckp 1\nb 21\ngroup 2 a 10 6 c 0 3/2\n");
    }

    #[test]
    fn instance_errors() {
        assert!(matches!(
            parse_instance("ckp 2\nb 1\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_instance("ckp 1\nb x\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_instance("ckp 1\nb 1\ngroup 2 a 1 c 1\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_instance("ckp 1\nb 1\ngroup 1 a -1 c 1\n"),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            parse_instance("ckp 1\nb 0\ngroup 1 a 1 c 1\n"),
            Err(Error::Validation(_))
        ));
        assert!(parse_instance("").is_err());
    }

    #[test]
    fn inequality_and_point() {
        let ineq = parse_inequality("ineq 1\nrhs 22\nterm 1 1 2\nterm 4 2 7\nterm 4 2 0\n").unwrap();
        assert_eq!(ineq.coeff(VarRef::new(4, 2)), int(7));
        assert_eq!(write_inequality(&ineq), "ineq 1\nrhs 22\nterm 1 1 2\nterm 4 2 7\n");

        let p = parse_point("point 1\nval 3 1 2/14\nval 1 1 1\n").unwrap();
        assert_eq!(p.get(VarRef::new(3, 1)), ratio(1, 7));
        assert_eq!(write_point(&p), "point 1\nval 1 1 1\nval 3 1 1/7\n");
        assert!(parse_point("point 1\nval 1 1 2\n").is_err());
        assert!(parse_point("point 1\nval 0 1 1\n").is_err());
        assert!(parse_point("point 1\nval 1 1 1\nval 1 1 0\n").is_err());
        assert!(parse_inequality("ineq 1\nterm 1 1 1\n").is_err());
    }

    fn rat() -> impl Strategy<Value = Rational> {
        (-30i64..=30, 1i64..=9).prop_map(|(n, d)| ratio(n, d))
    }

    proptest! {
        #[test]
        fn round_trips(
            groups in prop::collection::vec(prop::collection::vec((0i64..=40, 1i64..=7, 0i64..=40), 1..=4), 1..=5),
            b in 1i64..=50,
            terms in prop::collection::vec((1usize..=6, 1usize..=4, rat()), 0..10),
            rhs in rat(),
            vals in prop::collection::vec((1usize..=6, 1usize..=4, 0i64..=8), 0..10),
        ) {
            let groups = groups.into_iter().map(|g| {
                let w = g.iter().map(|(a, d, _)| ratio(*a, *d)).collect();
                let c = g.iter().map(|(_, d, c)| ratio(*c, *d)).collect();
                Group::new(w, c).unwrap()
            }).collect();
            let inst = Instance::new(groups, int(b)).unwrap();
            prop_assert_eq!(parse_instance(&write_instance(&inst)).unwrap(), inst);

            let ineq = LinearInequality::from_terms(terms.into_iter().map(|(i, j, c)| (VarRef::new(i, j), c)), rhs);
            prop_assert_eq!(parse_inequality(&write_inequality(&ineq)).unwrap(), ineq);

            let mut p = Point::zero();
            for (i, j, x) in vals { p.set(VarRef::new(i, j), ratio(x, 8)).unwrap(); }
            prop_assert_eq!(parse_point(&write_point(&p)).unwrap(), p);
        }
    }
}
