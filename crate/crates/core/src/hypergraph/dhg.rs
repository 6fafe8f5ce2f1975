//! Line-oriented DHG text format.
//!
//! ```text
//! # comment
//! dhg <n> <m>
//! v <name> <omega>          (n lines)
//! e <weight> T <name>... H <name>...   (m lines)
//! ```
//!
//! Weights are decimal rationals, either `p/q` or a plain decimal such as
//! `2.5`. The canonical form lists vertices sorted by name and edges in input
//! order with tail and head names sorted.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{DirectedHypergraph, Hyperedge, Rational};
use crate::error::HypergraphError;

fn err(line: usize, message: impl Into<String>) -> HypergraphError {
    HypergraphError::Parse {
        line,
        message: message.into(),
    }
}

/// Parses `p/q`, an integer, or a plain decimal.
pub fn parse_rational(token: &str) -> Option<Rational> {
    if let Some((p, q)) = token.split_once('/') {
        let p: BigInt = p.parse().ok()?;
        let q: BigInt = q.parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    let (negative, body) = match token.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, token.strip_prefix('+').unwrap_or(token)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().ok()?
    };
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let value = Rational::new(numer, denom);
    Some(if negative { -value } else { value })
}

pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn parse_dhg(text: &str) -> Result<DirectedHypergraph, HypergraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, raw)| (k + 1, raw.split('#').next().unwrap_or("")))
        .filter(|(_, body)| !body.trim().is_empty());

    let (header_line, header) = lines
        .next()
        .ok_or_else(|| err(1, "missing `dhg <n> <m>` header"))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    let (n, m) = match tokens.as_slice() {
        ["dhg", n, m] => (
            n.parse::<usize>()
                .map_err(|_| err(header_line, "bad vertex count"))?,
            m.parse::<usize>()
                .map_err(|_| err(header_line, "bad edge count"))?,
        ),
        _ => return Err(err(header_line, "expected `dhg <n> <m>`")),
    };
    if n == 0 {
        return Err(err(header_line, "a hypergraph needs at least one vertex"));
    }

    let mut names = Vec::with_capacity(n);
    let mut omega = Vec::with_capacity(n);
    let mut index: HashMap<String, usize> = HashMap::new();
    for _ in 0..n {
        let (line, body) = lines.next().ok_or_else(|| {
            err(
                text.lines().count().max(1),
                format!("expected {n} vertex lines"),
            )
        })?;
        let tokens: Vec<&str> = body.split_whitespace().collect();
        let (name, weight) = match tokens.as_slice() {
            ["v", name, weight] => (*name, *weight),
            _ => return Err(err(line, "expected `v <name> <omega>`")),
        };
        if name == "T" || name == "H" {
            return Err(err(
                line,
                "`T` and `H` are reserved and cannot name a vertex",
            ));
        }
        let weight: u64 = weight.parse().map_err(|_| {
            err(
                line,
                format!("vertex weight {weight:?} is not a non-negative integer"),
            )
        })?;
        if weight < 1 {
            return Err(err(
                line,
                format!("vertex {name:?} has weight 0, weights must be at least 1"),
            ));
        }
        if weight > n as u64 {
            return Err(err(
                line,
                format!("vertex weight {weight} exceeds n = {n} (κ ≤ n)"),
            ));
        }
        if index.insert(name.to_string(), names.len()).is_some() {
            return Err(err(line, format!("duplicate vertex name {name:?}")));
        }
        names.push(name.to_string());
        omega.push(weight);
    }

    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (line, body) = lines.next().ok_or_else(|| {
            err(
                text.lines().count().max(1),
                format!("expected {m} edge lines"),
            )
        })?;
        let tokens: Vec<&str> = body.split_whitespace().collect();
        if tokens.len() < 3 || tokens[0] != "e" || tokens[2] != "T" {
            return Err(err(line, "expected `e <weight> T <name>... H <name>...`"));
        }
        let weight = parse_rational(tokens[1])
            .ok_or_else(|| err(line, format!("bad weight {:?}", tokens[1])))?;
        if weight.is_negative() {
            return Err(err(line, "edge weights must be non-negative"));
        }
        let rest = &tokens[3..];
        let split = rest
            .iter()
            .position(|&t| t == "H")
            .ok_or_else(|| err(line, "missing `H` marker"))?;
        let lookup = |name: &&str| {
            index
                .get(*name)
                .copied()
                .ok_or_else(|| err(line, format!("unknown vertex {name:?}")))
        };
        let tail = rest[..split]
            .iter()
            .map(lookup)
            .collect::<Result<Vec<_>, _>>()?;
        let head = rest[split + 1..]
            .iter()
            .map(lookup)
            .collect::<Result<Vec<_>, _>>()?;
        if tail.is_empty() {
            return Err(err(line, "edge has an empty tail"));
        }
        if head.is_empty() {
            return Err(err(line, "edge has an empty head"));
        }
        edges.push(Hyperedge::new(tail, head, weight));
    }

    if let Some((line, _)) = lines.next() {
        return Err(err(line, "unexpected content after the declared edges"));
    }
    DirectedHypergraph::new(names, omega, edges)
}

/// Canonical serialization.
pub fn to_dhg(graph: &DirectedHypergraph) -> String {
    let names = graph.names();
    let mut order: Vec<usize> = (0..graph.n()).collect();
    order.sort_by(|&a, &b| names[a].cmp(&names[b]));

    let mut out = format!("dhg {} {}\n", graph.n(), graph.m());
    for &i in &order {
        out.push_str(&format!("v {} {}\n", names[i], graph.omega()[i]));
    }
    let sorted_names = |ids: &[usize]| {
        let mut v: Vec<&str> = ids.iter().map(|&i| names[i].as_str()).collect();
        v.sort_unstable();
        v.join(" ")
    };
    for e in graph.edges() {
        out.push_str(&format!(
            "e {} T {} H {}\n",
            format_rational(e.weight()),
            sorted_names(e.tail()),
            sorted_names(e.head())
        ));
    }
    out
}
