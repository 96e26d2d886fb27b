// SPDX-License-Identifier: Apache-2.0

use std::collections::HashSet;

use super::{Element, Item, MosElement, Netlist, Node, Polarity, Pulse, SourceElement, Stimulus, TwoTerminal};
use crate::error::{Error, Result};
use crate::units::parse_value;

/// Parses a netlist. Reading stops at `.END` (any case) or end of input.
pub fn parse_netlist(text: &str) -> Result<Netlist> {
    let mut netlist = Netlist::default();
    let mut ids = HashSet::new();

    for (line_no, line) in logical_lines(text)? {
        let trimmed = line.trim();
        if trimmed.starts_with('*') {
            comment(&mut netlist, trimmed);
            continue;
        }
        if trimmed.starts_with('.') {
            if trimmed.eq_ignore_ascii_case(".end") {
                break;
            }
            return Err(Error::Syntax {
                line: line_no,
                msg: format!("unsupported control card '{trimmed}'"),
            });
        }
        let element = parse_card(trimmed).map_err(|msg| Error::Syntax { line: line_no, msg })?;
        if !ids.insert(element.id().to_ascii_lowercase()) {
            return Err(Error::Semantic(format!(
                "line {line_no}: duplicate element id '{}'",
                element.id()
            )));
        }
        check_values(&element).map_err(|msg| Error::Semantic(format!("line {line_no}: {msg}")))?;
        netlist.push(element);
    }
    Ok(netlist)
}

/// Joins `+` continuation lines and drops blank ones. Yields the line
/// number of the first physical line of each card.
fn logical_lines(text: &str) -> Result<Vec<(usize, String)>> {
    let mut out: Vec<(usize, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('+') {
            match out.last_mut() {
                Some((_, prev)) if !prev.starts_with('*') => {
                    prev.push(' ');
                    prev.push_str(rest.trim());
                }
                _ => {
                    return Err(Error::Syntax {
                        line: i + 1,
                        msg: "continuation line without a card".into(),
                    })
                }
            }
            continue;
        }
        out.push((i + 1, line.to_string()));
    }
    Ok(out)
}

fn comment(netlist: &mut Netlist, line: &str) {
    let body = line.trim_start_matches('*').trim();
    if netlist.items.is_empty() && netlist.title.is_empty() {
        if let Some(title) = strip_prefix_ci(body, "title:") {
            netlist.title = title.trim().to_string();
            return;
        }
    }
    if let Some((id, bbox)) = bbox_comment(body) {
        if let Some(Item::Element(Element::Mos(m))) = netlist.items.last_mut() {
            if m.bbox.is_none() && m.id.eq_ignore_ascii_case(id) {
                m.bbox = Some(bbox);
                return;
            }
        }
    }
    netlist.items.push(Item::Comment(line.trim_end().to_string()));
}

fn strip_prefix_ci<'a>(s: &'a str, prefix: &str) -> Option<&'a str> {
    if s.len() >= prefix.len() && s[..prefix.len()].eq_ignore_ascii_case(prefix) {
        Some(&s[prefix.len()..])
    } else {
        None
    }
}

/// `M5 DRAIN GATE SOURCE BULK (34 31 36 41.5)`
fn bbox_comment(body: &str) -> Option<(&str, [f64; 4])> {
    let open = body.find('(')?;
    let close = body.rfind(')')?;
    let head: Vec<&str> = body[..open].split_whitespace().collect();
    if head.len() != 5 || close != body.len() - 1 {
        return None;
    }
    let labels = ["drain", "gate", "source", "bulk"];
    if !head[1..].iter().zip(labels).all(|(h, l)| h.eq_ignore_ascii_case(l)) {
        return None;
    }
    let nums: Vec<f64> = body[open + 1..close]
        .split_whitespace()
        .map(|t| t.parse().ok())
        .collect::<Option<_>>()?;
    let bbox: [f64; 4] = nums.try_into().ok()?;
    Some((head[0], bbox))
}

fn node(token: &str) -> Node {
    if token == "?" {
        Node::Placeholder
    } else {
        Node::Named(token.to_string())
    }
}

fn number(token: &str) -> std::result::Result<f64, String> {
    parse_value(token).ok_or_else(|| format!("unparseable number '{token}'"))
}

fn parse_card(line: &str) -> std::result::Result<Element, String> {
    let kind = line.chars().next().unwrap_or(' ').to_ascii_uppercase();
    match kind {
        'M' => parse_mos(line).map(Element::Mos),
        'C' => parse_two_terminal(line, "C").map(Element::Capacitor),
        'R' => parse_two_terminal(line, "R").map(Element::Resistor),
        'V' => parse_source(line).map(Element::Vsource),
        'I' => parse_source(line).map(Element::Isource),
        _ => Err(format!("unknown element type in '{line}'")),
    }
}

fn parse_mos(line: &str) -> std::result::Result<MosElement, String> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.len() < 6 {
        return Err(format!(
            "MOSFET card needs id, 4 nodes and a model, found {} fields",
            tokens.len()
        ));
    }
    let polarity = match tokens[5].to_ascii_uppercase().as_str() {
        "NMOS" => Polarity::Nmos,
        "PMOS" => Polarity::Pmos,
        other => return Err(format!("unknown MOSFET model '{other}'")),
    };
    let mut m = MosElement {
        id: tokens[0].to_string(),
        drain: node(tokens[1]),
        gate: node(tokens[2]),
        source: node(tokens[3]),
        bulk: node(tokens[4]),
        polarity,
        l: f64::NAN,
        w: f64::NAN,
        ad: None,
        pd: None,
        as_: None,
        ps: None,
        bbox: None,
    };
    for tok in &tokens[6..] {
        let (key, value) = tok
            .split_once('=')
            .ok_or_else(|| format!("expected KEY=VALUE, found '{tok}'"))?;
        let value = number(value)?;
        match key.to_ascii_uppercase().as_str() {
            "L" => m.l = value,
            "W" => m.w = value,
            "AD" => m.ad = Some(value),
            "PD" => m.pd = Some(value),
            "AS" => m.as_ = Some(value),
            "PS" => m.ps = Some(value),
            other => return Err(format!("unknown MOSFET parameter '{other}'")),
        }
    }
    if m.l.is_nan() || m.w.is_nan() {
        return Err(format!("MOSFET '{}' needs both L= and W=", m.id));
    }
    Ok(m)
}

fn parse_two_terminal(line: &str, key: &str) -> std::result::Result<TwoTerminal, String> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.len() != 4 {
        return Err(format!("expected 4 fields (id, 2 nodes, value), found {}", tokens.len()));
    }
    let raw = tokens[3];
    let value = match raw.split_once('=') {
        Some((k, v)) if k.eq_ignore_ascii_case(key) => v,
        Some((k, _)) => return Err(format!("unexpected parameter '{k}'")),
        None => raw,
    };
    Ok(TwoTerminal {
        id: tokens[0].to_string(),
        a: node(tokens[1]),
        b: node(tokens[2]),
        value: number(value)?,
    })
}

fn parse_source(line: &str) -> std::result::Result<SourceElement, String> {
    let spaced: String = line
        .chars()
        .map(|c| if matches!(c, '(' | ')' | ',') { ' ' } else { c })
        .collect();
    let tokens: Vec<&str> = spaced.split_whitespace().collect();
    if tokens.len() < 4 {
        return Err(format!("source card needs id, 2 nodes and a value, found {} fields", tokens.len()));
    }
    let args = &tokens[4..];
    let values = |args: &[&str]| args.iter().map(|t| number(t)).collect::<std::result::Result<Vec<f64>, _>>();
    let stimulus = match tokens[3].to_ascii_uppercase().as_str() {
        "DC" => match values(args)?.as_slice() {
            [v] => Stimulus::Dc(*v),
            other => return Err(format!("DC takes one value, found {}", other.len())),
        },
        "PULSE" => match values(args)?.as_slice() {
            &[v1, v2, delay, rise, fall, width, period] => Stimulus::Pulse(Pulse {
                v1,
                v2,
                delay,
                rise,
                fall,
                width,
                period,
            }),
            other => return Err(format!("PULSE takes 7 values, found {}", other.len())),
        },
        "PWL" => {
            let v = values(args)?;
            if v.is_empty() || v.len() % 2 != 0 {
                return Err(format!("PWL takes time/value pairs, found {} numbers", v.len()));
            }
            Stimulus::Pwl(v.chunks(2).map(|c| (c[0], c[1])).collect())
        }
        _ => {
            if !args.is_empty() {
                return Err(format!("unexpected fields after source value: {}", args.join(" ")));
            }
            Stimulus::Dc(number(tokens[3])?)
        }
    };
    Ok(SourceElement {
        id: tokens[0].to_string(),
        pos: node(tokens[1]),
        neg: node(tokens[2]),
        stimulus,
    })
}

fn check_values(element: &Element) -> std::result::Result<(), String> {
    match element {
        Element::Mos(m) if m.l < 0.0 || m.w < 0.0 => Err(format!("'{}' has negative geometry", m.id)),
        Element::Capacitor(c) if c.value < 0.0 => Err(format!("'{}' has negative capacitance", c.id)),
        Element::Resistor(r) if r.value <= 0.0 => Err(format!("'{}' needs a positive resistance", r.id)),
        Element::Vsource(s) | Element::Isource(s) => match &s.stimulus {
            Stimulus::Pulse(p) if p.rise <= 0.0 || p.fall <= 0.0 => {
                Err(format!("'{}' PULSE rise and fall must be positive", s.id))
            }
            Stimulus::Pwl(points) if points.windows(2).any(|w| w[1].0 <= w[0].0) => {
                Err(format!("'{}' PWL times must be strictly increasing", s.id))
            }
            _ => Ok(()),
        },
        _ => Ok(()),
    }
}
