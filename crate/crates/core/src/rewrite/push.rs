use super::{apply, MatchSite, RewriteError, RewriteTrace, Rule, RuleId};
use crate::diagram::{Colour, Diagram, VertexKind, V};

fn site(rule: Rule, colour: Colour, anchors: Vec<V>) -> MatchSite {
    MatchSite {
        rule: RuleId::new(rule, colour == Colour::X),
        anchors,
        edges: Vec::new(),
    }
}

fn step(d: &mut Diagram, trace: &mut RewriteTrace, s: MatchSite) -> Result<(), RewriteError> {
    *d = apply(d, &s)?;
    trace.record(s, d);
    Ok(())
}

/// Colour and validity of a conditional degree-2 π spider.
fn conditional_pi(d: &Diagram, v: V) -> Option<Colour> {
    let k = d.kind(v)?;
    let data = k.spider_data()?;
    (data.phase.is_pi() && data.is_conditional() && d.degree(v) == 2 && d.self_loops(v) == 0)
        .then(|| k.colour().expect("spider"))
}

/// Moves a conditional π error one spider further along the diagram.
///
/// An error next to a same-colour π vertex with the same condition set
/// cancels with it. Otherwise the error crosses an adjacent H (changing
/// colour) and then an adjacent opposite-colour spider, leaving a copy on
/// every other leg of that spider; copies that sit next to an H cross it
/// too, so they arrive at the far spider in the other colour. A blocked
/// error returns the diagram unchanged with an empty trace.
pub fn push_error(d: &Diagram, error: V) -> Result<(Diagram, RewriteTrace), RewriteError> {
    let colour = conditional_pi(d, error).ok_or(RewriteError::NotConditionalPi(error))?;
    let cond = d.kind(error).and_then(VertexKind::spider_data).expect("spider").cond.clone();
    let mut d = d.clone();
    let mut trace = RewriteTrace::new();

    let partner = d.neighbour_counts(error).map(|(w, _)| w).find(|w| {
        d.kind(*w).and_then(VertexKind::spider_data).is_some_and(|s| s.phase.is_pi() && s.cond == cond)
            && d.kind(*w).and_then(VertexKind::colour) == Some(colour)
    });
    if let Some(w) = partner {
        let kept = error.min(w);
        step(&mut d, &mut trace, site(Rule::Spider, colour, vec![kept, error.max(w)]))?;
        if d.degree(kept) == 2 && d.self_loops(kept) == 0 {
            step(&mut d, &mut trace, site(Rule::Identity, colour, vec![kept]))?;
        }
        return Ok((d, trace));
    }

    let mut colour = colour;
    if d.neighbour_counts(error).any(|(w, _)| d.kind(w).is_some_and(VertexKind::is_h)) {
        step(&mut d, &mut trace, site(Rule::HCommute, colour, vec![error]))?;
        colour = colour.dual();
    }

    let target = d
        .neighbour_counts(error)
        .map(|(w, _)| w)
        .find(|w| apply(&d, &site(Rule::PiCommute, colour.dual(), vec![error, *w])).is_ok());
    let Some(s) = target else {
        return Ok((d, trace));
    };
    let first_new = d.fresh_id();
    step(&mut d, &mut trace, site(Rule::PiCommute, colour.dual(), vec![error, s]))?;
    let copies: Vec<V> = d
        .vertex_ids()
        .filter(|v| *v >= first_new && d.kind(*v).is_some_and(|k| k.is_conditional() && k.colour() == Some(colour)))
        .collect();
    for q in copies {
        let beyond_h = d.neighbour_counts(q).any(|(w, _)| d.kind(w).is_some_and(VertexKind::is_h));
        if beyond_h {
            step(&mut d, &mut trace, site(Rule::HCommute, colour, vec![q]))?;
        }
    }
    Ok((d, trace))
}
