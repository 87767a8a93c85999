use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::RewriteError;
use crate::diagram::{Colour, ConditionSet, Diagram, SpiderData, VertexKind, V};
use crate::phase::PhaseExpr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Spider,
    Identity,
    AntiLoop,
    Copying,
    PiCommute,
    AlphaCommute,
    Bialgebra,
    Hopf,
    HCommute,
    HCancel,
}

impl Rule {
    pub const ALL: [Rule; 10] = [
        Rule::Spider,
        Rule::Identity,
        Rule::AntiLoop,
        Rule::Copying,
        Rule::PiCommute,
        Rule::AlphaCommute,
        Rule::Bialgebra,
        Rule::Hopf,
        Rule::HCommute,
        Rule::HCancel,
    ];

    fn name(self) -> &'static str {
        match self {
            Rule::Spider => "spider",
            Rule::Identity => "identity",
            Rule::AntiLoop => "anti-loop",
            Rule::Copying => "copying",
            Rule::PiCommute => "pi-commute",
            Rule::AlphaCommute => "alpha-commute",
            Rule::Bialgebra => "bialgebra",
            Rule::Hopf => "hopf",
            Rule::HCommute => "h-commute",
            Rule::HCancel => "h-cancel",
        }
    }
}

/// A rule and its colour: `dual` swaps the roles of Z and X.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RuleId {
    pub rule: Rule,
    pub dual: bool,
}

impl RuleId {
    pub fn new(rule: Rule, dual: bool) -> Self {
        RuleId { rule, dual }
    }

    /// Every rule in both colours.
    pub fn all() -> Vec<RuleId> {
        Rule::ALL
            .iter()
            .flat_map(|r| [RuleId::new(*r, false), RuleId::new(*r, true)])
            .collect()
    }

    /// The colour of the rule's primary spider.
    pub fn colour(self) -> Colour {
        if self.dual {
            Colour::X
        } else {
            Colour::Z
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rule.name())?;
        if self.dual {
            f.write_str("-dual")?;
        }
        Ok(())
    }
}

impl FromStr for RuleId {
    type Err = RewriteError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        let (base, dual) = match lower.strip_suffix("-dual") {
            Some(b) => (b, true),
            None => (lower.as_str(), false),
        };
        Rule::ALL
            .iter()
            .find(|r| r.name() == base)
            .map(|r| RuleId::new(*r, dual))
            .ok_or_else(|| RewriteError::UnknownRule(s.to_string()))
    }
}

impl Serialize for RuleId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Where a rule's left-hand side occurs. Anchors are, per rule:
/// Spider `[kept, absorbed]`; Identity, AntiLoop, HCommute `[v]`;
/// Copying `[spider, point]`; PiCommute `[pi, spider]`;
/// AlphaCommute `[phase, spider, target]`; Bialgebra and Hopf
/// `[primary-colour, other-colour]`; HCancel `[h, h]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MatchSite {
    pub rule: RuleId,
    pub anchors: Vec<V>,
    pub edges: Vec<(V, V)>,
}

impl MatchSite {
    fn new(rule: RuleId, anchors: Vec<V>, edges: Vec<(V, V)>) -> Self {
        MatchSite { rule, anchors, edges }
    }
}

fn spider_of(d: &Diagram, v: V, colour: Colour) -> Option<&SpiderData> {
    match d.kind(v)? {
        k if k.colour() == Some(colour) => k.spider_data(),
        _ => None,
    }
}

fn sorted_pair(a: V, b: V) -> (V, V) {
    (a.min(b), a.max(b))
}

/// The far end of `v`'s legs other than one copy of `via`.
fn other_legs(d: &Diagram, v: V, via: V) -> Vec<V> {
    let mut legs = d.legs(v);
    if let Some(i) = legs.iter().position(|x| *x == via) {
        legs.remove(i);
    }
    legs
}

fn is_match(d: &Diagram, site: &MatchSite) -> bool {
    let c = site.rule.colour();
    let o = c.dual();
    let a = &site.anchors;
    let arity = match site.rule.rule {
        Rule::Identity | Rule::AntiLoop | Rule::HCommute => 1,
        Rule::AlphaCommute => 3,
        _ => 2,
    };
    if a.len() != arity || a.iter().any(|v| !d.contains(*v)) {
        return false;
    }
    match site.rule.rule {
        Rule::Spider => {
            let (Some(p), Some(q)) = (spider_of(d, a[0], c), spider_of(d, a[1], c)) else {
                return false;
            };
            a[0] != a[1] && d.edge_count(a[0], a[1]) > 0 && p.cond == q.cond
        }
        Rule::Identity => spider_of(d, a[0], c)
            .is_some_and(|p| p.phase.is_zero() && d.degree(a[0]) == 2 && d.self_loops(a[0]) == 0),
        Rule::AntiLoop => spider_of(d, a[0], c).is_some() && d.self_loops(a[0]) > 0,
        Rule::Copying => {
            let (s, p) = (a[0], a[1]);
            let (Some(sd), Some(pd)) = (spider_of(d, s, c), spider_of(d, p, o)) else {
                return false;
            };
            !sd.is_conditional()
                && !pd.is_conditional()
                && pd.phase.is_pauli()
                && d.degree(p) == 1
                && d.edge_count(s, p) == 1
                && d.self_loops(s) == 0
        }
        Rule::PiCommute => {
            let (x, s) = (a[0], a[1]);
            let (Some(xd), Some(sd)) = (spider_of(d, x, o), spider_of(d, s, c)) else {
                return false;
            };
            xd.phase.is_pi()
                && d.degree(x) == 2
                && d.self_loops(x) == 0
                && d.edge_count(x, s) == 1
                && d.self_loops(s) == 0
                && (!sd.is_conditional() || sd.phase.is_pi())
        }
        Rule::AlphaCommute => {
            let (p, s, n) = (a[0], a[1], a[2]);
            spider_of(d, p, c).is_some()
                && spider_of(d, s, c).is_some()
                && d.degree(p) == 2
                && d.self_loops(p) == 0
                && d.edge_count(p, s) == 1
                && n != p
                && n != s
                && d.edge_count(s, n) > 0
        }
        Rule::Bialgebra => {
            let (z, x) = (a[0], a[1]);
            let (Some(zd), Some(xd)) = (spider_of(d, z, c), spider_of(d, x, o)) else {
                return false;
            };
            zd.phase.is_zero()
                && xd.phase.is_zero()
                && d.edge_count(z, x) == 1
                && d.self_loops(z) == 0
                && d.self_loops(x) == 0
                && d.degree(z) >= 2
                && d.degree(x) >= 2
        }
        Rule::Hopf => {
            spider_of(d, a[0], c).is_some() && spider_of(d, a[1], o).is_some() && d.edge_count(a[0], a[1]) >= 2
        }
        Rule::HCommute => {
            spider_of(d, a[0], c).is_some()
                && d
                    .neighbour_counts(a[0])
                    .all(|(w, k)| k == 1 || !d.kind(w).is_some_and(VertexKind::is_h))
        }
        Rule::HCancel => {
            let (h1, h2) = (a[0], a[1]);
            h1 != h2
                && d.kind(h1).is_some_and(VertexKind::is_h)
                && d.kind(h2).is_some_and(VertexKind::is_h)
                && d.edge_count(h1, h2) > 0
                && d.self_loops(h1) == 0
                && d.self_loops(h2) == 0
        }
    }
}

/// Every site of `r` in `d`, sorted by anchors.
pub fn find_matches(d: &Diagram, r: RuleId) -> Vec<MatchSite> {
    let c = r.colour();
    let o = c.dual();
    let mut out = Vec::new();
    let ids: Vec<V> = d.vertex_ids().collect();
    let mut push = |anchors: Vec<V>, edges: Vec<(V, V)>| {
        let site = MatchSite::new(r, anchors, edges);
        if is_match(d, &site) {
            out.push(site);
        }
    };
    for &v in &ids {
        match r.rule {
            Rule::Spider => {
                if spider_of(d, v, c).is_some() {
                    for (w, _) in d.neighbour_counts(v) {
                        if w > v {
                            push(vec![v, w], vec![(v, w)]);
                        }
                    }
                }
            }
            Rule::Identity => {
                let legs = d.legs(v);
                push(vec![v], legs.iter().map(|w| sorted_pair(v, *w)).collect());
            }
            Rule::AntiLoop => push(vec![v], vec![(v, v)]),
            Rule::HCommute => push(vec![v], d.legs(v).iter().map(|w| sorted_pair(v, *w)).collect()),
            Rule::Copying => {
                if spider_of(d, v, c).is_some() {
                    for (p, _) in d.neighbour_counts(v) {
                        push(vec![v, p], vec![sorted_pair(v, p)]);
                    }
                }
            }
            Rule::PiCommute => {
                if spider_of(d, v, o).is_some() {
                    for (s, _) in d.neighbour_counts(v) {
                        push(vec![v, s], vec![sorted_pair(v, s)]);
                    }
                }
            }
            Rule::AlphaCommute => {
                if spider_of(d, v, c).is_some() && d.degree(v) == 2 {
                    for (s, _) in d.neighbour_counts(v) {
                        for (n, _) in d.neighbour_counts(s) {
                            push(vec![v, s, n], vec![sorted_pair(v, s), sorted_pair(s, n)]);
                        }
                    }
                }
            }
            Rule::Bialgebra | Rule::Hopf => {
                if spider_of(d, v, c).is_some() {
                    for (x, _) in d.neighbour_counts(v) {
                        push(vec![v, x], vec![sorted_pair(v, x)]);
                    }
                }
            }
            Rule::HCancel => {
                if d.kind(v).is_some_and(VertexKind::is_h) {
                    for (w, _) in d.neighbour_counts(v) {
                        if w > v {
                            push(vec![v, w], vec![(v, w)]);
                        }
                    }
                }
            }
        }
    }
    out.sort();
    out
}

fn set_phase(d: &mut Diagram, v: V, phase: PhaseExpr) {
    let kind = d.kind(v).expect("live vertex").clone();
    let colour = kind.colour().expect("spider");
    let cond = kind.spider_data().expect("spider").cond.clone();
    d.set_kind(v, VertexKind::spider(colour, phase, cond));
}

/// Replaces the site's left-hand side by the right-hand side.
pub fn apply(d: &Diagram, site: &MatchSite) -> Result<Diagram, RewriteError> {
    if !is_match(d, site) {
        return Err(RewriteError::InvalidSite(format!("{} at {:?}", site.rule, site.anchors)));
    }
    let c = site.rule.colour();
    let o = c.dual();
    let a = &site.anchors;
    let mut d = d.clone();
    match site.rule.rule {
        Rule::Spider => {
            let (u, v) = (a[0], a[1]);
            let pv = d.kind(v).and_then(VertexKind::spider_data).expect("spider").phase.clone();
            let between = d.edge_count(u, v);
            let loops = d.self_loops(v);
            let outer: Vec<V> = d.legs(v).into_iter().filter(|w| *w != u && *w != v).collect();
            d.remove_vertex(v);
            for w in outer {
                d.add_edge(u, w);
            }
            for _ in 0..loops + between - 1 {
                d.add_edge(u, u);
            }
            let pu = d.kind(u).and_then(VertexKind::spider_data).expect("spider").phase.clone();
            set_phase(&mut d, u, &pu + &pv);
        }
        Rule::Identity => {
            let legs = d.legs(a[0]);
            d.remove_vertex(a[0]);
            d.add_edge(legs[0], legs[1]);
        }
        Rule::AntiLoop => {
            d.remove_edge(a[0], a[0]);
        }
        Rule::Copying => {
            let (s, p) = (a[0], a[1]);
            let point = d.kind(p).expect("point").clone();
            let outer = other_legs(&d, s, p);
            d.remove_vertex(s);
            d.remove_vertex(p);
            for w in outer {
                let q = d.add_vertex(point.clone());
                d.add_edge(q, w);
            }
        }
        Rule::PiCommute => {
            let (x, s) = (a[0], a[1]);
            let u = d.kind(x).and_then(VertexKind::spider_data).expect("spider").cond.clone();
            let sd = d.kind(s).and_then(VertexKind::spider_data).expect("spider").clone();
            let w = other_legs(&d, x, s)[0];
            d.remove_vertex(x);
            for n in d.legs(s) {
                d.split_edge(s, n, VertexKind::spider(o, PhaseExpr::pi(), u.clone()));
            }
            d.add_edge(w, s);
            if u.is_empty() {
                set_phase(&mut d, s, -&sd.phase);
            } else if !sd.is_conditional() {
                // Only active valuations flip the phase: α becomes −α exactly
                // when U fires.
                let correction = sd.phase.scaled(-2);
                if !correction.is_zero() {
                    d.split_edge(w, s, VertexKind::spider(c, correction, u));
                }
            }
        }
        Rule::AlphaCommute => {
            let (p, s, n) = (a[0], a[1], a[2]);
            let kind = d.kind(p).expect("phase vertex").clone();
            let w = other_legs(&d, p, s)[0];
            d.remove_vertex(p);
            d.add_edge(w, s);
            d.split_edge(s, n, kind);
        }
        Rule::Bialgebra => {
            let (z, x) = (a[0], a[1]);
            let zl = other_legs(&d, z, x);
            let xl = other_legs(&d, x, z);
            d.remove_vertex(z);
            d.remove_vertex(x);
            let left: Vec<V> = zl
                .iter()
                .map(|w| {
                    let v = d.add_vertex(VertexKind::spider(o, PhaseExpr::zero(), ConditionSet::new()));
                    d.add_edge(v, *w);
                    v
                })
                .collect();
            let right: Vec<V> = xl
                .iter()
                .map(|w| {
                    let v = d.add_vertex(VertexKind::spider(c, PhaseExpr::zero(), ConditionSet::new()));
                    d.add_edge(v, *w);
                    v
                })
                .collect();
            for l in &left {
                for r in &right {
                    d.add_edge(*l, *r);
                }
            }
        }
        Rule::Hopf => {
            d.remove_edge(a[0], a[1]);
            d.remove_edge(a[0], a[1]);
        }
        Rule::HCommute => {
            let s = a[0];
            let kind = d.kind(s).expect("spider").with_colour(o);
            d.set_kind(s, kind);
            let neighbours: Vec<(V, usize)> = d.neighbour_counts(s).collect();
            for (w, k) in neighbours {
                if d.kind(w).is_some_and(VertexKind::is_h) {
                    let y = other_legs(&d, w, s)[0];
                    d.remove_vertex(w);
                    d.add_edge(s, y);
                } else {
                    for _ in 0..k {
                        d.split_edge(s, w, VertexKind::H);
                    }
                }
            }
        }
        Rule::HCancel => {
            let (h1, h2) = (a[0], a[1]);
            if d.edge_count(h1, h2) >= 2 {
                d.remove_vertex(h1);
                d.remove_vertex(h2);
            } else {
                let x = other_legs(&d, h1, h2)[0];
                let y = other_legs(&d, h2, h1)[0];
                d.remove_vertex(h1);
                d.remove_vertex(h2);
                d.add_edge(x, y);
            }
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::AngleAssignment;
    use crate::semantics::eval_matrix;

    fn rid(rule: Rule) -> RuleId {
        RuleId::new(rule, false)
    }

    fn wire_with(kinds: &[VertexKind]) -> (Diagram, Vec<V>) {
        let mut d = Diagram::new();
        let i = d.add_input();
        let mut prev = i;
        let mut ids = Vec::new();
        for k in kinds {
            let v = d.add_vertex(k.clone());
            d.add_edge(prev, v);
            ids.push(v);
            prev = v;
        }
        let o = d.add_output();
        d.add_edge(prev, o);
        (d, ids)
    }

    fn same(a: &Diagram, b: &Diagram) -> bool {
        let angles = AngleAssignment::new().with("a", 0.7).with("b", 2.2);
        eval_matrix(a, &angles).unwrap().equal_up_to_scalar(&eval_matrix(b, &angles).unwrap(), 1e-9).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for r in RuleId::all() {
            assert_eq!(r.to_string().parse::<RuleId>().unwrap(), r);
        }
        assert!("frobnicate".parse::<RuleId>().is_err());
    }

    #[test]
    fn spider_sums_phases() {
        let (d, ids) = wire_with(&[VertexKind::z(PhaseExpr::symbol("a")), VertexKind::z(PhaseExpr::symbol("b"))]);
        let m = find_matches(&d, rid(Rule::Spider));
        assert_eq!(m.len(), 1);
        let e = apply(&d, &m[0]).unwrap();
        let kept = e.kind(ids[0]).unwrap().spider_data().unwrap();
        assert_eq!(kept.phase, PhaseExpr::symbol("a") + PhaseExpr::symbol("b"));
        assert!(!e.contains(ids[1]));
        assert!(same(&d, &e));
    }

    #[test]
    fn conditional_fusion_needs_identical_sets() {
        let s = ConditionSet::single("s");
        let t = ConditionSet::single("t");
        let (d, _) = wire_with(&[
            VertexKind::spider(Colour::Z, PhaseExpr::pi(), s.clone()),
            VertexKind::spider(Colour::Z, PhaseExpr::pi(), t),
            VertexKind::z(PhaseExpr::symbol("a")),
        ]);
        assert!(find_matches(&d, rid(Rule::Spider)).is_empty());
        let (d, ids) = wire_with(&[
            VertexKind::spider(Colour::Z, PhaseExpr::pi(), s.clone()),
            VertexKind::spider(Colour::Z, PhaseExpr::pi(), s),
        ]);
        let e = apply(&d, &find_matches(&d, rid(Rule::Spider))[0]).unwrap();
        // π + π = 0: the condition is dropped and the vertex is a plain wire
        assert_eq!(e.kind(ids[0]), Some(&VertexKind::z(PhaseExpr::zero())));
        assert_eq!(find_matches(&e, rid(Rule::Identity)).len(), 1);
    }

    #[test]
    fn hopf_match() {
        let mut d = Diagram::new();
        let z = d.add_vertex(VertexKind::z(PhaseExpr::zero()));
        let x = d.add_vertex(VertexKind::x(PhaseExpr::zero()));
        d.add_edge(z, x);
        d.add_edge(z, x);
        let i = d.add_input();
        let o = d.add_output();
        d.add_edge(i, z);
        d.add_edge(x, o);
        let m = find_matches(&d, rid(Rule::Hopf));
        assert_eq!(m.len(), 1);
        let e = apply(&d, &m[0]).unwrap();
        assert_eq!(e.edge_count(z, x), 0);
        assert!(same(&d, &e));
    }

    #[test]
    fn identity_match() {
        let (d, ids) = wire_with(&[VertexKind::z(PhaseExpr::zero())]);
        let m = find_matches(&d, rid(Rule::Identity));
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].anchors, ids);
        assert_eq!(apply(&d, &m[0]).unwrap().num_vertices(), 2);
    }

    #[test]
    fn h_cancel_gives_wire() {
        let (d, _) = wire_with(&[VertexKind::H, VertexKind::H]);
        let e = apply(&d, &find_matches(&d, rid(Rule::HCancel))[0]).unwrap();
        assert!(crate::diagram::iso_equal(&e, &Diagram::identity(1)));
    }

    #[test]
    fn pi_commute_negates() {
        let (d, ids) = wire_with(&[VertexKind::x(PhaseExpr::pi()), VertexKind::z(PhaseExpr::symbol("a"))]);
        let m = find_matches(&d, rid(Rule::PiCommute));
        assert_eq!(m.len(), 1);
        let e = apply(&d, &m[0]).unwrap();
        assert_eq!(e.kind(ids[1]).unwrap().spider_data().unwrap().phase, -PhaseExpr::symbol("a"));
        // the π vertex now sits after the spider
        let out = e.outputs()[0];
        let before_out = e.legs(out)[0];
        assert_eq!(e.kind(before_out), Some(&VertexKind::x(PhaseExpr::pi())));
        assert!(same(&d, &e));
    }

    #[test]
    fn stale_site_rejected() {
        let (d, _) = wire_with(&[VertexKind::z(PhaseExpr::zero())]);
        let m = find_matches(&d, rid(Rule::Identity)).remove(0);
        let e = apply(&d, &m).unwrap();
        assert!(matches!(apply(&e, &m), Err(RewriteError::InvalidSite(_))));
    }

    #[test]
    fn h_commute_toggles_colour_and_hadamards() {
        let (d, ids) = wire_with(&[VertexKind::H, VertexKind::x(PhaseExpr::symbol("a"))]);
        let e = apply(&d, &MatchSite::new(RuleId::new(Rule::HCommute, true), vec![ids[1]], vec![])).unwrap();
        assert_eq!(e.kind(ids[1]).unwrap().colour(), Some(Colour::Z));
        assert!(!e.contains(ids[0]));
        assert_eq!(e.vertices().filter(|(_, k)| k.is_h()).count(), 1);
        assert!(same(&d, &e));
    }
}
