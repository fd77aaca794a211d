use std::fmt::Write as _;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use super::{Comparator, RelationKind};
use crate::determination::{default_probes, determined_probes_report};
use crate::error::{Error, Result};
use crate::operator::{DensityState, DiscreteObservable};

/// Equivalence classes of a catalog under one preorder, with the Hasse
/// diagram between classes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosetReport {
    pub kind: RelationKind,
    pub labels: Vec<String>,
    /// `leq[i][j]`: observable `i` lies below observable `j`.
    pub leq: Vec<Vec<bool>>,
    /// Members in ascending catalog order; classes ordered by lowest member.
    pub classes: Vec<Vec<usize>>,
    pub class_of: Vec<usize>,
    /// Covering relation between classes, `(lower, upper)`.
    pub edges: Vec<(usize, usize)>,
    /// Classes with nothing strictly above them in the catalog.
    pub maximal: Vec<bool>,
    pub notes: Vec<String>,
}

impl PosetReport {
    pub fn class_name(&self, c: usize) -> String {
        self.classes[c]
            .iter()
            .map(|&i| self.labels[i].as_str())
            .collect::<Vec<_>>()
            .join(" ~ ")
    }

    /// `true` iff class `upper` is reachable from `lower` along covering edges.
    pub fn reachable(&self, lower: usize, upper: usize) -> bool {
        let mut seen = vec![false; self.classes.len()];
        let mut stack = vec![lower];
        while let Some(c) = stack.pop() {
            if c == upper {
                return true;
            }
            if std::mem::replace(&mut seen[c], true) {
                continue;
            }
            stack.extend(self.edges.iter().filter(|e| e.0 == c).map(|e| e.1));
        }
        false
    }

    /// Graphviz rendering; lower classes at the bottom.
    pub fn to_dot(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph poset {{");
        let _ = writeln!(s, "  label=\"{}\";", self.kind.name());
        let _ = writeln!(s, "  rankdir=BT;");
        let _ = writeln!(s, "  node [shape=box];");
        for c in 0..self.classes.len() {
            let name = escape(&self.class_name(c));
            if self.maximal[c] {
                let _ = writeln!(s, "  c{c} [label=\"{name}\\noptimal\", peripheries=2];");
            } else {
                let _ = writeln!(s, "  c{c} [label=\"{name}\"];");
            }
        }
        for &(a, b) in &self.edges {
            let _ = writeln!(s, "  c{a} -> c{b};");
        }
        let _ = writeln!(s, "}}");
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub(super) fn build(
    cmp: &Comparator,
    catalog: &[DiscreteObservable],
    labels: &[String],
    kind: RelationKind,
    probes: Option<&[DensityState]>,
) -> Result<PosetReport> {
    let n = catalog.len();
    if n == 0 {
        return Err(Error::domain("poset of an empty catalog"));
    }
    if labels.len() != n {
        return Err(Error::domain(format!("{} labels for {n} observables", labels.len())));
    }
    let d = catalog[0].dim();
    for e in catalog {
        Error::check_dim(d, e.dim())?;
    }
    let mut notes = Vec::new();

    let mut leq = vec![vec![false; n]; n];
    if kind == RelationKind::Determination {
        let owned;
        let probes = match probes {
            Some(p) if !p.is_empty() => p,
            _ => {
                owned = default_probes(catalog)?;
                notes.push(format!(
                    "{} default probes: eigenprojections of every observable and the maximally mixed state",
                    owned.len()
                ));
                &owned[..]
            }
        };
        notes.push("determination decided on the probe set only".into());
        let verdicts = catalog
            .iter()
            .map(|e| determined_probes_report(e, probes, &cmp.settings))
            .collect::<Result<Vec<_>>>()?;
        for i in 0..n {
            for j in 0..n {
                leq[i][j] = i == j
                    || cmp
                        .determination_from_verdicts(&catalog[i], probes, &verdicts[i], &verdicts[j])?
                        .holds;
            }
        }
    } else {
        for i in 0..n {
            for j in 0..n {
                leq[i][j] = i == j || cmp.leq(&catalog[i], &catalog[j], kind, probes)?.holds;
            }
        }
    }

    let mut g = DiGraph::<usize, ()>::new();
    let nodes: Vec<_> = (0..n).map(|i| g.add_node(i)).collect();
    for i in 0..n {
        for j in 0..n {
            if i != j && leq[i][j] {
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .map(|comp| {
            let mut m: Vec<usize> = comp.into_iter().map(|ix| g[ix]).collect();
            m.sort_unstable();
            m
        })
        .collect();
    classes.sort_by_key(|m| m[0]);
    let k = classes.len();
    let mut class_of = vec![0; n];
    for (c, members) in classes.iter().enumerate() {
        for &i in members {
            class_of[i] = c;
        }
    }

    // Closure over classes: any member-level edge lifts.
    let mut above = vec![vec![false; k]; k];
    for i in 0..n {
        for j in 0..n {
            if leq[i][j] && class_of[i] != class_of[j] {
                above[class_of[i]][class_of[j]] = true;
            }
        }
    }
    for m in 0..k {
        for a in 0..k {
            if above[a][m] {
                for b in 0..k {
                    if above[m][b] {
                        above[a][b] = true;
                    }
                }
            }
        }
    }
    let transitive_gaps = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| !leq[i][j] && (class_of[i] == class_of[j] || above[class_of[i]][class_of[j]]))
        .count();
    if transitive_gaps > 0 {
        notes.push(format!(
            "{transitive_gaps} pairwise verdicts were filled in by transitivity"
        ));
    }

    let mut edges = Vec::new();
    for a in 0..k {
        for b in 0..k {
            if above[a][b] && !(0..k).any(|m| above[a][m] && above[m][b]) {
                edges.push((a, b));
            }
        }
    }
    let maximal = (0..k).map(|a| !above[a].iter().any(|&x| x)).collect();

    Ok(PosetReport {
        kind,
        labels: labels.to_vec(),
        leq,
        classes,
        class_of,
        edges,
        maximal,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> DiscreteObservable {
        DiscreteObservable::from_diagonals(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    fn coin() -> DiscreteObservable {
        DiscreteObservable::from_diagonals(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap()
    }

    #[test]
    fn duplicate_observables_form_one_maximal_class() {
        let cat = [z(), z()];
        let labels = ["a".to_string(), "b".to_string()];
        let r = Comparator::default()
            .build_poset(&cat, &labels, RelationKind::Fuzzy, None)
            .unwrap();
        assert_eq!(r.classes, vec![vec![0, 1]]);
        assert!(r.edges.is_empty());
        assert_eq!(r.maximal, vec![true]);
    }

    #[test]
    fn trivial_below_sharp() {
        let cat = [z(), coin()];
        let labels = ["z".to_string(), "coin".to_string()];
        for kind in RelationKind::ALL {
            let r = Comparator::default().build_poset(&cat, &labels, kind, None).unwrap();
            if kind == RelationKind::Determination {
                continue;
            }
            assert_eq!(r.classes.len(), 2, "{kind:?}");
            assert_eq!(r.edges, vec![(1, 0)], "{kind:?}");
            assert_eq!(r.maximal, vec![true, false]);
            assert!(r.to_dot().contains("c1 -> c0;"));
        }
    }

    #[test]
    fn dot_is_stable() {
        let cat = [coin(), z()];
        let labels = ["coin".to_string(), "z \"sharp\"".to_string()];
        let a = Comparator::default().build_poset(&cat, &labels, RelationKind::Informational, None).unwrap();
        let b = Comparator::default().build_poset(&cat, &labels, RelationKind::Informational, None).unwrap();
        assert_eq!(a.to_dot(), b.to_dot());
        assert!(a.to_dot().contains("z \\\"sharp\\\""));
    }

    #[test]
    fn mixed_dims_rejected() {
        let three = DiscreteObservable::from_diagonals(&[vec![1.0, 1.0, 1.0]]).unwrap();
        let labels = ["a".to_string(), "b".to_string()];
        let err = Comparator::default().build_poset(&[z(), three], &labels, RelationKind::Fuzzy, None);
        assert!(matches!(err, Err(Error::Dimension { .. })));
    }
}
