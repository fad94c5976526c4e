use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::model::{Program, RuleId};

/// Existential rules lying on a cycle of the rule dependency graph (an edge `r -> s`
/// means some head predicate of `r` occurs in the body of `s`). Such programs may
/// keep inventing nulls under the oblivious chase.
pub fn recursive_existential_rules(program: &Program) -> Vec<RuleId> {
    let rules = program.rules();
    let mut graph = DiGraph::<RuleId, ()>::new();
    let nodes: Vec<_> = rules.iter().map(|r| graph.add_node(r.id)).collect();
    for r in rules {
        for s in rules {
            let feeds = r.head.iter().any(|h| s.body.iter().any(|b| b.predicate == h.predicate));
            if feeds {
                graph.add_edge(nodes[r.id.0], nodes[s.id.0], ());
            }
        }
    }
    let mut risky = Vec::new();
    for component in tarjan_scc(&graph) {
        let cyclic = component.len() > 1 || component.iter().any(|n| graph.find_edge(*n, *n).is_some());
        if cyclic {
            risky.extend(component.iter().map(|n| graph[*n]).filter(|id| program.rule(*id).is_existential()));
        }
    }
    risky.sort();
    risky
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;

    #[test]
    fn flags_existential_cycle() {
        let p = parse_program("e(X,Y) :- n(X).\nn(Y) :- e(X,Y).").unwrap();
        assert_eq!(recursive_existential_rules(&p), vec![RuleId(0)]);
    }

    #[test]
    fn acyclic_existential_is_fine() {
        let p = parse_program("i1(X,Y) :- e1(X).\ni2(X) :- i1(X,Y).").unwrap();
        assert!(recursive_existential_rules(&p).is_empty());
    }

    #[test]
    fn datalog_recursion_is_fine() {
        let p = parse_program("t(X,Y) :- e(X,Y).\nt(X,Z) :- t(X,Y), e(Y,Z).").unwrap();
        assert!(recursive_existential_rules(&p).is_empty());
    }

    #[test]
    fn self_loop() {
        let p = parse_program("p(Y) :- p(X).").unwrap();
        assert_eq!(recursive_existential_rules(&p), vec![RuleId(0)]);
    }
}
