//! Frozen ground truth from the brute-force enumerator. The numbers were
//! produced by the oracle itself (cross-checked against filtered exhaustive
//! labelings at side lengths 3 and 4 in its unit tests) and are pinned here
//! as regression fixtures.

use std::collections::HashSet;
use trirecom::lattice::Symmetry;
use trirecom::oracle::{build_state_graph, check_connected, eccentricity_stats, enumerate_omega, rigid_states, StateGraph};
use trirecom::partition::ALL_PERMS;
use trirecom::{balance_class, build_region, BalanceClass, SizeTargets};

struct Fixture {
    n: usize,
    k: [usize; 3],
    slack: usize,
    states: usize,
    balanced: usize,
    edges: u64,
    components: usize,
    rigid: usize,
    /// Exact diameter, when small enough to compute here.
    diameter: Option<usize>,
}

const FIXTURES: &[Fixture] = &[
    Fixture { n: 3, k: [2, 2, 2], slack: 0, states: 12, balanced: 12, edges: 18, components: 2, rigid: 12, diameter: None },
    Fixture { n: 3, k: [2, 2, 2], slack: 1, states: 138, balanced: 12, edges: 1179, components: 1, rigid: 0, diameter: Some(3) },
    Fixture { n: 4, k: [4, 3, 3], slack: 0, states: 72, balanced: 72, edges: 360, components: 1, rigid: 0, diameter: Some(3) },
    Fixture { n: 4, k: [4, 3, 3], slack: 1, states: 510, balanced: 72, edges: 7347, components: 1, rigid: 0, diameter: Some(3) },
    Fixture { n: 5, k: [5, 5, 5], slack: 0, states: 462, balanced: 462, edges: 5193, components: 1, rigid: 0, diameter: Some(5) },
    Fixture { n: 5, k: [5, 5, 5], slack: 1, states: 3306, balanced: 462, edges: 99747, components: 1, rigid: 0, diameter: Some(4) },
    Fixture { n: 5, k: [4, 5, 6], slack: 1, states: 3357, balanced: 474, edges: 107232, components: 1, rigid: 0, diameter: Some(3) },
    Fixture { n: 6, k: [7, 7, 7], slack: 0, states: 5304, balanced: 5304, edges: 176760, components: 1, rigid: 0, diameter: None },
    Fixture { n: 6, k: [7, 7, 7], slack: 1, states: 37020, balanced: 5304, edges: 3119238, components: 1, rigid: 0, diameter: None },
];

fn graph(n: usize, k: [usize; 3], slack: usize) -> StateGraph {
    let states = enumerate_omega(&build_region(n).unwrap(), SizeTargets::new(k[0], k[1], k[2]), slack).unwrap();
    build_state_graph(states)
}

#[test]
fn enumeration_counts_match_fixtures() {
    for f in FIXTURES {
        let g = graph(f.n, f.k, f.slack);
        let name = format!("n={} k={:?} slack={}", f.n, f.k, f.slack);
        assert_eq!(g.len(), f.states, "{name}: states");
        let balanced = g.states().iter().filter(|p| balance_class(p) == BalanceClass::Balanced).count();
        assert_eq!(balanced, f.balanced, "{name}: balanced");
        assert_eq!(g.edge_count(), f.edges, "{name}: edges");
        assert_eq!(check_connected(&g).1, f.components, "{name}: components");
        assert_eq!(rigid_states(&g).len(), f.rigid, "{name}: rigid");
        if let Some(d) = f.diameter {
            assert_eq!(eccentricity_stats(&g, g.len()).diameter, Some(d), "{name}: diameter");
        }
        assert!(g.states().iter().all(|p| balance_class(p).in_omega()), "{name}: state outside the window");
    }
}

#[test]
fn slack_one_strictly_contains_slack_zero() {
    let exact: HashSet<Vec<u8>> = graph(3, [2, 2, 2], 0).states().iter().map(|p| p.labels().to_vec()).collect();
    let loose: HashSet<Vec<u8>> = graph(3, [2, 2, 2], 1).states().iter().map(|p| p.labels().to_vec()).collect();
    assert!(exact.is_subset(&loose) && loose.len() > exact.len());
}

type LabelMap = Box<dyn Fn(&[u8]) -> Vec<u8>>;

fn edges(g: &StateGraph) -> HashSet<(Vec<u8>, Vec<u8>)> {
    let mut out = HashSet::new();
    for i in 0..g.len() {
        for j in g.neighbors(i) {
            out.insert((g.state(i).labels().to_vec(), g.state(j).labels().to_vec()));
        }
    }
    out
}

#[test]
fn relabelings_and_reflections_are_automorphisms() {
    let g = graph(5, [5, 5, 5], 1);
    let all = edges(&g);
    let present: HashSet<Vec<u8>> = g.states().iter().map(|p| p.labels().to_vec()).collect();
    let region = build_region(5).unwrap();
    let mut maps: Vec<LabelMap> = Vec::new();
    for perm in ALL_PERMS {
        maps.push(Box::new(move |l: &[u8]| l.iter().map(|&d| perm[d as usize - 1]).collect()));
    }
    for s in Symmetry::all() {
        let ids = s.id_map(&region);
        maps.push(Box::new(move |l: &[u8]| {
            let mut out = vec![0; l.len()];
            for (v, &d) in l.iter().enumerate() {
                out[ids[v]] = d;
            }
            out
        }));
    }
    for map in &maps {
        let images: HashSet<Vec<u8>> = g.states().iter().map(|p| map(p.labels())).collect();
        assert_eq!(images, present, "state set is not preserved");
        for (a, b) in &all {
            assert!(all.contains(&(map(a), map(b))), "edge image missing");
        }
    }
}
