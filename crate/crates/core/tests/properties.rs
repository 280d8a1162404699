use circuitkit::graph::{component_count, parse_graph};
use circuitkit::partition::{
    circuit_count, circuit_partition_polynomial, enumerate_transition_systems,
};
use circuitkit::verify::expected_partition_total;
use circuitkit::{Budget, DirectedMultigraph, Graph, GraphRef, UndirectedMultigraph};
use proptest::prelude::*;

/// Union of closed walks over `n` vertices, so every vertex is balanced.
fn closed_walk_edges(n: usize, walks: &[Vec<usize>]) -> Vec<(usize, usize)> {
    walks
        .iter()
        .flat_map(|w| (0..w.len()).map(move |i| (w[i] % n, w[(i + 1) % w.len()] % n)))
        .collect()
}

fn eulerian_directed() -> impl Strategy<Value = DirectedMultigraph> {
    (1usize..=4)
        .prop_flat_map(|n| {
            let walks = prop::collection::vec(prop::collection::vec(0..n, 1..=3), 1..=2);
            (Just(n), walks)
        })
        .prop_map(|(n, walks)| DirectedMultigraph::new(n, closed_walk_edges(n, &walks)).unwrap())
}

fn eulerian_undirected() -> impl Strategy<Value = UndirectedMultigraph> {
    eulerian_directed().prop_map(|g| g.to_undirected())
}

fn any_undirected() -> impl Strategy<Value = UndirectedMultigraph> {
    (1usize..=5)
        .prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 0..=7)))
        .prop_map(|(n, edges)| UndirectedMultigraph::new(n, edges).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_and_json_round_trip(g in any_undirected(), d in eulerian_directed()) {
        for graph in [Graph::Undirected(g), Graph::Directed(d)] {
            prop_assert_eq!(&parse_graph(&graph.to_text()).unwrap(), &graph);
            prop_assert_eq!(&Graph::from_json(&graph.to_json()).unwrap(), &graph);
        }
    }

    #[test]
    fn adding_edges_never_adds_components(g in any_undirected(), mask in any::<u8>(), extra in any::<u8>()) {
        let m = g.edge_count();
        let small: Vec<usize> = (0..m).filter(|&e| mask >> e & 1 == 1).collect();
        let large: Vec<usize> = (0..m).filter(|&e| (mask | extra) >> e & 1 == 1).collect();
        prop_assert!(component_count(&g, large.iter().copied()) <= component_count(&g, small.iter().copied()));
        prop_assert!(component_count(&g, small.iter().copied()) <= g.vertex_count());
    }

    #[test]
    fn reversal_preserves_j(g in eulerian_directed()) {
        let budget = Budget::default();
        prop_assert_eq!(
            circuit_partition_polynomial(&g, &budget).unwrap(),
            circuit_partition_polynomial(&g.reversed(), &budget).unwrap()
        );
    }

    #[test]
    fn j_is_multiplicative_over_disjoint_unions(a in eulerian_directed(), b in eulerian_directed()) {
        let budget = Budget::default();
        let ja = circuit_partition_polynomial(&a, &budget).unwrap();
        let jb = circuit_partition_polynomial(&b, &budget).unwrap();
        let ju = circuit_partition_polynomial(&a.disjoint_union(&b), &budget).unwrap();
        prop_assert_eq!(ja.product(&jb), ju);
    }

    #[test]
    fn undirected_j_is_multiplicative(a in eulerian_undirected(), b in eulerian_undirected()) {
        let budget = Budget::default();
        let ja = circuit_partition_polynomial(&a, &budget).unwrap();
        let jb = circuit_partition_polynomial(&b, &budget).unwrap();
        let ju = circuit_partition_polynomial(&a.disjoint_union(&b), &budget).unwrap();
        prop_assert_eq!(ja.product(&jb), ju);
    }

    #[test]
    fn coefficients_sum_to_transition_count(d in eulerian_directed(), u in eulerian_undirected()) {
        let budget = Budget::default();
        for g in [GraphRef::from(&d), GraphRef::from(&u)] {
            let j = circuit_partition_polynomial(g, &budget).unwrap();
            prop_assert_eq!(j.total(), expected_partition_total(g));
            let systems = enumerate_transition_systems(g, &budget).unwrap();
            prop_assert_eq!(j.total(), systems.len().into());
        }
    }

    #[test]
    fn circuit_counts_are_bounded_by_edges(g in eulerian_directed()) {
        let budget = Budget::default();
        let m = g.edge_count();
        for ts in enumerate_transition_systems(&g, &budget).unwrap() {
            let c = circuit_count(&g, &ts);
            prop_assert!(c >= 1 && c <= m);
        }
    }
}
