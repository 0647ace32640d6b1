use itertools::Itertools;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ribbonzeta::io::{parse_graph, write_graph};
use ribbonzeta::ribbon::{rose_graph, theta_graph};
use ribbonzeta::{automorphisms, canonical_code, enumerate_trivalent_types, is_isomorphic, MetricRibbonGraph, RibbonGraph};

/// Isomorphism by trying every bijection of half-edges.
fn brute_isomorphisms(a: &RibbonGraph, b: &RibbonGraph) -> usize {
    let n = a.n_half_edges();
    if n != b.n_half_edges() {
        return 0;
    }
    (0..n)
        .permutations(n)
        .filter(|phi| {
            (0..n).all(|h| phi[a.twin(h)] == b.twin(phi[h]) && phi[a.next(h)] == b.next(phi[h]))
        })
        .count()
}

fn relabel(g: &RibbonGraph, perm: &[usize]) -> RibbonGraph {
    let n = g.n_half_edges();
    let mut twin = vec![0; n];
    let mut next = vec![0; n];
    for h in 0..n {
        twin[perm[h]] = perm[g.twin(h)];
        next[perm[h]] = perm[g.next(h)];
    }
    RibbonGraph::new(twin, next).unwrap()
}

fn all_matchings(items: &[usize], cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
    if items.is_empty() {
        out.push(cur.clone());
        return;
    }
    let first = items[0];
    for k in 1..items.len() {
        let rest: Vec<usize> = items[1..].iter().copied().filter(|&x| x != items[k]).collect();
        cur.push((first, items[k]));
        all_matchings(&rest, cur, out);
        cur.pop();
    }
}

#[test]
fn small_graphs_against_brute_force() {
    let graphs: Vec<RibbonGraph> = [(0, 3), (1, 1)]
        .iter()
        .flat_map(|&(g, n)| enumerate_trivalent_types(g, n).unwrap())
        .map(|c| c.representative)
        .chain([rose_graph(3).clone()].into_iter().filter(|r| r.n_half_edges() == 6))
        .collect();
    for a in &graphs {
        assert_eq!(automorphisms(a), brute_isomorphisms(a, a));
        for b in &graphs {
            assert_eq!(is_isomorphic(a, b), brute_isomorphisms(a, b) > 0);
        }
    }
}

#[test]
fn orbit_count_matches_matchings() {
    // With the vertex rotation fixed, every perfect matching of half-edges
    // is a labelled trivalent graph; the classes of a type have orbits of
    // size |centraliser| / |Aut|, where the centraliser has V! 3^V elements.
    for (g, n) in [(0, 3), (1, 1), (0, 4), (1, 2)] {
        let cells = enumerate_trivalent_types(g, n).unwrap();
        let v = cells[0].representative.n_vertices();
        let next: Vec<usize> = (0..3 * v).map(|h| 3 * (h / 3) + (h + 1) % 3).collect();
        let mut matchings = Vec::new();
        all_matchings(&(0..3 * v).collect::<Vec<_>>(), &mut Vec::new(), &mut matchings);
        let of_type = matchings
            .iter()
            .filter(|m| {
                let mut twin = vec![0; 3 * v];
                for &(a, b) in m.iter() {
                    twin[a] = b;
                    twin[b] = a;
                }
                RibbonGraph::new(twin, next.clone())
                    .map(|r| r.topological_type() == (g as usize, n as usize))
                    .unwrap_or(false)
            })
            .count();
        let centraliser = (1..=v).product::<usize>() * 3usize.pow(v as u32);
        let total: usize = cells.iter().map(|c| centraliser / c.automorphism_count).sum();
        assert_eq!(total, of_type, "({g},{n})");
    }
}

#[test]
fn known_class_counts() {
    let counts: Vec<usize> = [(0, 3), (1, 1), (0, 4), (1, 2)]
        .iter()
        .map(|&(g, n)| enumerate_trivalent_types(g, n).unwrap().len())
        .collect();
    assert_eq!(counts, vec![2, 1, 6, 5]);
}

#[test]
fn theta_twists() {
    let one = theta_graph(true);
    let three = theta_graph(false);
    assert_eq!(one.topological_type(), (1, 1));
    assert_eq!(three.topological_type(), (0, 3));
    assert!(!is_isomorphic(&one, &three));
}

#[test]
fn rerandomized_theta_has_one_of_two_types() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut seen = std::collections::BTreeSet::new();
    for _ in 0..64 {
        let r = theta_graph(true).rerandomize_cyclic_orders(&mut rng);
        seen.insert(r.topological_type());
    }
    assert_eq!(seen.into_iter().collect::<Vec<_>>(), vec![(0, 3), (1, 1)]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_code_ignores_labels(seed in any::<u64>(), which in 0usize..14) {
        let cells: Vec<_> = [(0, 3), (1, 1), (0, 4), (1, 2)]
            .iter()
            .flat_map(|&(g, n)| enumerate_trivalent_types(g, n).unwrap())
            .collect();
        let g = &cells[which % cells.len()].representative;
        let mut perm: Vec<usize> = (0..g.n_half_edges()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rand::seq::SliceRandom::shuffle(&mut perm[..], &mut rng);
        let h = relabel(g, &perm);
        prop_assert_eq!(canonical_code(g), canonical_code(&h));
        prop_assert_eq!(automorphisms(g), automorphisms(&h));
        prop_assert_eq!(g.topological_type(), h.topological_type());
    }

    #[test]
    fn euler_characteristic(seed in any::<u64>(), which in 0usize..14) {
        let cells: Vec<_> = [(0, 3), (1, 1), (0, 4), (1, 2)]
            .iter()
            .flat_map(|&(g, n)| enumerate_trivalent_types(g, n).unwrap())
            .collect();
        let g = &cells[which % cells.len()].representative;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = g.rerandomize_cyclic_orders(&mut rng);
        let chi = r.n_vertices() as i64 - r.n_edges() as i64 + r.n_faces() as i64;
        let (genus, n) = r.topological_type();
        prop_assert_eq!(chi, 2 - 2 * genus as i64);
        prop_assert_eq!(n, r.n_faces());
        // every half-edge lies on exactly one face
        let mut seen = vec![0; r.n_half_edges()];
        for f in r.faces() {
            for &h in f {
                seen[h] += 1;
            }
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn contraction_keeps_type_and_lengths(seed in any::<u64>(), which in 0usize..14) {
        let cells: Vec<_> = [(0, 3), (1, 1), (0, 4), (1, 2)]
            .iter()
            .flat_map(|&(g, n)| enumerate_trivalent_types(g, n).unwrap())
            .collect();
        let rg = cells[which % cells.len()].representative.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lengths: Vec<f64> = (0..rg.n_edges()).map(|_| rand::Rng::random_range(&mut rng, 0.5..2.0)).collect();
        let g = MetricRibbonGraph::new(rg.clone(), lengths).unwrap();
        for e in (0..rg.n_edges()).filter(|&e| !rg.is_loop(e)) {
            let c = g.contract_edge(e).unwrap();
            prop_assert_eq!(c.graph().topological_type(), rg.topological_type());
            prop_assert_eq!(c.graph().n_edges(), rg.n_edges() - 1);
            prop_assert!((c.total_length() + g.edge_length(e) - g.total_length()).abs() < 1e-12);
        }
    }

    #[test]
    fn text_format_round_trip(num in proptest::collection::vec(1i64..20, 6), den in proptest::collection::vec(1i64..9, 6), which in 0usize..5) {
        let rg = enumerate_trivalent_types(1, 2).unwrap()[which].representative.clone();
        let lengths: Vec<_> = (0..rg.n_edges()).map(|i| num_rational::Rational64::new(num[i], den[i])).collect();
        let g = MetricRibbonGraph::with_exact_lengths(rg, lengths).unwrap();
        let back = parse_graph(&write_graph(&g)).unwrap();
        prop_assert_eq!(back.graph(), g.graph());
        prop_assert_eq!(back.exact_lengths(), g.exact_lengths());
    }
}

#[test]
fn malformed_files_rejected() {
    for text in [
        "",
        "halfedges 4\ntwin: 0 1\ntwin: 2 3\nvertex: 0 2\nvertex: 1\n",
        "halfedges 2\ntwin: 0 0\nvertex: 0 1\nlength: 0 1\n",
        "halfedges 2\ntwin: 0 1\nvertex: 0 1\nlength: 0 -1\n",
        "halfedges 2\ntwin: 0 1\nvertex: 0 1\n",
        "halfedges 2\ntwin: 0 1\nvertex: 0 1\nlength: 0 1\nlength: 0 2\n",
        "halfedges 2\ntwin: 0 1\nvertex: 0 1\nlength: 1 1\n",
        "halfedges 2\ntwin: 0 x\nvertex: 0 1\nlength: 0 1\n",
    ] {
        assert!(parse_graph(text).is_err(), "accepted {text:?}");
    }
}
