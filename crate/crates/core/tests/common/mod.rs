//! Random forests and brute-force oracles for the finite-tree algorithms.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rn_topo::tree::{
    coherent_transversal, convex_hull, edge_leq, helly_common_vertex, is_coherent, lex_least_path, DirectedEdge,
    EdgeColoring, FiniteTree, TreeError,
};

pub struct Instance {
    pub tree: FiniteTree<u32>,
    pub coloring: EdgeColoring<u32>,
    pub adj: BTreeMap<u32, BTreeSet<u32>>,
    pub rng: ChaCha8Rng,
}

/// A random forest on at most `max_n` shuffled labels with a random proper
/// edge coloring.
pub fn random_instance(seed: u64, max_n: u32) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=max_n);
    let mut labels: Vec<u32> = (0..n).map(|i| i * 3 + 1).collect();
    labels.shuffle(&mut rng);
    let mut edges = Vec::new();
    for i in 1..n as usize {
        if rng.random_bool(0.92) {
            let j = rng.random_range(0..i);
            edges.push((labels[i], labels[j]));
        }
    }
    let mut adj: BTreeMap<u32, BTreeSet<u32>> = labels.iter().map(|&v| (v, BTreeSet::new())).collect();
    for &(u, v) in &edges {
        adj.get_mut(&u).unwrap().insert(v);
        adj.get_mut(&v).unwrap().insert(u);
    }
    let mut coloring = EdgeColoring::new();
    let mut used: BTreeMap<u32, BTreeSet<u64>> = BTreeMap::new();
    let mut order = edges.clone();
    order.shuffle(&mut rng);
    for (u, v) in order {
        let free: Vec<u64> = (0..12)
            .filter(|c| !used.get(&u).is_some_and(|s| s.contains(c)) && !used.get(&v).is_some_and(|s| s.contains(c)))
            .collect();
        let c = if free.is_empty() { 100 + used.values().map(BTreeSet::len).sum::<usize>() as u64 } else { free[rng.random_range(0..free.len())] };
        used.entry(u).or_default().insert(c);
        used.entry(v).or_default().insert(c);
        coloring.set(&u, &v, c);
    }
    let tree = FiniteTree::new(labels.iter().copied(), edges).unwrap();
    Instance { tree, coloring, adj, rng }
}

impl Instance {
    fn vertices(&self) -> Vec<u32> {
        self.adj.keys().copied().collect()
    }

    fn directed(&self) -> Vec<DirectedEdge<u32>> {
        self.adj
            .iter()
            .flat_map(|(&u, ns)| ns.iter().map(move |&v| DirectedEdge::new(u, v)))
            .collect()
    }

    /// Vertices reachable from `start` without crossing `{cut.0, cut.1}`.
    fn reach(&self, start: u32, cut: Option<(u32, u32)>) -> BTreeSet<u32> {
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &w in &self.adj[&u] {
                if cut.is_some_and(|(a, b)| (a, b) == (u, w) || (b, a) == (u, w)) {
                    continue;
                }
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen
    }

    pub fn brute_half_space(&self, e: &DirectedEdge<u32>) -> BTreeSet<u32> {
        self.reach(e.origin, Some((e.origin, e.terminus)))
    }

    /// The vertices of the unique path from `x` to `y`, if connected.
    pub fn brute_path(&self, x: u32, y: u32) -> Option<Vec<u32>> {
        fn go(adj: &BTreeMap<u32, BTreeSet<u32>>, u: u32, from: Option<u32>, y: u32, path: &mut Vec<u32>) -> bool {
            path.push(u);
            if u == y {
                return true;
            }
            for &w in &adj[&u] {
                if Some(w) != from && go(adj, w, Some(u), y, path) {
                    return true;
                }
            }
            path.pop();
            false
        }
        let mut path = Vec::new();
        go(&self.adj, x, None, y, &mut path).then_some(path)
    }

    fn random_subset(&mut self, max: usize) -> BTreeSet<u32> {
        let vs = self.vertices();
        let k = self.rng.random_range(0..=max.min(vs.len()));
        vs.choose_multiple(&mut self.rng, k).copied().collect()
    }

    fn random_subtree(&mut self, inside: &BTreeSet<u32>) -> BTreeSet<u32> {
        let vs: Vec<u32> = inside.iter().copied().collect();
        let a = vs[self.rng.random_range(0..vs.len())];
        let b = vs[self.rng.random_range(0..vs.len())];
        let mut s: BTreeSet<u32> = self.brute_path(a, b).unwrap().into_iter().collect();
        // grow a little
        for _ in 0..self.rng.random_range(0..4) {
            let border: Vec<u32> = s.iter().flat_map(|u| self.adj[u].iter().copied()).filter(|w| !s.contains(w)).collect();
            if border.is_empty() {
                break;
            }
            s.insert(border[self.rng.random_range(0..border.len())]);
        }
        s
    }
}

/// Runs every oracle comparison on one random instance.
pub fn check_instance(seed: u64) -> Result<(), String> {
    let mut inst = random_instance(seed, 40);
    let tree = inst.tree.clone();
    let fail = |what: &str, detail: String| Err(format!("seed {seed}: {what}: {detail}"));
    let directed = inst.directed();

    // half-spaces
    let mut halves = BTreeMap::new();
    for e in &directed {
        let h = inst.brute_half_space(e);
        let got = tree.half_space(e).map_err(|x| x.to_string())?;
        if got != h {
            return fail("half_space", format!("{e:?}: {got:?} vs {h:?}"));
        }
        halves.insert(e.clone(), h);
    }
    assert!(tree.half_space(&DirectedEdge::new(1, 1)).is_err());

    // the order on directed edges
    for e0 in &directed {
        for e1 in &directed {
            let want = halves[e0].is_subset(&halves[e1]);
            if edge_leq(&tree, e0, e1).map_err(|x| x.to_string())? != want {
                return fail("edge_leq", format!("{e0:?} {e1:?}"));
            }
        }
    }

    // coherence and transversals
    for round in 0..12 {
        if directed.is_empty() {
            break;
        }
        let k = inst.rng.random_range(0..=6.min(directed.len()));
        let mut h: Vec<DirectedEdge<u32>> = directed.choose_multiple(&mut inst.rng, k).cloned().collect();
        if round % 2 == 0 {
            // orient towards a random vertex: coherent by construction
            let r = inst.vertices()[inst.rng.random_range(0..inst.adj.len())];
            h = h
                .into_iter()
                .map(|e| if halves[&e].contains(&r) { e.inverse() } else { e })
                .collect();
        }
        let component = |v: u32| inst.reach(v, None);
        let mut coherent = true;
        for (i, a) in h.iter().enumerate() {
            for b in &h[i + 1..] {
                if component(a.origin).contains(&b.origin) && halves[&a.inverse()].is_disjoint(&halves[&b.inverse()]) {
                    coherent = false;
                }
            }
        }
        if is_coherent(&tree, &h).map_err(|x| x.to_string())? != coherent {
            return fail("is_coherent", format!("{h:?}"));
        }
        let tr = coherent_transversal(&tree, &h);
        if !coherent {
            if !matches!(tr, Err(TreeError::NotCoherent(..))) {
                return fail("coherent_transversal", format!("accepted incoherent {h:?}"));
            }
            continue;
        }
        let tr = tr.map_err(|x| x.to_string())?;
        // F_H: vertices sharing some V^o(e)
        let mut classes: Vec<BTreeSet<u32>> = Vec::new();
        for e in &h {
            let mut merged = halves[e].clone();
            classes.retain(|c| {
                if c.is_disjoint(&merged) {
                    true
                } else {
                    merged.extend(c.iter().copied());
                    false
                }
            });
            classes.push(merged);
        }
        classes.sort();
        let mut got = tr.classes.clone();
        got.sort();
        if got != classes {
            return fail("coherent_transversal classes", format!("{h:?}: {got:?} vs {classes:?}"));
        }
        let maximal: BTreeSet<DirectedEdge<u32>> = h
            .iter()
            .filter(|e| !h.iter().any(|f| f != *e && halves[*e].is_subset(&halves[f])))
            .cloned()
            .collect();
        if tr.maximal.iter().cloned().collect::<BTreeSet<_>>() != maximal {
            return fail("coherent_transversal maximal", format!("{h:?}"));
        }
        // origins of the maximal edges meet every class exactly once
        for c in &classes {
            if tr.representatives.iter().filter(|r| c.contains(r)).count() != 1 {
                return fail("transversal", format!("{h:?}: class {c:?}, reps {:?}", tr.representatives));
            }
        }
    }

    // Helly
    for _ in 0..4 {
        let v = inst.vertices()[inst.rng.random_range(0..inst.adj.len())];
        let comp = inst.reach(v, None);
        let mut family: Vec<BTreeSet<u32>> = Vec::new();
        let mut clash = None;
        for _ in 0..inst.rng.random_range(1..6) {
            let s = inst.random_subtree(&comp);
            match family.iter().position(|f| f.is_disjoint(&s)) {
                Some(i) if clash.is_none() => clash = Some((i, family.len(), s)),
                Some(_) => {}
                None => family.push(s),
            }
        }
        let common: BTreeSet<u32> = family.iter().skip(1).fold(family[0].clone(), |acc, s| &acc & s);
        match helly_common_vertex(&tree, &family) {
            Ok(c) if Some(&c) == common.first() => {}
            other => return fail("helly_common_vertex", format!("{family:?}: {other:?} vs {common:?}")),
        }
        if let Some((_, _, s)) = clash {
            let mut bad = family.clone();
            bad.push(s);
            if !matches!(helly_common_vertex(&tree, &bad), Err(TreeError::NotPairwiseIntersecting(..))) {
                return fail("helly_common_vertex", format!("accepted {bad:?}"));
            }
        }
    }

    // convex hulls
    for _ in 0..6 {
        let s = inst.random_subset(5);
        let mut hull = s.clone();
        for &a in &s {
            for &b in &s {
                if let Some(p) = inst.brute_path(a, b) {
                    hull.extend(p);
                }
            }
        }
        let got = convex_hull(&tree, &s);
        if got != hull {
            return fail("convex_hull", format!("{s:?}: {got:?} vs {hull:?}"));
        }
    }

    // lex-least paths and their suffix property
    for _ in 0..6 {
        let x = inst.vertices()[inst.rng.random_range(0..inst.adj.len())];
        let mut a = inst.random_subset(4);
        if a.is_empty() {
            a.insert(x);
        }
        let colors = |p: &[u32]| -> Vec<u64> { p.windows(2).map(|w| inst.coloring.get(&w[0], &w[1]).unwrap()).collect() };
        let best = a
            .iter()
            .filter_map(|&t| inst.brute_path(x, t))
            .min_by(|p, q| p.len().cmp(&q.len()).then_with(|| colors(p).cmp(&colors(q))));
        let got = lex_least_path(&tree, &inst.coloring, &x, &a);
        match (&best, &got) {
            (None, Err(TreeError::NoPath(_))) => continue,
            (Some(p), Ok(g)) if p == g => {}
            _ => return fail("lex_least_path", format!("{x} -> {a:?}: {got:?} vs {best:?}")),
        }
        let path = best.unwrap();
        let end = *path.last().unwrap();
        let mut b: BTreeSet<u32> = a.iter().copied().filter(|_| inst.rng.random_bool(0.5)).collect();
        b.insert(end);
        for i in 0..path.len() {
            let sub = lex_least_path(&tree, &inst.coloring, &path[i], &b).map_err(|x| x.to_string())?;
            if sub != path[i..] {
                return fail("lex suffix property", format!("{path:?} at {i}, B = {b:?}: {sub:?}"));
            }
        }
    }
    Ok(())
}
