use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::model::{ActionId, FactSet, GroundedModel};

type Bits = Box<[u64]>;

/// `(word, mask)` pairs of a sparse fact set.
type Sparse = Vec<(usize, u64)>;

fn sparse(set: &FactSet) -> Sparse {
    let mut out: Sparse = Vec::new();
    for f in set {
        let (w, b) = (f.index() / 64, 1u64 << (f.index() % 64));
        match out.last_mut() {
            Some((lw, m)) if *lw == w => *m |= b,
            _ => out.push((w, b)),
        }
    }
    out
}

struct Op {
    pre: Sparse,
    add: Sparse,
    del: Sparse,
    cost: u64,
}

/// Bitset view of a model used by the search.
pub(crate) struct Compiled {
    words: usize,
    ops: Vec<Op>,
}

impl Compiled {
    pub(crate) fn new(model: &GroundedModel) -> Self {
        let words = model.num_facts().div_ceil(64).max(1);
        let ops = model
            .actions()
            .iter()
            .map(|a| Op {
                pre: sparse(&a.pre),
                add: sparse(&a.add),
                del: sparse(&a.del),
                cost: u64::from(a.cost),
            })
            .collect();
        Compiled { words, ops }
    }

    pub(crate) fn state(&self, facts: &FactSet) -> Bits {
        let mut s = vec![0u64; self.words].into_boxed_slice();
        for f in facts {
            s[f.index() / 64] |= 1 << (f.index() % 64);
        }
        s
    }

    fn holds(state: &[u64], set: &Sparse) -> bool {
        set.iter().all(|&(w, m)| state[w] & m == m)
    }

    fn successor(&self, state: &[u64], op: &Op) -> Bits {
        let mut next: Bits = state.into();
        for &(w, m) in &op.del {
            next[w] &= !m;
        }
        for &(w, m) in &op.add {
            next[w] |= m;
        }
        next
    }
}

/// What the forward search learned: every state with `g` below the optimal
/// cost is expanded, with its outgoing edges recorded.
struct Explored {
    states: Vec<Bits>,
    is_goal: Vec<bool>,
    edges: Vec<Vec<(ActionId, u32)>>,
    cost: u64,
}

fn explore(c: &Compiled, init: &FactSet, goal: &FactSet, keep_edges: bool) -> Option<Explored> {
    let goal = sparse(goal);
    let start = c.state(init);
    let mut index: HashMap<Bits, u32> = HashMap::new();
    let mut states: Vec<Bits> = Vec::new();
    let mut dist: Vec<u64> = Vec::new();
    let mut is_goal: Vec<bool> = Vec::new();
    let mut edges: Vec<Vec<(ActionId, u32)>> = Vec::new();
    let mut heap = BinaryHeap::new();

    index.insert(start.clone(), 0);
    is_goal.push(Compiled::holds(&start, &goal));
    states.push(start);
    dist.push(0);
    edges.push(Vec::new());
    heap.push(Reverse((0u64, 0u32)));

    while let Some(Reverse((g, id))) = heap.pop() {
        if g > dist[id as usize] {
            continue;
        }
        // States leave the heap in cost order, so every state cheaper than
        // the first goal has already been expanded.
        if is_goal[id as usize] {
            return Some(Explored {
                states,
                is_goal,
                edges,
                cost: g,
            });
        }
        for (a, op) in c.ops.iter().enumerate() {
            if !Compiled::holds(&states[id as usize], &op.pre) {
                continue;
            }
            let next = c.successor(&states[id as usize], op);
            let ng = g + op.cost;
            let nid = match index.get(&next) {
                Some(&n) => {
                    if ng < dist[n as usize] {
                        dist[n as usize] = ng;
                        heap.push(Reverse((ng, n)));
                    }
                    n
                }
                None => {
                    let n = states.len() as u32;
                    index.insert(next.clone(), n);
                    is_goal.push(Compiled::holds(&next, &goal));
                    states.push(next);
                    dist.push(ng);
                    edges.push(Vec::new());
                    heap.push(Reverse((ng, n)));
                    n
                }
            };
            if keep_edges {
                edges[id as usize].push((ActionId(a as u32), nid));
            }
        }
    }
    None
}

/// Optimal plan cost, or `None` when the goal is unreachable.
pub(crate) fn optimal_cost(c: &Compiled, init: &FactSet, goal: &FactSet) -> Option<u64> {
    explore(c, init, goal, false).map(|e| e.cost)
}

/// Lexicographically smallest (by action id) plan among all optimal plans.
pub(crate) fn optimal_plan(c: &Compiled, init: &FactSet, goal: &FactSet) -> Option<(Vec<ActionId>, u64)> {
    let ex = explore(c, init, goal, true)?;
    let n = ex.states.len();

    // Exact cost-to-go over the explored graph, by Dijkstra on reversed edges.
    let mut reverse: Vec<Vec<(u32, u64)>> = vec![Vec::new(); n];
    for (u, out) in ex.edges.iter().enumerate() {
        for &(a, v) in out {
            reverse[v as usize].push((u as u32, c.ops[a.index()].cost));
        }
    }
    let mut h = vec![u64::MAX; n];
    let mut heap = BinaryHeap::new();
    for (s, &goal) in ex.is_goal.iter().enumerate() {
        if goal {
            h[s] = 0;
            heap.push(Reverse((0u64, s as u32)));
        }
    }
    while let Some(Reverse((d, v))) = heap.pop() {
        if d > h[v as usize] {
            continue;
        }
        for &(u, w) in &reverse[v as usize] {
            let nd = d + w;
            if nd < h[u as usize] {
                h[u as usize] = nd;
                heap.push(Reverse((nd, u)));
            }
        }
    }
    debug_assert_eq!(h[0], ex.cost);

    // Greedy descent: at each state take the smallest action id that stays
    // on some optimal path. Edges are recorded in ascending action order.
    let mut plan = Vec::new();
    let mut s = 0usize;
    while h[s] > 0 {
        let &(a, v) = ex.edges[s]
            .iter()
            .find(|&&(a, v)| h[v as usize] != u64::MAX && c.ops[a.index()].cost + h[v as usize] == h[s])
            .expect("an optimal successor exists on the explored graph");
        plan.push(a);
        s = v as usize;
    }
    Some((plan, ex.cost))
}
