//! Directed communication graphs and max/submax agreement.
//!
//! An arc `(j, i)` means `j` sends to `i`; neighborhoods are in-neighbor
//! sets plus the node itself. The agreement subroutine propagates, per
//! node, an estimate of the network's largest value (settling within
//! `diameter` rounds) and of the largest strictly-smaller value (within
//! `2 * diameter` rounds).

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};

/// Node identifier, `1..=n` (nodes are agents).
pub type NodeId = usize;

/// Directed graph over nodes `1..=n`. Self-loops are never stored; a node
/// always hears itself through the closed neighborhood.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    nodes: usize,
    arcs: BTreeSet<(NodeId, NodeId)>,
}

impl DirectedGraph {
    /// Build from an arc list. Arcs must reference nodes in `1..=nodes`;
    /// self-loops are dropped (self-communication is implicit).
    pub fn new(nodes: usize, arcs: impl IntoIterator<Item = (NodeId, NodeId)>) -> Result<Self> {
        if nodes == 0 {
            return Err(Error::EmptyDimension { agents: 0, tasks: 0 });
        }
        let mut set = BTreeSet::new();
        for (from, to) in arcs {
            for id in [from, to] {
                if id == 0 || id > nodes {
                    return Err(Error::InvalidNode { id, max: nodes });
                }
            }
            if from != to {
                set.insert((from, to));
            }
        }
        Ok(Self { nodes, arcs: set })
    }

    /// Directed cycle `1 -> 2 -> ... -> n -> 1`.
    pub fn cycle(nodes: usize) -> Result<Self> {
        Self::new(nodes, (1..=nodes).map(|i| (i, i % nodes + 1)))
    }

    /// All ordered pairs of distinct nodes.
    pub fn complete(nodes: usize) -> Result<Self> {
        let arcs = (1..=nodes)
            .flat_map(|i| (1..=nodes).filter(move |&j| j != i).map(move |j| (i, j)))
            .collect::<Vec<_>>();
        Self::new(nodes, arcs)
    }

    /// Bidirectional path `1 <-> 2 <-> ... <-> n`.
    pub fn line(nodes: usize) -> Result<Self> {
        let arcs = (1..nodes)
            .flat_map(|i| [(i, i + 1), (i + 1, i)])
            .collect::<Vec<_>>();
        Self::new(nodes, arcs)
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.arcs.iter().copied()
    }

    fn check_node(&self, id: NodeId) -> Result<()> {
        if id == 0 || id > self.nodes {
            return Err(Error::InvalidNode {
                id,
                max: self.nodes,
            });
        }
        Ok(())
    }

    /// Nodes that send to `node`.
    pub fn in_neighbors(&self, node: NodeId) -> Result<BTreeSet<NodeId>> {
        self.check_node(node)?;
        Ok(self
            .arcs
            .iter()
            .filter(|&&(_, to)| to == node)
            .map(|&(from, _)| from)
            .collect())
    }

    /// In-neighbors plus the node itself.
    pub fn closed_in_neighbors(&self, node: NodeId) -> Result<BTreeSet<NodeId>> {
        let mut set = self.in_neighbors(node)?;
        set.insert(node);
        Ok(set)
    }

    fn out_neighbors(&self, node: NodeId) -> Vec<NodeId> {
        self.arcs
            .iter()
            .filter(|&&(from, _)| from == node)
            .map(|&(_, to)| to)
            .collect()
    }

    /// Forward BFS distances from `start` (`usize::MAX` for unreachable).
    fn distances_from(&self, start: NodeId) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.nodes];
        dist[start - 1] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(node) = queue.pop_front() {
            for next in self.out_neighbors(node) {
                if dist[next - 1] == usize::MAX {
                    dist[next - 1] = dist[node - 1] + 1;
                    queue.push_back(next);
                }
            }
        }
        dist
    }

    /// True when every node reaches every other node along directed paths.
    pub fn is_strongly_connected(&self) -> bool {
        (1..=self.nodes).all(|start| {
            self.distances_from(start)
                .iter()
                .all(|&d| d != usize::MAX)
        })
    }

    /// Longest shortest directed path over ordered node pairs; 0 for a
    /// single node. Errors when the graph is not strongly connected.
    pub fn diameter(&self) -> Result<usize> {
        let mut best = 0;
        for start in 1..=self.nodes {
            for &d in &self.distances_from(start) {
                if d == usize::MAX {
                    return Err(Error::NotStronglyConnected);
                }
                best = best.max(d);
            }
        }
        Ok(best)
    }
}

/// Largest value of a nonempty collection that is strictly smaller than the
/// maximum. When every value equals the maximum the common value itself is
/// returned, which keeps the agreement dynamics neutral in all-tied
/// transients.
pub fn submax_of(values: &[f64]) -> Result<f64> {
    let max = values
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    if values.is_empty() || !max.is_finite() {
        return Err(Error::EmptyValues);
    }
    let below = values
        .iter()
        .copied()
        .filter(|&v| v < max)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(if below.is_finite() { below } else { max })
}

/// Per-node estimates of the network's largest and second-largest values.
#[derive(Debug, Clone, PartialEq)]
pub struct AgreementState {
    pub max_estimate: Vec<f64>,
    pub submax_estimate: Vec<f64>,
    pub round: usize,
}

impl AgreementState {
    /// Every node starts believing its own value is both estimates.
    pub fn init(values: &[f64]) -> Self {
        Self {
            max_estimate: values.to_vec(),
            submax_estimate: values.to_vec(),
            round: 0,
        }
    }
}

/// One synchronous agreement round: each node takes the max of its closed
/// neighborhood's max estimates, and the submax of the neighborhood's
/// submax estimates together with its freshly aggregated max and its own
/// value.
///
/// The submax pool must see the round's new max, not the stale one: a node
/// holding the network's second-largest value would otherwise discard it as
/// its apparent local maximum until the true maximum arrives, which delays
/// settling beyond twice the diameter on some graphs.
pub fn agreement_round(
    graph: &DirectedGraph,
    state: &AgreementState,
    values: &[f64],
) -> Result<AgreementState> {
    let n = graph.node_count();
    if state.max_estimate.len() != n || state.submax_estimate.len() != n || values.len() != n {
        return Err(Error::SizeMismatch {
            expected_rows: n,
            expected_cols: 1,
            rows: values.len(),
            cols: 1,
        });
    }
    let mut max_next = vec![0.0; n];
    let mut submax_next = vec![0.0; n];
    for node in 1..=n {
        let hood = graph.closed_in_neighbors(node)?;
        let fresh_max = hood
            .iter()
            .map(|&j| state.max_estimate[j - 1])
            .fold(f64::NEG_INFINITY, f64::max);
        max_next[node - 1] = fresh_max;
        let mut pool: Vec<f64> = hood.iter().map(|&j| state.submax_estimate[j - 1]).collect();
        pool.push(fresh_max);
        pool.push(values[node - 1]);
        submax_next[node - 1] = submax_of(&pool)?;
    }
    Ok(AgreementState {
        max_estimate: max_next,
        submax_estimate: submax_next,
        round: state.round + 1,
    })
}

/// Run agreement for `rounds` rounds from the standard initialization.
/// Requires strong connectivity so the deadline guarantees apply: the max
/// estimates settle by `diameter` rounds and the submax estimates by twice
/// that.
pub fn run_agreement(
    graph: &DirectedGraph,
    values: &[f64],
    rounds: usize,
) -> Result<AgreementState> {
    if !graph.is_strongly_connected() {
        return Err(Error::NotStronglyConnected);
    }
    let mut state = AgreementState::init(values);
    for _ in 0..rounds {
        state = agreement_round(graph, &state, values)?;
    }
    if cfg!(debug_assertions) {
        let d = graph.diameter()?;
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sub = submax_of(values)?;
        if rounds >= d {
            debug_assert!(state.max_estimate.iter().all(|&v| v == max));
        }
        if rounds >= 2 * d {
            debug_assert!(state.submax_estimate.iter().all(|&v| v == sub));
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn in_neighbors_follow_arc_direction() {
        let g = DirectedGraph::new(3, [(1, 2), (2, 3), (3, 1)]).unwrap();
        assert_eq!(g.in_neighbors(2).unwrap(), BTreeSet::from([1]));
        assert_eq!(g.closed_in_neighbors(2).unwrap(), BTreeSet::from([1, 2]));

        let complete = DirectedGraph::complete(3).unwrap();
        assert_eq!(complete.in_neighbors(1).unwrap(), BTreeSet::from([2, 3]));

        let empty = DirectedGraph::new(2, []).unwrap();
        assert!(empty.in_neighbors(1).unwrap().is_empty());
        assert!(g.in_neighbors(4).is_err());
    }

    #[test]
    fn self_loops_are_dropped() {
        let g = DirectedGraph::new(2, [(1, 1), (1, 2), (2, 1)]).unwrap();
        assert_eq!(g.arc_count(), 2);
    }

    #[test]
    fn strong_connectivity() {
        assert!(DirectedGraph::cycle(4).unwrap().is_strongly_connected());
        let split = DirectedGraph::new(3, [(1, 2), (2, 1)]).unwrap();
        assert!(!split.is_strongly_connected());
        assert!(DirectedGraph::new(1, []).unwrap().is_strongly_connected());
    }

    #[test]
    fn diameter_examples() {
        assert_eq!(DirectedGraph::cycle(4).unwrap().diameter().unwrap(), 3);
        assert_eq!(DirectedGraph::complete(3).unwrap().diameter().unwrap(), 1);
        assert_eq!(DirectedGraph::line(2).unwrap().diameter().unwrap(), 1);
        assert_eq!(DirectedGraph::new(1, []).unwrap().diameter().unwrap(), 0);
        assert!(DirectedGraph::new(3, [(1, 2), (2, 1)])
            .unwrap()
            .diameter()
            .is_err());
    }

    #[test]
    fn submax_picks_largest_below_max() {
        assert_eq!(submax_of(&[5.0, 7.0, 7.0, 3.0]).unwrap(), 5.0);
        assert_eq!(submax_of(&[4.0, 4.0, 4.0]).unwrap(), 4.0);
        assert_eq!(submax_of(&[1.0, 2.0]).unwrap(), 1.0);
        assert!(submax_of(&[]).is_err());
    }

    #[test]
    fn two_node_agreement_settles_in_one_round() {
        let g = DirectedGraph::complete(2).unwrap();
        let v = [5.0, 7.0];
        let state = agreement_round(&g, &AgreementState::init(&v), &v).unwrap();
        assert_eq!(state.max_estimate, vec![7.0, 7.0]);
        assert_eq!(state.submax_estimate, vec![5.0, 5.0]);
    }

    #[test]
    fn single_node_is_frozen() {
        let g = DirectedGraph::new(1, []).unwrap();
        let v = [3.5];
        let mut state = AgreementState::init(&v);
        for _ in 0..5 {
            state = agreement_round(&g, &state, &v).unwrap();
            assert_eq!(state.max_estimate, vec![3.5]);
            assert_eq!(state.submax_estimate, vec![3.5]);
        }
    }

    #[test]
    fn three_cycle_meets_both_deadlines() {
        let g = DirectedGraph::cycle(3).unwrap();
        let v = [9.0, 1.0, 2.0];
        let mut state = AgreementState::init(&v);
        for _ in 0..2 {
            state = agreement_round(&g, &state, &v).unwrap();
        }
        // Max everywhere by the diameter.
        assert_eq!(state.max_estimate, vec![9.0, 9.0, 9.0]);
        for _ in 0..2 {
            state = agreement_round(&g, &state, &v).unwrap();
        }
        // Submax everywhere by twice the diameter.
        assert_eq!(state.submax_estimate, vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn constant_values_stay_put() {
        let g = DirectedGraph::cycle(4).unwrap();
        let v = [2.0; 4];
        let state = run_agreement(&g, &v, 8).unwrap();
        assert_eq!(state.max_estimate, vec![2.0; 4]);
        assert_eq!(state.submax_estimate, vec![2.0; 4]);
    }

    #[test]
    fn four_cycle_arc_list_runs_to_agreement() {
        let g = DirectedGraph::new(4, [(1, 2), (2, 3), (3, 4), (4, 1)]).unwrap();
        assert_eq!(g.diameter().unwrap(), 3);
        let v = [0.4, 0.9, 0.1, 0.6];
        let state = run_agreement(&g, &v, 6).unwrap();
        assert!(state.max_estimate.iter().all(|&x| x == 0.9));
        assert!(state.submax_estimate.iter().all(|&x| x == 0.6));
    }

    #[test]
    fn repeated_maxima_resolve_to_distinct_submax() {
        let g = DirectedGraph::complete(3).unwrap();
        let v = [7.0, 7.0, 5.0];
        let state = run_agreement(&g, &v, 2).unwrap();
        assert!(state.submax_estimate.iter().all(|&x| x == 5.0));
    }

    #[test]
    fn run_agreement_requires_strong_connectivity() {
        let g = DirectedGraph::new(3, [(1, 2), (2, 1)]).unwrap();
        assert!(matches!(
            run_agreement(&g, &[1.0, 2.0, 3.0], 4),
            Err(Error::NotStronglyConnected)
        ));
    }

    #[test]
    fn max_estimates_are_monotone_and_bounded() {
        let g = DirectedGraph::cycle(5).unwrap();
        let v = [0.3, 0.8, 0.1, 0.9, 0.5];
        let top = 0.9;
        let mut state = AgreementState::init(&v);
        for _ in 0..10 {
            let next = agreement_round(&g, &state, &v).unwrap();
            for i in 0..5 {
                assert!(next.max_estimate[i] >= state.max_estimate[i]);
                assert!(next.max_estimate[i] <= top);
            }
            state = next;
        }
    }
}
