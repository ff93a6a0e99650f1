//! Range-limited communication graph between agents and the monitor.

use std::collections::VecDeque;

use crate::{AgentId, Vec3};

#[derive(Debug, Clone, PartialEq)]
pub struct CommGraph {
    pub t: f64,
    pub ids: Vec<AgentId>,
    /// `adjacency[i][j]` for agents `ids[i]`, `ids[j]`.
    pub adjacency: Vec<Vec<bool>>,
    /// Direct link between each agent and the monitor.
    pub monitor_link: Vec<bool>,
}

impl CommGraph {
    /// Links every pair within `radius` of each other.
    pub fn build(t: f64, agents: &[(AgentId, Vec3)], radius: f64, monitor_position: Vec3) -> Self {
        let n = agents.len();
        let mut adjacency = vec![vec![false; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let linked = (agents[i].1 - agents[j].1).norm() <= radius;
                adjacency[i][j] = linked;
                adjacency[j][i] = linked;
            }
        }
        Self {
            t,
            ids: agents.iter().map(|a| a.0).collect(),
            adjacency,
            monitor_link: agents
                .iter()
                .map(|a| (a.1 - monitor_position).norm() <= radius)
                .collect(),
        }
    }

    pub fn edge(&self, a: AgentId, b: AgentId) -> bool {
        match (self.index(a), self.index(b)) {
            (Some(i), Some(j)) => self.adjacency[i][j],
            _ => false,
        }
    }

    fn index(&self, a: AgentId) -> Option<usize> {
        self.ids.iter().position(|&id| id == a)
    }

    /// Agents with a (possibly multi-hop) path to the monitor, in `ids` order.
    pub fn connected_to_monitor(&self) -> Vec<bool> {
        let n = self.ids.len();
        let mut seen = self.monitor_link.clone();
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| seen[i]).collect();
        while let Some(i) = queue.pop_front() {
            for (j, &linked) in self.adjacency[i].iter().enumerate() {
                if linked && !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        seen
    }
}
