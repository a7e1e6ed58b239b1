//! Discrete delivery grid shared by the MARL learners.
//!
//! Agents move one cell per step (or stay). A move off the grid leaves the
//! agent where it is. Each step an agent that still has work pays
//! `step_penalty`, pays `zone_penalty` if it ends the step on a restricted
//! cell, and earns `delivery_reward_scale · c_j` the first time it ends a
//! step on an undelivered building from its task list. Agents whose tasks
//! are all delivered are parked: they stop moving and receive nothing.

use std::collections::BTreeSet;

use super::StateKey;
use crate::environment::{ensure_valid, Scenario};
use crate::{Error, Point, Result};

/// `(col, row)`.
pub type Cell = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    Up,
    Down,
    Left,
    Right,
    Stay,
}

impl Action {
    pub const ALL: [Action; 5] = [Action::Up, Action::Down, Action::Left, Action::Right, Action::Stay];
    pub const COUNT: usize = 5;

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Action {
        Self::ALL[i]
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Action::Up => "up",
            Action::Down => "down",
            Action::Left => "left",
            Action::Right => "right",
            Action::Stay => "stay",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardConfig {
    pub step_penalty: f64,
    pub zone_penalty: f64,
    pub delivery_reward_scale: f64,
    pub max_steps: usize,
}

impl Default for RewardConfig {
    fn default() -> Self {
        Self {
            step_penalty: 0.1,
            zone_penalty: 5.0,
            delivery_reward_scale: 10.0,
            max_steps: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridBuilding {
    pub cell: Cell,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridState {
    pub cells: Vec<Cell>,
    /// Bit `j` set once building `j` has been delivered.
    pub delivered: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub next: GridState,
    pub rewards: Vec<f64>,
    /// `(agent, building)` pairs delivered during this step.
    pub deliveries: Vec<(usize, usize)>,
    pub zone_hits: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridMdp {
    pub width: usize,
    pub height: usize,
    pub buildings: Vec<GridBuilding>,
    pub zone_cells: BTreeSet<Cell>,
    pub starts: Vec<Cell>,
    /// Buildings each agent is responsible for, ascending.
    pub tasks: Vec<Vec<usize>>,
    pub rewards: RewardConfig,
    task_masks: Vec<u64>,
}

impl GridMdp {
    pub fn new(
        width: usize,
        height: usize,
        buildings: Vec<GridBuilding>,
        zone_cells: BTreeSet<Cell>,
        starts: Vec<Cell>,
        tasks: Vec<Vec<usize>>,
        rewards: RewardConfig,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidConfig("grid must be at least 1×1".into()));
        }
        if buildings.len() > 64 {
            return Err(Error::InvalidConfig(format!(
                "at most 64 buildings fit in a delivery mask, got {}",
                buildings.len()
            )));
        }
        if starts.is_empty() || tasks.len() != starts.len() {
            return Err(Error::InvalidConfig("need one task list per agent".into()));
        }
        if rewards.max_steps == 0 {
            return Err(Error::InvalidConfig("max_steps must be positive".into()));
        }
        let inside = |c: &Cell| c.0 < width && c.1 < height;
        let all_cells = buildings
            .iter()
            .map(|b| b.cell)
            .chain(zone_cells.iter().copied())
            .chain(starts.iter().copied());
        for c in all_cells {
            if !inside(&c) {
                return Err(Error::InvalidConfig(format!(
                    "cell {c:?} outside {width}×{height} grid"
                )));
            }
        }
        for (j, a) in buildings.iter().enumerate() {
            if let Some(k) = buildings[j + 1..].iter().position(|b| b.cell == a.cell) {
                return Err(Error::CellCollision {
                    first: j,
                    second: j + 1 + k,
                    col: a.cell.0,
                    row: a.cell.1,
                });
            }
        }
        let mut task_masks = Vec::with_capacity(tasks.len());
        for list in &tasks {
            let mut m = 0u64;
            for &j in list {
                if j >= buildings.len() {
                    return Err(Error::InvalidConfig(format!("task references missing building {j}")));
                }
                m |= 1 << j;
            }
            task_masks.push(m);
        }
        Ok(Self {
            width,
            height,
            buildings,
            zone_cells,
            starts,
            tasks,
            rewards,
            task_masks,
        })
    }

    pub fn num_agents(&self) -> usize {
        self.starts.len()
    }

    pub fn num_cells(&self) -> usize {
        self.width * self.height
    }

    pub fn cell_index(&self, c: Cell) -> usize {
        c.1 * self.width + c.0
    }

    /// Agents with at least one building to deliver.
    pub fn active_agents(&self) -> Vec<usize> {
        (0..self.num_agents()).filter(|&i| !self.tasks[i].is_empty()).collect()
    }

    pub fn initial_state(&self) -> GridState {
        GridState {
            cells: self.starts.clone(),
            delivered: 0,
        }
    }

    pub fn agent_done(&self, agent: usize, state: &GridState) -> bool {
        state.delivered & self.task_masks[agent] == self.task_masks[agent]
    }

    pub fn is_terminal(&self, state: &GridState) -> bool {
        (0..self.num_agents()).all(|i| self.agent_done(i, state))
    }

    pub fn moved(&self, c: Cell, a: Action) -> Cell {
        match a {
            Action::Up if c.1 + 1 < self.height => (c.0, c.1 + 1),
            Action::Down if c.1 > 0 => (c.0, c.1 - 1),
            Action::Left if c.0 > 0 => (c.0 - 1, c.1),
            Action::Right if c.0 + 1 < self.width => (c.0 + 1, c.1),
            _ => c,
        }
    }

    /// Simultaneous move of all agents. Parked agents ignore their action.
    /// If two agents reach the same undelivered building in one step, the
    /// lower-indexed agent gets the delivery.
    pub fn step(&self, state: &GridState, actions: &[Action]) -> StepOutcome {
        let n = self.num_agents();
        let mut next = state.clone();
        let mut rewards = vec![0.0; n];
        let mut deliveries = Vec::new();
        let mut zone_hits = vec![false; n];
        for i in 0..n {
            if self.agent_done(i, state) {
                continue;
            }
            let c = self.moved(state.cells[i], actions[i]);
            next.cells[i] = c;
            rewards[i] -= self.rewards.step_penalty;
            if self.zone_cells.contains(&c) {
                rewards[i] -= self.rewards.zone_penalty;
                zone_hits[i] = true;
            }
            for &j in &self.tasks[i] {
                if next.delivered & (1 << j) == 0 && self.buildings[j].cell == c {
                    next.delivered |= 1 << j;
                    rewards[i] += self.rewards.delivery_reward_scale * self.buildings[j].cost;
                    deliveries.push((i, j));
                }
            }
        }
        StepOutcome {
            next,
            rewards,
            deliveries,
            zone_hits,
        }
    }

    /// Key of one agent's local view: its cell and the delivery bits of its
    /// own task list.
    pub fn agent_key(&self, agent: usize, state: &GridState) -> StateKey {
        let mut own = 0u128;
        for (k, &j) in self.tasks[agent].iter().enumerate() {
            if state.delivered & (1 << j) != 0 {
                own |= 1 << k;
            }
        }
        let cell = self.cell_index(state.cells[agent]) as u128;
        StateKey(own | (cell << self.tasks[agent].len()))
    }

    /// Key of the full state: every active agent's cell plus the shared
    /// delivery mask.
    pub fn joint_key(&self, state: &GridState) -> Result<StateKey> {
        let radix = self.num_cells() as u128;
        let mut packed: u128 = 0;
        for &i in self.active_agents().iter().rev() {
            packed = packed
                .checked_mul(radix)
                .and_then(|p| p.checked_add(self.cell_index(state.cells[i]) as u128))
                .ok_or_else(|| Error::StateKeyOverflow("joint cell tuple".into()))?;
        }
        let m = self.buildings.len() as u32;
        if packed.leading_zeros() < m {
            return Err(Error::StateKeyOverflow(format!("{m} delivery bits")));
        }
        Ok(StateKey((packed << m) | state.delivered as u128))
    }

    pub fn total_task_cost(&self, agent: usize) -> f64 {
        self.tasks[agent].iter().map(|&j| self.buildings[j].cost).sum()
    }
}

fn to_cell(p: &Point, what: &str) -> Result<Cell> {
    let (x, y) = (p.x.round(), p.y.round());
    if !(x >= 0.0 && y >= 0.0) || !x.is_finite() || !y.is_finite() {
        return Err(Error::OffGrid {
            what: what.to_string(),
            x: p.x,
            y: p.y,
        });
    }
    Ok((x as usize, y as usize))
}

/// Rounds a scenario onto the integer grid. The grid spans `0..=max` of the
/// rounded coordinates in each axis. With `assignment` (building → drone)
/// each agent only delivers its own buildings; without it every agent may
/// deliver every building.
pub fn discretize(scenario: &Scenario, assignment: Option<&[usize]>, rewards: RewardConfig) -> Result<GridMdp> {
    ensure_valid(scenario)?;
    let buildings = scenario
        .buildings
        .iter()
        .enumerate()
        .map(|(j, b)| {
            Ok(GridBuilding {
                cell: to_cell(&b.position, &format!("building {j}"))?,
                cost: b.cost,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let zone_cells = scenario
        .zones
        .iter()
        .enumerate()
        .map(|(k, z)| to_cell(&z.position, &format!("zone {k}")))
        .collect::<Result<BTreeSet<_>>>()?;
    let starts = scenario
        .drone_starts
        .iter()
        .enumerate()
        .map(|(i, p)| to_cell(p, &format!("drone start {i}")))
        .collect::<Result<Vec<_>>>()?;

    let cells = buildings
        .iter()
        .map(|b| b.cell)
        .chain(zone_cells.iter().copied())
        .chain(starts.iter().copied());
    let (mut max_c, mut max_r) = (0, 0);
    for (c, r) in cells {
        max_c = max_c.max(c);
        max_r = max_r.max(r);
    }

    let n = starts.len();
    let tasks = match assignment {
        Some(map) => {
            if map.len() != buildings.len() || map.iter().any(|&d| d >= n) {
                return Err(Error::InvalidConfig(
                    "assignment must map every building to a drone".into(),
                ));
            }
            (0..n)
                .map(|i| (0..map.len()).filter(|&j| map[j] == i).collect())
                .collect()
        }
        None => vec![(0..buildings.len()).collect(); n],
    };
    GridMdp::new(max_c + 1, max_r + 1, buildings, zone_cells, starts, tasks, rewards)
}
