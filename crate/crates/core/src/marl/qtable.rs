use std::collections::HashMap;

/// Packed state identifier (cell indices and delivery bits in mixed radix).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateKey(pub u128);

/// Sparse action-value table. Rows are created on first write; reads of
/// unseen states return `default_value` and leave the table untouched.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    rows: HashMap<StateKey, Vec<f64>>,
    num_actions: usize,
    default_value: f64,
}

impl QTable {
    pub fn new(num_actions: usize, default_value: f64) -> Self {
        Self {
            rows: HashMap::new(),
            num_actions,
            default_value,
        }
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn default_value(&self) -> f64 {
        self.default_value
    }

    /// Number of stored states.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, state: StateKey, action: usize) -> f64 {
        self.rows.get(&state).map_or(self.default_value, |row| row[action])
    }

    pub fn set(&mut self, state: StateKey, action: usize, value: f64) {
        let (n, d) = (self.num_actions, self.default_value);
        self.rows.entry(state).or_insert_with(|| vec![d; n])[action] = value;
    }

    pub fn max(&self, state: StateKey) -> f64 {
        match self.rows.get(&state) {
            Some(row) => row.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            None => self.default_value,
        }
    }

    /// Highest-valued action; ties go to the lowest index.
    pub fn argmax(&self, state: StateKey) -> usize {
        let Some(row) = self.rows.get(&state) else {
            return 0;
        };
        let mut best = 0;
        for (a, v) in row.iter().enumerate().skip(1) {
            if *v > row[best] {
                best = a;
            }
        }
        best
    }

    /// Stored entries sorted by state key.
    pub fn entries(&self) -> Vec<(StateKey, &[f64])> {
        let mut out: Vec<_> = self.rows.iter().map(|(k, v)| (*k, v.as_slice())).collect();
        out.sort_by_key(|(k, _)| *k);
        out
    }
}
