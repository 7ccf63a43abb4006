/// Binary indexed tree over non-negative weights, 1-based.
///
/// Supports point updates, prefix sums and inverse-CDF search in `O(log n)`.
#[derive(Debug, Clone)]
pub struct Fenwick {
    tree: Vec<f64>,
    values: Vec<f64>,
    top_bit: usize,
}

impl Fenwick {
    pub fn new(len: usize) -> Self {
        let top_bit = if len == 0 {
            0
        } else {
            1 << (usize::BITS - 1 - len.leading_zeros())
        };
        Fenwick {
            tree: vec![0.0; len + 1],
            values: vec![0.0; len + 1],
            top_bit,
        }
    }

    pub fn len(&self) -> usize {
        self.tree.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn add(&mut self, index: usize, delta: f64) {
        debug_assert!(index >= 1 && index <= self.len());
        self.values[index] += delta;
        let mut i = index;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    pub fn set(&mut self, index: usize, value: f64) {
        let delta = value - self.values[index];
        if delta != 0.0 {
            self.add(index, delta);
        }
    }

    /// Current weight at `index`.
    pub fn get(&self, index: usize) -> f64 {
        self.values[index]
    }

    /// Sum of weights `1..=index`.
    pub fn prefix(&self, index: usize) -> f64 {
        let mut i = index.min(self.len());
        let mut s = 0.0;
        while i > 0 {
            s += self.tree[i];
            i &= i - 1;
        }
        s
    }

    /// Smallest `i` with `prefix(i) > target`, or `len() + 1` if none.
    pub fn search(&self, mut target: f64) -> usize {
        let mut pos = 0;
        let mut step = self.top_bit;
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= target {
                pos = next;
                target -= self.tree[next];
            }
            step >>= 1;
        }
        pos + 1
    }
}
