use std::collections::BTreeMap;

use crate::canonical::{q_matrix, CanonicalTree};
use crate::error::{invalid, Error, Result};
use crate::kernels::AttachmentKernel;
use crate::scalar::Scalar;

/// `W(t) = sum_v f(c_v + 1)`, the total rate at which a tree of shape `t`
/// gains a vertex in the branching process (`c_v` is the child count of `v`).
pub fn tree_weight<T: Scalar>(tree: &CanonicalTree, kernel: &AttachmentKernel<T>) -> T {
    tree.child_counts()[1..]
        .iter()
        .fold(T::zero(), |acc, &c| acc + kernel.weight(c + 1))
}

/// Limiting fringe probabilities `varpi(t)` for every shape up to a size cap.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeTable<T> {
    entries: BTreeMap<CanonicalTree, T>,
    size_cap: usize,
    lambda_star: T,
}

impl<T: Scalar> FringeTable<T> {
    pub fn get(&self, tree: &CanonicalTree) -> Option<&T> {
        self.entries.get(tree)
    }

    pub fn size_cap(&self) -> usize {
        self.size_cap
    }

    pub fn lambda_star(&self) -> &T {
        &self.lambda_star
    }

    /// Entries by size, then code.
    pub fn iter(&self) -> impl Iterator<Item = (&CanonicalTree, &T)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total mass on shapes of size `<= cap`.
    pub fn total_mass(&self) -> T {
        self.entries.values().fold(T::zero(), |a, b| a + b.clone())
    }

    /// Mass on shapes whose root has exactly `children` children.
    pub fn root_degree_mass(&self, children: usize) -> T {
        self.entries
            .iter()
            .filter(|(t, _)| t.root_degree() == children)
            .fold(T::zero(), |a, (_, p)| a + p.clone())
    }
}

/// Build the fringe table bottom-up.
///
/// The singleton gets `lambda / (lambda + f(1))`. A larger shape `t` collects,
/// from every shape `s` one vertex smaller and every vertex `u` of `s` whose
/// extension by a leaf is `t`, the flow `varpi(s) f(c_u(s) + 1)`; the total is
/// divided by `lambda + W(t)`.
pub fn fringe_recursion<T: Scalar>(
    size_cap: usize,
    kernel: &AttachmentKernel<T>,
    lambda_star: T,
) -> Result<FringeTable<T>> {
    if size_cap == 0 {
        return invalid("fringe size cap must be >= 1");
    }
    if !(lambda_star > T::zero()) {
        return invalid("lambda_star must be > 0");
    }
    let mut entries = BTreeMap::new();
    let singleton = CanonicalTree::singleton();
    let boundary = lambda_star.clone() / (lambda_star.clone() + kernel.weight(1));
    entries.insert(singleton.clone(), boundary);
    let mut previous = vec![singleton];
    for _ in 2..=size_cap {
        let mut inflow: BTreeMap<CanonicalTree, T> = BTreeMap::new();
        for s in &previous {
            let ps = entries[s].clone();
            let counts = s.child_counts();
            for (u, t) in s.leaf_extensions().into_iter().enumerate() {
                let flow = ps.clone() * kernel.weight(counts[u + 1] + 1);
                let slot = inflow.entry(t).or_insert_with(T::zero);
                *slot = slot.clone() + flow;
            }
        }
        previous = inflow.keys().cloned().collect();
        for (t, flow) in inflow {
            let denom = lambda_star.clone() + tree_weight(&t, kernel);
            entries.insert(t, flow / denom);
        }
    }
    Ok(FringeTable {
        entries,
        size_cap,
        lambda_star,
    })
}

/// `varpi(t)` straight from its definition as a sum over birth orders.
///
/// Every recursive tree on `|t|` vertices (every parent sequence with
/// `parent(j) < j`) is one history of the branching process. Its probability
/// of being the state at an independent `Exp(lambda)` time is the product of
/// the jump factors `f(c_parent + 1) / (lambda + W)` along the way times the
/// stopping factor `lambda / (lambda + W(final))`. The histories ending in
/// shape `t` are summed.
pub fn fringe_bruteforce<T: Scalar>(
    tree: &CanonicalTree,
    kernel: &AttachmentKernel<T>,
    lambda_star: T,
    size_cap: usize,
) -> Result<T> {
    let n = tree.size();
    if n > size_cap {
        return invalid(format!(
            "tree of size {n} exceeds the brute-force cap {size_cap}"
        ));
    }
    if !(lambda_star > T::zero()) {
        return invalid("lambda_star must be > 0");
    }
    let mut total = T::zero();
    let mut parents = vec![0usize; n - 1];
    let mut children = vec![0usize; n + 1];
    walk(
        tree,
        kernel,
        &lambda_star,
        &mut parents,
        &mut children,
        0,
        T::one(),
        kernel.weight(1),
        &mut total,
    );
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn walk<T: Scalar>(
    target: &CanonicalTree,
    kernel: &AttachmentKernel<T>,
    lambda: &T,
    parents: &mut Vec<usize>,
    children: &mut Vec<usize>,
    depth: usize,
    weight: T,
    w: T,
    total: &mut T,
) {
    if depth == parents.len() {
        let stop = lambda.clone() / (lambda.clone() + w);
        if CanonicalTree::from_parents(parents).is_ok_and(|t| &t == target) {
            *total = total.clone() + weight * stop;
        }
        return;
    }
    let vertices = depth + 1;
    for p in 1..=vertices {
        let c = children[p];
        let rate = kernel.weight(c + 1);
        let jump = rate / (lambda.clone() + w.clone());
        let next_w = w.clone() - kernel.weight(c + 1) + kernel.weight(c + 2) + kernel.weight(1);
        parents[depth] = p;
        children[p] += 1;
        walk(
            target,
            kernel,
            lambda,
            parents,
            children,
            depth + 1,
            weight.clone() * jump,
            next_w,
            total,
        );
        children[p] -= 1;
    }
}

/// `p_k = lambda / (lambda + f(k)) * prod_{j<k} f(j) / (lambda + f(j))` for
/// `k = 1..=k_max`.
pub fn degree_law<T: Scalar>(kernel: &AttachmentKernel<T>, lambda_star: T, k_max: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(k_max);
    let mut product = T::one();
    for k in 1..=k_max {
        let fk = kernel.weight(k);
        let denom = lambda_star.clone() + fk.clone();
        out.push(product.clone() * lambda_star.clone() / denom.clone());
        product = product * fk / denom;
    }
    out
}

/// `prod_{j<=k} f(j) / (lambda + f(j))`, the limiting fraction of vertices of
/// degree above `k`.
pub fn survival_product<T: Scalar>(kernel: &AttachmentKernel<T>, lambda_star: T, k: usize) -> T {
    (1..=k).fold(T::one(), |acc, j| {
        let fj = kernel.weight(j);
        acc * fj.clone() / (lambda_star.clone() + fj)
    })
}

/// Extended-fringe law truncated at distance `depth`.
///
/// Keys are `[t0]` for depth 0 and `[t0, t1]` for depth 1, where `t0` is the
/// fringe of a uniform vertex and `t1` that of its parent; the mass is
/// `varpi(t1) Q(t1, t0)`. Only shapes inside the table's cap appear.
pub fn extended_fringe_law<T: Scalar>(
    table: &FringeTable<T>,
    depth: usize,
) -> Result<BTreeMap<Vec<CanonicalTree>, T>> {
    let mut out = BTreeMap::new();
    match depth {
        0 => {
            for (t, p) in table.iter() {
                out.insert(vec![t.clone()], p.clone());
            }
        }
        1 => {
            for (t1, p) in table.iter() {
                let mut seen: Vec<CanonicalTree> = t1.root_children();
                seen.dedup();
                for t0 in seen {
                    let q = q_matrix(t1, &t0);
                    out.insert(vec![t0, t1.clone()], p.clone() * T::from_usize_exact(q));
                }
            }
        }
        d => {
            return Err(Error::Unsupported(format!(
                "extended fringe depth {d}; only 0 and 1 are tabulated"
            )));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn boundary_and_path() {
        let k = AttachmentKernel::<f64>::affine(0.0).unwrap();
        let table = fringe_recursion(3, &k, 2.0).unwrap();
        assert!((table.get(&CanonicalTree::singleton()).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((table.get(&CanonicalTree::path(2)).unwrap() - 2.0 / 15.0).abs() < 1e-15);
        let u = fringe_recursion(1, &AttachmentKernel::<f64>::uniform(), 1.0).unwrap();
        assert_eq!(*u.get(&CanonicalTree::singleton()).unwrap(), 0.5);
    }

    #[test]
    fn exact_small_values() {
        // hand evaluation at alpha = 0, lambda = 2:
        // path3: (2/15) * f(1) / (2 + W) with W = f(2)+f(2)+f(1) = 5 -> 2/105
        // star3: (2/15) * f(2) / (2 + W) with W = f(3)+f(1)+f(1) = 5 -> 4/105
        let k = AttachmentKernel::affine(rat(0, 1)).unwrap();
        let table = fringe_recursion(3, &k, rat(2, 1)).unwrap();
        assert_eq!(table.get(&CanonicalTree::path(3)).unwrap(), &rat(2, 105));
        assert_eq!(table.get(&CanonicalTree::star(3)).unwrap(), &rat(4, 105));
        let bf = fringe_bruteforce(&CanonicalTree::star(3), &k, rat(2, 1), 6).unwrap();
        assert_eq!(bf, rat(4, 105));
    }

    #[test]
    fn bruteforce_cap() {
        let k = AttachmentKernel::<f64>::uniform();
        assert!(fringe_bruteforce(&CanonicalTree::path(7), &k, 1.0, 6).is_err());
    }

    #[test]
    fn mass_increases_with_cap() {
        let k = AttachmentKernel::<f64>::affine(0.0).unwrap();
        let mut prev = 0.0;
        for cap in 1..=7 {
            let m = fringe_recursion(cap, &k, 2.0).unwrap().total_mass();
            assert!(m > prev && m < 1.0);
            prev = m;
        }
    }

    #[test]
    fn size_marginal_matches_degree_of_root_process() {
        // uniform kernel: the root-size process is a Yule process killed at rate 1,
        // so P(size = k) = 1/(k(k+1)) by the same product formula as p_k for f(k) = k.
        let k = AttachmentKernel::<f64>::uniform();
        let t = fringe_recursion(6, &k, 1.0).unwrap();
        for size in 1..=6 {
            let mass: f64 = t
                .iter()
                .filter(|(s, _)| s.size() == size)
                .map(|(_, p)| p)
                .sum();
            assert!((mass - 1.0 / (size * (size + 1)) as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn degree_law_examples() {
        let a0 = degree_law(&AttachmentKernel::<f64>::affine(0.0).unwrap(), 2.0, 50);
        for (i, p) in a0.iter().enumerate() {
            let k = (i + 1) as f64;
            assert!((p - 4.0 / (k * (k + 1.0) * (k + 2.0))).abs() < 1e-15);
        }
        let a1 = degree_law(&AttachmentKernel::affine(rat(1, 1)).unwrap(), rat(3, 1), 1);
        assert_eq!(a1[0], rat(3, 5));
        let u = degree_law(&AttachmentKernel::<f64>::uniform(), 1.0, 10);
        for (i, p) in u.iter().enumerate() {
            assert_eq!(*p, 0.5f64.powi(i as i32 + 1));
        }
    }

    #[test]
    fn telescoping() {
        let k = AttachmentKernel::affine(rat(1, 2)).unwrap();
        let lambda = rat(5, 2);
        let law = degree_law(&k, lambda.clone(), 40);
        let total = law.iter().fold(rat(0, 1), |a, b| a + b) + survival_product(&k, lambda, 40);
        assert_eq!(total, rat(1, 1));
    }

    #[test]
    fn extended_law_examples() {
        let k = AttachmentKernel::<f64>::affine(0.0).unwrap();
        let table = fringe_recursion(4, &k, 2.0).unwrap();
        let d0 = extended_fringe_law(&table, 0).unwrap();
        assert_eq!(d0.len(), table.len());
        let d1 = extended_fringe_law(&table, 1).unwrap();
        let leaf = CanonicalTree::singleton();
        let star = CanonicalTree::star(3);
        assert_eq!(
            d1[&vec![leaf.clone(), star.clone()]],
            2.0 * table.get(&star).unwrap()
        );
        assert!(!d1.contains_key(&vec![leaf.clone(), leaf.clone()]));
        assert!(extended_fringe_law(&table, 2).is_err());
    }
}
