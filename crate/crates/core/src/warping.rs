//! Warping paths, warping walks and warping functions.
//!
//! Indices are stored zero-based. `Display` output and the CLI use the
//! one-based `(i,j)` convention.
//!
//! A warping matrix is never materialized: it is represented by its warping
//! function, and multiplying the matrix with a series is an index gather.

use std::fmt;

use crate::error::{Error, Result};
use crate::words;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridPoint {
    pub i: usize,
    pub j: usize,
}

impl GridPoint {
    pub const fn new(i: usize, j: usize) -> Self {
        GridPoint { i, j }
    }

    /// Builds a point from one-based coordinates.
    pub fn one_based(i: usize, j: usize) -> Result<Self> {
        if i == 0 || j == 0 {
            return Err(Error::invalid("one-based grid coordinates must be >= 1"));
        }
        Ok(GridPoint { i: i - 1, j: j - 1 })
    }
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i + 1, self.j + 1)
    }
}

fn is_step(from: GridPoint, to: GridPoint, allow_zero: bool) -> bool {
    let di = to.i.wrapping_sub(from.i);
    let dj = to.j.wrapping_sub(from.j);
    di <= 1 && dj <= 1 && (allow_zero || di + dj > 0)
}

fn check_grid(points: &[GridPoint], m: usize, n: usize, allow_zero: bool) -> bool {
    if m == 0 || n == 0 {
        return false;
    }
    match (points.first(), points.last()) {
        (Some(&first), Some(&last)) => {
            first == GridPoint::new(0, 0)
                && last == GridPoint::new(m - 1, n - 1)
                && points.windows(2).all(|w| is_step(w[0], w[1], allow_zero))
        }
        _ => false,
    }
}

/// Boundary condition plus steps in `{(1,0),(0,1),(1,1)}`.
pub fn validate_path(points: &[GridPoint], m: usize, n: usize) -> bool {
    check_grid(points, m, n, false)
}

/// Boundary condition plus steps in `{0,1} x {0,1}`.
pub fn validate_walk(points: &[GridPoint], m: usize, n: usize) -> bool {
    check_grid(points, m, n, true)
}

/// Common view of paths and walks through an `m x n` grid.
pub trait GridWalk {
    fn order(&self) -> (usize, usize);
    fn points(&self) -> &[GridPoint];

    fn len(&self) -> usize {
        self.points().len()
    }

    fn is_empty(&self) -> bool {
        self.points().is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WarpingPath {
    m: usize,
    n: usize,
    points: Vec<GridPoint>,
}

impl WarpingPath {
    pub fn new(m: usize, n: usize, points: Vec<GridPoint>) -> Result<Self> {
        if !validate_path(&points, m, n) {
            return Err(Error::invalid(format!("not a warping path of order {m}x{n}")));
        }
        Ok(WarpingPath { m, n, points })
    }

    /// The pair of warping functions `(phi, psi)` projecting the path onto
    /// its row and column indices.
    pub fn projections(&self) -> (WarpingFunction, WarpingFunction) {
        let phi = self.points.iter().map(|p| p.i).collect();
        let psi = self.points.iter().map(|p| p.j).collect();
        (
            WarpingFunction { codomain_len: self.m, map: phi },
            WarpingFunction { codomain_len: self.n, map: psi },
        )
    }
}

impl GridWalk for WarpingPath {
    fn order(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    fn points(&self) -> &[GridPoint] {
        &self.points
    }
}

impl fmt::Display for WarpingPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_points(f, &self.points)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WarpingWalk {
    m: usize,
    n: usize,
    points: Vec<GridPoint>,
}

impl WarpingWalk {
    pub fn new(m: usize, n: usize, points: Vec<GridPoint>) -> Result<Self> {
        if !validate_walk(&points, m, n) {
            return Err(Error::invalid(format!("not a warping walk of order {m}x{n}")));
        }
        Ok(WarpingWalk { m, n, points })
    }
}

impl GridWalk for WarpingWalk {
    fn order(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    fn points(&self) -> &[GridPoint] {
        &self.points
    }
}

impl From<WarpingPath> for WarpingWalk {
    fn from(p: WarpingPath) -> Self {
        WarpingWalk { m: p.m, n: p.n, points: p.points }
    }
}

impl fmt::Display for WarpingWalk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_points(f, &self.points)
    }
}

fn write_points(f: &mut fmt::Formatter<'_>, points: &[GridPoint]) -> fmt::Result {
    for (k, p) in points.iter().enumerate() {
        if k > 0 {
            f.write_str(" ")?;
        }
        write!(f, "{p}")?;
    }
    Ok(())
}

/// Removes zero steps. The condensed form of a walk is always a path.
pub fn walk_to_path(walk: &WarpingWalk) -> WarpingPath {
    WarpingPath {
        m: walk.m,
        n: walk.n,
        points: words::condense(&walk.points),
    }
}

/// Sum of squared differences `(x_i - y_j)^2` over the points of `w`.
pub fn cost_along<W: GridWalk + ?Sized>(w: &W, x: &[f64], y: &[f64]) -> Result<f64> {
    check_order(w.order(), x, y)?;
    Ok(w.points()
        .iter()
        .map(|p| {
            let d = x[p.i] - y[p.j];
            d * d
        })
        .sum())
}

fn check_order((m, n): (usize, usize), x: &[f64], y: &[f64]) -> Result<()> {
    if (m, n) != (x.len(), y.len()) {
        return Err(Error::invalid(format!(
            "warping of order {m}x{n} applied to series of lengths {}x{}",
            x.len(),
            y.len()
        )));
    }
    Ok(())
}

/// The expansions `(x_{i_1}, ..., x_{i_l})` and `(y_{j_1}, ..., y_{j_l})`
/// induced by a warping path.
pub fn path_expansions(p: &WarpingPath, x: &[f64], y: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    check_order(p.order(), x, y)?;
    Ok((
        p.points.iter().map(|q| x[q.i]).collect(),
        p.points.iter().map(|q| y[q.j]).collect(),
    ))
}

/// A surjective, monotonically non-decreasing map `[l] -> [n]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WarpingFunction {
    codomain_len: usize,
    map: Vec<usize>,
}

impl WarpingFunction {
    /// `map` holds zero-based images of `0..l`.
    pub fn new(map: Vec<usize>, codomain_len: usize) -> Result<Self> {
        let ok = codomain_len > 0
            && map.first() == Some(&0)
            && map.last() == Some(&(codomain_len - 1))
            && map.windows(2).all(|w| w[1] == w[0] || w[1] == w[0] + 1);
        if !ok {
            return Err(Error::invalid(format!(
                "{map:?} is not a surjective monotone map onto [{codomain_len}]"
            )));
        }
        Ok(WarpingFunction { codomain_len, map })
    }

    /// Builds a function from one-based images, as written in the literature.
    pub fn one_based(map: &[usize], codomain_len: usize) -> Result<Self> {
        if map.contains(&0) {
            return Err(Error::invalid("one-based images must be >= 1"));
        }
        Self::new(map.iter().map(|v| v - 1).collect(), codomain_len)
    }

    /// The warping function with the given run lengths: the `k`-th codomain
    /// element is hit `multiplicities[k]` times.
    pub fn from_multiplicities(multiplicities: &[usize]) -> Result<Self> {
        let idx: Vec<usize> = (0..multiplicities.len()).collect();
        let map = words::expand(&idx, multiplicities)?;
        Self::new(map, multiplicities.len())
    }

    pub fn identity(n: usize) -> Self {
        WarpingFunction {
            codomain_len: n,
            map: (0..n).collect(),
        }
    }

    pub fn domain_len(&self) -> usize {
        self.map.len()
    }

    pub fn codomain_len(&self) -> usize {
        self.codomain_len
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn one_based_map(&self) -> Vec<usize> {
        self.map.iter().map(|v| v + 1).collect()
    }

    /// Gathers `x_{phi(l)}` for every `l`; the result is an expansion of `x`.
    pub fn apply<T: Clone>(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.codomain_len {
            return Err(Error::invalid(format!(
                "warping function onto [{}] applied to a series of length {}",
                self.codomain_len,
                x.len()
            )));
        }
        Ok(self.map.iter().map(|&k| x[k].clone()).collect())
    }
}

pub fn apply_warping(phi: &WarpingFunction, x: &[f64]) -> Result<Vec<f64>> {
    phi.apply(x)
}

/// `outer ∘ inner`.
pub fn compose(outer: &WarpingFunction, inner: &WarpingFunction) -> Result<WarpingFunction> {
    if inner.codomain_len != outer.domain_len() {
        return Err(Error::invalid(format!(
            "cannot compose: inner maps onto [{}], outer is defined on [{}]",
            inner.codomain_len,
            outer.domain_len()
        )));
    }
    let map = inner.map.iter().map(|&k| outer.map[k]).collect();
    Ok(WarpingFunction {
        codomain_len: outer.codomain_len,
        map,
    })
}

/// Warping functions `theta: [l] -> [m]` and `theta': [l] -> [m']` with
/// `phi ∘ theta = phi' ∘ theta'`.
///
/// Both fibers over each `i in [n]` are contiguous ranges. They are zipped
/// index by index, and the shorter one repeats its last element while the
/// longer one finishes. Concatenating the fibers in order of `i` yields the
/// lexicographic order, so `l` is the sum of the larger fiber sizes.
pub fn pullback_equalizer(
    phi: &WarpingFunction,
    phi_prime: &WarpingFunction,
) -> Result<(WarpingFunction, WarpingFunction)> {
    if phi.codomain_len != phi_prime.codomain_len {
        return Err(Error::invalid(format!(
            "codomains differ: [{}] vs [{}]",
            phi.codomain_len, phi_prime.codomain_len
        )));
    }
    let fibers = |f: &WarpingFunction| {
        let mut ranges = Vec::with_capacity(f.codomain_len);
        let mut start = 0;
        for u in 1..=f.map.len() {
            if u == f.map.len() || f.map[u] != f.map[start] {
                ranges.push((start, u - start));
                start = u;
            }
        }
        ranges
    };
    let a = fibers(phi);
    let b = fibers(phi_prime);
    let mut theta = Vec::new();
    let mut theta_prime = Vec::new();
    for (&(a0, k), &(b0, l)) in a.iter().zip(&b) {
        for t in 0..k.max(l) {
            theta.push(a0 + t.min(k - 1));
            theta_prime.push(b0 + t.min(l - 1));
        }
    }
    Ok((
        WarpingFunction::new(theta, phi.domain_len())?,
        WarpingFunction::new(theta_prime, phi_prime.domain_len())?,
    ))
}

const PATH_STEPS: &[(usize, usize)] = &[(1, 1), (1, 0), (0, 1)];
const WALK_STEPS: &[(usize, usize)] = &[(1, 1), (1, 0), (0, 1), (0, 0)];

/// Depth-first enumeration of grid traversals with a fixed step set.
///
/// Steps are tried in the order of the step table, so paths are produced
/// with priority diagonal, then `(1,0)`, then `(0,1)`.
#[derive(Debug, Clone)]
pub struct GridEnumerator {
    m: usize,
    n: usize,
    max_len: usize,
    steps: &'static [(usize, usize)],
    points: Vec<GridPoint>,
    // next step index to try at each depth
    choice: Vec<usize>,
    started: bool,
}

impl GridEnumerator {
    fn new(m: usize, n: usize, max_len: usize, steps: &'static [(usize, usize)]) -> Self {
        GridEnumerator {
            m,
            n,
            max_len,
            steps,
            points: Vec::new(),
            choice: Vec::new(),
            started: false,
        }
    }

    fn target(&self) -> GridPoint {
        GridPoint::new(self.m - 1, self.n - 1)
    }

    // Fewest points still needed to reach the corner from `p`, including `p`.
    fn min_remaining(&self, p: GridPoint) -> usize {
        (self.m - 1 - p.i).max(self.n - 1 - p.j) + 1
    }

    fn feasible(&self, p: GridPoint) -> bool {
        p.i < self.m && p.j < self.n && self.points.len() + self.min_remaining(p) <= self.max_len
    }
}

impl Iterator for GridEnumerator {
    type Item = Vec<GridPoint>;

    fn next(&mut self) -> Option<Vec<GridPoint>> {
        if self.m == 0 || self.n == 0 {
            return None;
        }
        if !self.started {
            self.started = true;
            let origin = GridPoint::new(0, 0);
            if !self.feasible(origin) {
                return None;
            }
            self.points.push(origin);
            self.choice.push(0);
            if origin == self.target() {
                return Some(self.points.clone());
            }
        }
        loop {
            let depth = self.choice.len();
            if depth == 0 {
                return None;
            }
            let cur = self.points[depth - 1];
            let k = self.choice[depth - 1];
            if k >= self.steps.len() {
                self.points.pop();
                self.choice.pop();
                continue;
            }
            self.choice[depth - 1] = k + 1;
            let (di, dj) = self.steps[k];
            let next = GridPoint::new(cur.i + di, cur.j + dj);
            if !self.feasible(next) {
                continue;
            }
            self.points.push(next);
            self.choice.push(0);
            if next == self.target() {
                return Some(self.points.clone());
            }
        }
    }
}

/// Every warping path of order `m x n`, each exactly once.
pub fn enumerate_paths(m: usize, n: usize) -> impl Iterator<Item = WarpingPath> {
    GridEnumerator::new(m, n, m + n - 1, PATH_STEPS).map(move |points| WarpingPath { m, n, points })
}

/// Every warping walk of order `m x n` with at most `max_len` points.
pub fn enumerate_walks(m: usize, n: usize, max_len: usize) -> impl Iterator<Item = WarpingWalk> {
    GridEnumerator::new(m, n, max_len, WALK_STEPS).map(move |points| WarpingWalk { m, n, points })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(usize, usize)]) -> Vec<GridPoint> {
        v.iter().map(|&(i, j)| GridPoint::one_based(i, j).unwrap()).collect()
    }

    #[test]
    fn validation_examples() {
        let diag = pts(&[(1, 1), (2, 2)]);
        assert!(validate_path(&diag, 2, 2));
        let dup = pts(&[(1, 1), (1, 1), (2, 2)]);
        assert!(validate_walk(&dup, 2, 2));
        assert!(!validate_path(&dup, 2, 2));
        let short = pts(&[(1, 1), (2, 1)]);
        assert!(!validate_path(&short, 2, 2));
        assert!(!validate_walk(&short, 2, 2));
        assert!(!validate_path(&pts(&[(1, 1), (3, 3)]), 3, 3));
        assert!(!validate_path(&pts(&[(1, 1), (2, 2), (1, 2), (2, 2)]), 2, 2));
        assert!(!validate_path(&[], 1, 1));
    }

    #[test]
    fn walk_to_path_examples() {
        let w = WarpingWalk::new(2, 2, pts(&[(1, 1), (1, 1), (2, 2)])).unwrap();
        assert_eq!(walk_to_path(&w).points(), &pts(&[(1, 1), (2, 2)])[..]);
        let p = WarpingPath::new(2, 2, pts(&[(1, 1), (2, 1), (2, 2)])).unwrap();
        assert_eq!(walk_to_path(&p.clone().into()), p);
        let w = WarpingWalk::new(2, 2, pts(&[(1, 1), (2, 1), (2, 1), (2, 2)])).unwrap();
        assert_eq!(walk_to_path(&w).points(), &pts(&[(1, 1), (2, 1), (2, 2)])[..]);
        assert!(WarpingWalk::new(2, 2, pts(&[(1, 1), (2, 1)])).is_err());
    }

    #[test]
    fn apply_examples() {
        let x = [4.0, 5.0, 6.0];
        assert_eq!(apply_warping(&WarpingFunction::identity(3), &x).unwrap(), x.to_vec());
        let phi = WarpingFunction::one_based(&[1, 1, 2], 2).unwrap();
        assert_eq!(apply_warping(&phi, &[0.0, 1.0]).unwrap(), vec![0.0, 0.0, 1.0]);
        assert!(apply_warping(&phi, &x).is_err());
        assert!(WarpingFunction::one_based(&[1, 3], 3).is_err());
        assert!(WarpingFunction::one_based(&[2, 1], 2).is_err());
        assert!(WarpingFunction::one_based(&[1, 1], 2).is_err());
    }

    #[test]
    fn path_expansion_examples() {
        let p = WarpingPath::new(2, 2, pts(&[(1, 1), (2, 1), (2, 2)])).unwrap();
        let (ex, ey) = path_expansions(&p, &[0.0, 1.0], &[0.0, 2.0]).unwrap();
        assert_eq!(ex, vec![0.0, 1.0, 1.0]);
        assert_eq!(ey, vec![0.0, 0.0, 2.0]);
        let d = WarpingPath::new(2, 2, pts(&[(1, 1), (2, 2)])).unwrap();
        let (ex, ey) = path_expansions(&d, &[3.0, 1.0], &[2.0, 2.0]).unwrap();
        assert_eq!((ex, ey), (vec![3.0, 1.0], vec![2.0, 2.0]));
        assert!(path_expansions(&d, &[1.0], &[1.0, 2.0]).is_err());
        let (phi, psi) = p.projections();
        assert_eq!(phi.one_based_map(), vec![1, 2, 2]);
        assert_eq!(psi.one_based_map(), vec![1, 1, 2]);
    }

    #[test]
    fn cost_examples() {
        let diag = WarpingPath::new(2, 2, pts(&[(1, 1), (2, 2)])).unwrap();
        assert_eq!(cost_along(&diag, &[0.0, 1.0], &[0.0, 2.0]).unwrap(), 1.0);
        assert_eq!(cost_along(&diag, &[0.0, 1.0], &[0.0, 1.0]).unwrap(), 0.0);
        let p = WarpingPath::new(3, 2, pts(&[(1, 1), (2, 2), (3, 2)])).unwrap();
        assert_eq!(cost_along(&p, &[0.0, 1.0, 1.0], &[0.0, 2.0]).unwrap(), 2.0);
        assert!(cost_along(&p, &[0.0, 1.0], &[0.0, 2.0]).is_err());
    }

    #[test]
    fn path_counts_are_delannoy_numbers() {
        assert_eq!(enumerate_paths(1, 1).count(), 1);
        assert_eq!(enumerate_paths(1, 1).next().unwrap().len(), 1);
        assert_eq!(enumerate_paths(2, 2).count(), 3);
        assert_eq!(enumerate_paths(3, 3).count(), 13);
        assert_eq!(enumerate_paths(2, 3).count(), 5);
        assert_eq!(enumerate_paths(4, 4).count(), 63);
        assert_eq!(enumerate_paths(7, 7).count(), 8989);
        assert!(enumerate_paths(4, 3).all(|p| validate_path(p.points(), 4, 3)));
    }

    #[test]
    fn path_enumeration_order() {
        let all: Vec<String> = enumerate_paths(2, 2).map(|p| p.to_string()).collect();
        assert_eq!(all, vec!["(1,1) (2,2)", "(1,1) (2,1) (2,2)", "(1,1) (1,2) (2,2)"]);
    }

    #[test]
    fn walk_enumeration() {
        // 1x1: (1,1) repeated 1..=3 times
        assert_eq!(enumerate_walks(1, 1, 3).count(), 3);
        // 2x2 walks of length <= 3: 3 paths + diagonal with one duplicated point (2 ways)
        assert_eq!(enumerate_walks(2, 2, 3).count(), 5);
        let walks: Vec<_> = enumerate_walks(3, 2, 6).collect();
        assert!(walks.iter().all(|w| validate_walk(w.points(), 3, 2) && w.len() <= 6));
        let mut unique = walks.clone();
        unique.dedup();
        assert_eq!(unique.len(), walks.len());
        let paths: std::collections::HashSet<_> =
            walks.iter().map(|w| walk_to_path(w).points().to_vec()).collect();
        assert_eq!(paths.len(), enumerate_paths(3, 2).count());
    }

    #[test]
    fn pullback_examples() {
        let id = WarpingFunction::identity(4);
        let (t, tp) = pullback_equalizer(&id, &id).unwrap();
        assert_eq!((t.clone(), tp), (id.clone(), id));
        let phi = WarpingFunction::one_based(&[1, 1], 1).unwrap();
        let phi_p = WarpingFunction::one_based(&[1, 1, 1], 1).unwrap();
        let (t, tp) = pullback_equalizer(&phi, &phi_p).unwrap();
        assert_eq!(t.one_based_map(), vec![1, 2, 2]);
        assert_eq!(tp.one_based_map(), vec![1, 2, 3]);
        assert_eq!(compose(&phi, &t).unwrap().one_based_map(), vec![1, 1, 1]);
        assert_eq!(compose(&phi_p, &tp).unwrap().one_based_map(), vec![1, 1, 1]);
        let other = WarpingFunction::identity(2);
        assert!(pullback_equalizer(&phi, &other).is_err());
    }

    #[test]
    fn compose_checks_lengths() {
        let inner = WarpingFunction::identity(3);
        let outer = WarpingFunction::identity(2);
        assert!(compose(&outer, &inner).is_err());
    }
}
