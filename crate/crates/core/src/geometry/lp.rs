//! Phase-I simplex for the convex-hull feasibility problem
//! `{lambda >= 0, sum lambda = 1, sum lambda_i p_i = z}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, Zero};

use super::linalg::{dot, norm};

/// Pivot tolerance for the floating-point solver.
pub const LP_TOL: f64 = 1e-9;

const MAX_PIVOTS: usize = 20_000;

/// Result of a hull-membership query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Inside,
    Outside,
    /// Neither the float nor the exact solve reached a verdict.
    Indeterminate,
}

impl Membership {
    /// Indeterminate answers count as non-members.
    pub fn is_member(self) -> bool {
        self == Membership::Inside
    }
}

/// Arithmetic the tableau needs; implemented for `f64` (with tolerance) and
/// exact rationals.
pub(crate) trait Field: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn lt(&self, o: &Self) -> bool;
    fn is_exact_zero(&self) -> bool;
}

impl Field for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_pos(&self) -> bool {
        *self > LP_TOL
    }
    fn is_neg(&self) -> bool {
        *self < -LP_TOL
    }
    fn lt(&self, o: &Self) -> bool {
        self < o
    }
    fn is_exact_zero(&self) -> bool {
        *self == 0.0
    }
}

impl Field for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn lt(&self, o: &Self) -> bool {
        self < o
    }
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }
}

/// Minimizes the sum of artificial variables for `A lambda = b, lambda >= 0`
/// (with `b >= 0` after row sign normalization). Returns the optimal
/// infeasibility and the primal solution, or `None` on hitting the pivot cap.
pub(crate) fn phase_one<F: Field>(a: Vec<Vec<F>>, b: Vec<F>) -> Option<(F, Vec<F>)> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let width = n + m;
    let mut t: Vec<Vec<F>> = Vec::with_capacity(m);
    let mut rhs: Vec<F> = Vec::with_capacity(m);
    for (i, (row, bi)) in a.into_iter().zip(b).enumerate() {
        let flip = bi.lt(&F::zero());
        let mut full: Vec<F> = row
            .into_iter()
            .map(|v| if flip { F::zero().sub(&v) } else { v })
            .collect();
        full.resize(width, F::zero());
        full[n + i] = F::one();
        t.push(full);
        rhs.push(if flip { F::zero().sub(&bi) } else { bi });
    }
    let mut basis: Vec<usize> = (n..width).collect();
    // Reduced costs of the phase-one objective (sum of artificials).
    let mut cost = vec![F::zero(); width];
    for row in &t {
        for j in 0..n {
            cost[j] = cost[j].sub(&row[j]);
        }
    }
    for _ in 0..MAX_PIVOTS {
        // Bland: lowest-index improving column.
        let Some(col) = (0..width).find(|&j| cost[j].is_neg()) else {
            let mut x = vec![F::zero(); n];
            let mut infeasibility = F::zero();
            for (i, &bv) in basis.iter().enumerate() {
                if bv < n {
                    x[bv] = rhs[i].clone();
                } else {
                    infeasibility = infeasibility.add(&rhs[i]);
                }
            }
            return Some((infeasibility, x));
        };
        let mut pivot: Option<(usize, F)> = None;
        for i in 0..m {
            if !t[i][col].is_pos() {
                continue;
            }
            let ratio = rhs[i].div(&t[i][col]);
            pivot = match pivot {
                None => Some((i, ratio)),
                Some((r, best)) => {
                    if ratio.lt(&best) || (!best.lt(&ratio) && basis[i] < basis[r]) {
                        Some((i, ratio))
                    } else {
                        Some((r, best))
                    }
                }
            };
        }
        // Phase one is bounded below by zero, so a pivot row always exists
        // unless rounding erased it; treat that as non-convergence.
        let (row, _) = pivot?;
        let p = t[row][col].clone();
        for v in t[row].iter_mut() {
            *v = v.div(&p);
        }
        rhs[row] = rhs[row].div(&p);
        let prow = t[row].clone();
        let prhs = rhs[row].clone();
        for i in 0..m {
            if i == row {
                continue;
            }
            let f = t[i][col].clone();
            if f.is_exact_zero() {
                continue;
            }
            for j in 0..width {
                t[i][j] = t[i][j].sub(&f.mul(&prow[j]));
            }
            rhs[i] = rhs[i].sub(&f.mul(&prhs));
        }
        let f = cost[col].clone();
        for j in 0..width {
            cost[j] = cost[j].sub(&f.mul(&prow[j]));
        }
        basis[row] = col;
    }
    None
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Hull {
    Convex,
    Conic,
}

fn hull_system<F: Field>(
    points: &[Vec<f64>],
    z: &[f64],
    kind: Hull,
    conv: impl Fn(f64) -> F,
) -> (Vec<Vec<F>>, Vec<F>) {
    let dim = z.len();
    let mut a = Vec::with_capacity(dim + 1);
    let mut b = Vec::with_capacity(dim + 1);
    for r in 0..dim {
        a.push(points.iter().map(|p| conv(p[r])).collect());
        b.push(conv(z[r]));
    }
    if kind == Hull::Convex {
        a.push(points.iter().map(|_| F::one()).collect());
        b.push(F::one());
    }
    (a, b)
}

fn to_rational(x: f64) -> BigRational {
    BigRational::from_f64(x).unwrap_or_else(|| BigRational::from_integer(BigInt::zero()))
}

/// Exact decision over the rationals; floats are converted without rounding.
pub fn hull_membership_exact(points: &[Vec<f64>], z: &[f64]) -> Membership {
    exact(points, z, Hull::Convex)
}

/// Exact conic-hull decision (`z = sum lambda_i p_i`, `lambda >= 0`).
pub fn cone_membership_exact(points: &[Vec<f64>], z: &[f64]) -> Membership {
    exact(points, z, Hull::Conic)
}

fn exact(points: &[Vec<f64>], z: &[f64], kind: Hull) -> Membership {
    if kind == Hull::Conic && z.iter().all(|c| *c == 0.0) {
        return Membership::Inside;
    }
    if points.is_empty() {
        return Membership::Outside;
    }
    let (a, b) = hull_system(points, z, kind, to_rational);
    match phase_one(a, b) {
        Some((obj, _)) if obj.is_zero() => Membership::Inside,
        Some(_) => Membership::Outside,
        None => Membership::Indeterminate,
    }
}

/// Is `z` a convex combination of `points`? Floating-point Phase I with an
/// exact rational re-solve when the float verdict is unclear.
pub fn hull_membership(points: &[Vec<f64>], z: &[f64]) -> Membership {
    if points.is_empty() {
        return Membership::Outside;
    }
    if points.iter().any(|p| p.iter().zip(z).all(|(a, b)| (a - b).abs() <= 1e-15)) {
        return Membership::Inside;
    }
    if separated(points, z) {
        return Membership::Outside;
    }
    solve(points, z, Hull::Convex)
}

/// Is `z` a nonnegative combination of `points`? The convex hull of a union
/// of cones through the origin is their conic hull, so this is the hull test
/// for superlevel sets of homogeneous depth.
pub fn cone_membership(points: &[Vec<f64>], z: &[f64]) -> Membership {
    let zn = norm(z);
    if zn == 0.0 {
        return Membership::Inside;
    }
    if points.is_empty() {
        return Membership::Outside;
    }
    // Positive multiple of a generator.
    for p in points {
        let pn = norm(p);
        if pn > 0.0 && p.iter().zip(z).all(|(a, b)| (a / pn - b / zn).abs() <= 1e-15) {
            return Membership::Inside;
        }
    }
    // `z` itself separates when every generator is strictly obtuse to it.
    if points.iter().all(|p| dot(p, z) < -1e-12 * norm(p) * zn) {
        return Membership::Outside;
    }
    // Scale so the right-hand side has unit norm; tolerances are absolute.
    let unit: Vec<f64> = z.iter().map(|c| c / zn).collect();
    let scaled_points: Vec<Vec<f64>> = points
        .iter()
        .map(|p| {
            let pn = norm(p);
            if pn > 0.0 {
                p.iter().map(|c| c / pn).collect()
            } else {
                p.clone()
            }
        })
        .collect();
    solve(&scaled_points, &unit, Hull::Conic)
}

fn solve(points: &[Vec<f64>], z: &[f64], kind: Hull) -> Membership {
    let (a, b) = hull_system(points, z, kind, |x| x);
    let verdict = match phase_one(a, b) {
        Some((obj, lambda)) if obj <= 1e-10 => {
            if reconstruction_error(points, z, &lambda, kind) <= 1e-8 {
                Some(Membership::Inside)
            } else {
                None
            }
        }
        Some((obj, _)) if obj >= 1e-7 => Some(Membership::Outside),
        _ => None,
    };
    match verdict {
        Some(v) => v,
        None => {
            let exact = exact(points, z, kind);
            if exact == Membership::Indeterminate {
                log::warn!("hull membership indeterminate for {} points; treating as outside", points.len());
            }
            exact
        }
    }
}

/// Cheap certificate of non-membership via two candidate separating directions.
fn separated(points: &[Vec<f64>], z: &[f64]) -> bool {
    let dim = z.len();
    let mut centroid = vec![0.0; dim];
    for p in points {
        for (c, v) in centroid.iter_mut().zip(p) {
            *c += v / points.len() as f64;
        }
    }
    let away: Vec<f64> = z.iter().zip(&centroid).map(|(a, b)| a - b).collect();
    [z.to_vec(), away].iter().any(|u| {
        let level = dot(u, z);
        let margin = 1e-9 * (1.0 + level.abs());
        points.iter().all(|p| dot(u, p) < level - margin)
    })
}

fn reconstruction_error(points: &[Vec<f64>], z: &[f64], lambda: &[f64], kind: Hull) -> f64 {
    let mut worst = match kind {
        Hull::Convex => (lambda.iter().sum::<f64>() - 1.0).abs(),
        Hull::Conic => 0.0,
    };
    if lambda.iter().any(|l| *l < -1e-9) {
        return f64::INFINITY;
    }
    for (r, zr) in z.iter().enumerate() {
        let v: f64 = points.iter().zip(lambda).map(|(p, l)| p[r] * l).sum();
        worst = worst.max((v - zr).abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simplex() -> Vec<Vec<f64>> {
        vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]
    }

    #[test]
    fn vertex_is_member() {
        assert_eq!(hull_membership(&simplex(), &[1.0, 0.0]), Membership::Inside);
    }

    #[test]
    fn barycentric_point_is_member() {
        assert_eq!(hull_membership(&simplex(), &[0.25, 0.25]), Membership::Inside);
        assert_eq!(hull_membership_exact(&simplex(), &[0.25, 0.25]), Membership::Inside);
    }

    #[test]
    fn outside_point() {
        assert_eq!(hull_membership(&simplex(), &[1.0, 1.0]), Membership::Outside);
        assert_eq!(hull_membership_exact(&simplex(), &[1.0, 1.0]), Membership::Outside);
    }

    #[test]
    fn edge_point_is_member() {
        assert_eq!(hull_membership(&simplex(), &[0.5, 0.5]), Membership::Inside);
    }

    #[test]
    fn cone_of_axes() {
        let axes = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(cone_membership(&axes, &[3.0, 5.0]), Membership::Inside);
        assert_eq!(cone_membership(&axes, &[-1.0, 5.0]), Membership::Outside);
        assert_eq!(cone_membership_exact(&axes, &[-1.0, 5.0]), Membership::Outside);
        assert_eq!(cone_membership(&axes, &[0.0, 0.0]), Membership::Inside);
    }

    #[test]
    fn empty_hull() {
        assert_eq!(hull_membership(&[], &[0.0]), Membership::Outside);
    }
}
