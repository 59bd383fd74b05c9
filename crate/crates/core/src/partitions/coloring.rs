//! Colorings of finite metric spaces and the finite experiments built on
//! them: monochromatic copy searches, the greedy orbit-chasing construction,
//! the annulus coloring of a net system and ε-chain reach.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::spaces::{first_embedding, FiniteMetricSpace};

/// A map from the points of a space into `0..k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Coloring {
    colors: Vec<usize>,
    k: usize,
}

impl Coloring {
    pub fn new(colors: Vec<usize>, k: usize) -> Result<Coloring> {
        if k == 0 {
            return Err(Error::Invalid("a coloring needs at least one color".into()));
        }
        if let Some(p) = colors.iter().position(|&c| c >= k) {
            return Err(Error::Invalid(format!("point {p} has color {} outside 0..{k}", colors[p])));
        }
        Ok(Coloring { colors, k })
    }

    pub fn constant(n: usize, color: usize, k: usize) -> Result<Coloring> {
        Coloring::new(vec![color; n], k)
    }

    /// The coloring numbered `code` in base `k`, point 0 being the least
    /// significant digit.
    pub fn from_code(n: usize, k: usize, mut code: u128) -> Result<Coloring> {
        let mut colors = Vec::with_capacity(n);
        for _ in 0..n {
            colors.push((code % k as u128) as usize);
            code /= k as u128;
        }
        Coloring::new(colors, k)
    }

    pub fn random(n: usize, k: usize, rng: &mut impl Rng) -> Result<Coloring> {
        Coloring::new((0..n).map(|_| rng.gen_range(0..k.max(1))).collect(), k)
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn color(&self, p: usize) -> usize {
        self.colors[p]
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn class(&self, c: usize) -> Vec<usize> {
        (0..self.colors.len()).filter(|&p| self.colors[p] == c).collect()
    }

    fn check_len(&self, x: &FiniteMetricSpace) -> Result<()> {
        if self.colors.len() != x.len() {
            return Err(Error::LengthMismatch { expected: x.len(), got: self.colors.len() });
        }
        Ok(())
    }
}

/// Closed ε-fattening of `subset` inside `x`: every point within `eps` of
/// some member. Returned sorted.
pub fn epsilon_neighborhood(x: &FiniteMetricSpace, subset: &[usize], eps: Rational) -> Result<Vec<usize>> {
    if eps < Rational::ZERO {
        return Err(Error::Precondition(format!("eps must be nonnegative, got {eps}")));
    }
    if let Some(&p) = subset.iter().find(|&&p| p >= x.len()) {
        return Err(Error::Invalid(format!("point {p} is not in the space")));
    }
    Ok((0..x.len()).filter(|&p| subset.iter().any(|&y| x.dist(p, y) <= eps)).collect())
}

/// Colorings a full enumeration may visit before giving up.
pub const EXHAUSTIVE_COLORING_BUDGET: u128 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Every coloring, in order of its base-`k` code.
    Exhaustive { budget: u128 },
    /// `samples` uniformly random colorings from a seeded generator.
    Sampled { samples: usize, seed: u64 },
}

impl SearchMode {
    pub fn exhaustive() -> SearchMode {
        SearchMode::Exhaustive { budget: EXHAUSTIVE_COLORING_BUDGET }
    }
}

/// Outcome for one coloring. `copy_indices` lists the images of the target
/// points in order, all of color `color`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ColoringOutcome {
    pub coloring: Vec<usize>,
    pub found: bool,
    pub copy_indices: Option<Vec<usize>>,
    pub color: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IndivisibilitySummary {
    pub colorings_examined: u128,
    pub monochromatic: u128,
    /// The first coloring with no monochromatic copy, a certified failure.
    pub first_failure: Option<ColoringOutcome>,
}

impl IndivisibilitySummary {
    pub fn all_found(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Least-color monochromatic copy of `target` under `chi`, if any.
pub fn monochromatic_copy(
    x: &FiniteMetricSpace,
    target: &FiniteMetricSpace,
    chi: &Coloring,
) -> Result<ColoringOutcome> {
    chi.check_len(x)?;
    for c in 0..chi.k() {
        if let Some(copy) = first_embedding(x, target, &|p| chi.color(p) == c) {
            return Ok(ColoringOutcome {
                coloring: chi.colors.clone(),
                found: true,
                copy_indices: Some(copy),
                color: Some(c),
            });
        }
    }
    Ok(ColoringOutcome { coloring: chi.colors.clone(), found: false, copy_indices: None, color: None })
}

/// Runs the monochromatic copy search over the colorings selected by `mode`,
/// handing every outcome to `visit` in order.
pub fn indivisibility_search(
    x: &FiniteMetricSpace,
    target: &FiniteMetricSpace,
    k: usize,
    mode: SearchMode,
    visit: &mut dyn FnMut(&ColoringOutcome),
) -> Result<IndivisibilitySummary> {
    if k == 0 {
        return Err(Error::Invalid("at least one color is required".into()));
    }
    let mut summary = IndivisibilitySummary { colorings_examined: 0, monochromatic: 0, first_failure: None };
    let mut record = |outcome: ColoringOutcome, summary: &mut IndivisibilitySummary| {
        visit(&outcome);
        summary.colorings_examined += 1;
        if outcome.found {
            summary.monochromatic += 1;
        } else if summary.first_failure.is_none() {
            summary.first_failure = Some(outcome);
        }
    };
    match mode {
        SearchMode::Exhaustive { budget } => {
            let total = (k as u128).saturating_pow(x.len() as u32);
            if total > budget {
                return Err(Error::SearchTooLarge { what: "colorings", size: total, bound: budget });
            }
            for code in 0..total {
                let chi = Coloring::from_code(x.len(), k, code)?;
                record(monochromatic_copy(x, target, &chi)?, &mut summary);
            }
        }
        SearchMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let chi = Coloring::random(x.len(), k, &mut rng)?;
                record(monochromatic_copy(x, target, &chi)?, &mut summary);
            }
        }
    }
    Ok(summary)
}

/// Where the greedy construction got stuck: no point of `color` in the
/// orbit set `orbit` of candidates for the next target point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Obstruction {
    pub color: usize,
    /// Number of target points already copied when the step failed.
    pub step: usize,
    pub partial_copy: Vec<usize>,
    pub orbit: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GreedyOutcome {
    /// Images of the first `copy.len()` target points, all of color `color`.
    pub copy: Vec<usize>,
    pub color: usize,
    pub full: bool,
    /// Obstructions met along the way, outermost first.
    pub obstructions: Vec<Obstruction>,
}

/// Greedy monochromatic copy in the style of the Rado graph argument.
///
/// Target points are copied one at a time in color 0, each time into the
/// least point of the orbit set `E` of points at the prescribed distances
/// from the copy built so far. When `E` has no point of the current color
/// the search moves into `E` with the next color, as in the proof where the
/// obstructing set is itself a copy of the whole space. The longest copy
/// achieved is returned.
pub fn greedy_monochromatic(
    x: &FiniteMetricSpace,
    chi: &Coloring,
    target: &FiniteMetricSpace,
) -> Result<GreedyOutcome> {
    chi.check_len(x)?;
    let all: Vec<usize> = (0..x.len()).collect();
    let mut obstructions = Vec::new();
    let mut best: Option<(Vec<usize>, usize)> = None;
    let mut region = all;
    for color in 0..chi.k() {
        let mut copy: Vec<usize> = Vec::new();
        let mut stuck = None;
        while copy.len() < target.len() {
            let n = copy.len();
            let orbit: Vec<usize> = region
                .iter()
                .copied()
                .filter(|&p| copy.iter().enumerate().all(|(i, &c)| c != p && x.dist(c, p) == target.dist(i, n)))
                .collect();
            match orbit.iter().find(|&&p| chi.color(p) == color) {
                Some(&p) => copy.push(p),
                None => {
                    stuck = Some(orbit);
                    break;
                }
            }
        }
        if best.as_ref().is_none_or(|(b, _)| copy.len() > b.len()) {
            best = Some((copy.clone(), color));
        }
        match stuck {
            None => break,
            Some(orbit) => {
                obstructions.push(Obstruction { color, step: copy.len(), partial_copy: copy, orbit: orbit.clone() });
                region = orbit;
            }
        }
    }
    let (copy, color) = best.unwrap_or((Vec::new(), 0));
    Ok(GreedyOutcome { full: copy.len() == target.len(), copy, color, obstructions })
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

/// Centers with one radius each; every point of the space lies strictly
/// inside exactly one center's ball.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NetSystem {
    centers: Vec<usize>,
    radii: Vec<Rational>,
    /// The unique center (index into `centers`) of each point.
    owner: Vec<usize>,
}

impl NetSystem {
    /// Validates a net on `x`. Radii must lie in (0, 1/2) and have reduced
    /// denominators coprime to every distance denominator of `x`, the exact
    /// stand-in for irrational radii.
    pub fn new(x: &FiniteMetricSpace, centers: Vec<usize>, radii: Vec<Rational>) -> Result<NetSystem> {
        if centers.len() != radii.len() {
            return Err(Error::LengthMismatch { expected: centers.len(), got: radii.len() });
        }
        let half = Rational::new(1, 2)?;
        for (&c, &r) in centers.iter().zip(&radii) {
            if c >= x.len() {
                return Err(Error::Invalid(format!("center {c} is not in the space")));
            }
            if r <= Rational::ZERO || r >= half {
                return Err(Error::Invalid(format!("radius {r} of center {c} is not in (0, 1/2)")));
            }
            if let Some(d) = x.distances().into_iter().find(|d| gcd(d.denom(), r.denom()) != 1) {
                return Err(Error::Invalid(format!(
                    "radius {r} of center {c} shares a denominator factor with distance {d}"
                )));
            }
        }
        let mut owner = Vec::with_capacity(x.len());
        for p in 0..x.len() {
            let inside: Vec<usize> = (0..centers.len()).filter(|&i| x.dist(centers[i], p) < radii[i]).collect();
            match inside.as_slice() {
                [i] => owner.push(*i),
                [] => return Err(Error::Invalid(format!("point {p} lies in no center's ball"))),
                _ => {
                    return Err(Error::Invalid(format!(
                        "point {p} lies in the balls of centers {:?}",
                        inside.iter().map(|&i| centers[i]).collect::<Vec<_>>()
                    )))
                }
            }
        }
        Ok(NetSystem { centers, radii, owner })
    }

    pub fn centers(&self) -> &[usize] {
        &self.centers
    }

    pub fn radii(&self) -> &[Rational] {
        &self.radii
    }

    /// The center point owning `p` and its radius.
    pub fn center_of(&self, p: usize) -> (usize, Rational) {
        let i = self.owner[p];
        (self.centers[i], self.radii[i])
    }

    /// The cell of `p`: its center and the index `j >= 1` of the band
    /// `r(1 - 1/j) <= d < r(1 - 1/(j+1))` containing it.
    pub fn cell(&self, x: &FiniteMetricSpace, p: usize) -> Result<(usize, u64)> {
        let (c, r) = self.center_of(p);
        Ok((c, band_index(x.dist(c, p), r)?))
    }
}

/// The `j >= 1` with `r(1 - 1/j) <= d < r(1 - 1/(j+1))`, for `0 <= d < r`.
pub fn band_index(d: Rational, r: Rational) -> Result<u64> {
    if d < Rational::ZERO || d >= r {
        return Err(Error::Precondition(format!("distance {d} is not in [0, {r})")));
    }
    // u = 1 - d/r lies in (0, 1]; the band index is floor(1/u).
    let u = Rational::ONE.checked_sub(d.checked_div(r)?)?;
    let inv = Rational::ONE.checked_div(u)?;
    Ok(inv.numer().div_euclid(inv.denom()) as u64)
}

/// Two-coloring by annuli: color 0 iff `r(1 - 1/(2n)) <= d(y_p, p) <
/// r(1 - 1/(2n+1))` for some `n >= 1`, color 1 otherwise. A center itself
/// sits in the innermost band `[0, r/2)` and gets color 1.
pub fn divisibility_coloring(x: &FiniteMetricSpace, net: &NetSystem) -> Result<Coloring> {
    if net.owner.len() != x.len() {
        return Err(Error::LengthMismatch { expected: x.len(), got: net.owner.len() });
    }
    let colors =
        (0..x.len()).map(|p| Ok(if net.cell(x, p)?.1 % 2 == 0 { 0 } else { 1 })).collect::<Result<Vec<_>>>()?;
    Coloring::new(colors, 2)
}

/// Checks the annulus fact for a chain `x = chain[0], ..., chain[last] = x'`
/// around center `y` and returns the first index whose distance to `y` lies
/// in `[r(1 - 1/(n+1)), r(1 - 1/(n+2)))`.
///
/// Literal hypotheses: `d(y,x) < r(1 - 1/(n+1))`, `d(x,x') > r`, steps at
/// most `eps`, `eps < 1/((n+1)(n+2))`. These alone admit chains that jump
/// over the band, so two further hypotheses are required: `d(y,x') >=
/// r(1 - 1/(n+2))` and `eps < r/((n+1)(n+2))`, the band width. Each failed
/// hypothesis is reported by name.
pub fn annulus_lemma_check(
    x: &FiniteMetricSpace,
    y: usize,
    chain: &[usize],
    r: Rational,
    n: u64,
    eps: Rational,
) -> Result<usize> {
    let pre = |name: &str, detail: String| Error::Precondition(format!("{name}: {detail}"));
    if chain.is_empty() {
        return Err(pre("chain-nonempty", "the chain has no points".into()));
    }
    if let Some(&p) = chain.iter().chain([&y]).find(|&&p| p >= x.len()) {
        return Err(Error::Invalid(format!("point {p} is not in the space")));
    }
    if r <= Rational::ZERO {
        return Err(pre("radius-positive", format!("r = {r}")));
    }
    let n = i64::try_from(n).map_err(|_| Error::Overflow)?;
    let lo = r.checked_mul(Rational::ONE.checked_sub(Rational::new(1, n + 1)?)?)?;
    let hi = r.checked_mul(Rational::ONE.checked_sub(Rational::new(1, n + 2)?)?)?;
    let width = Rational::new(1, (n + 1).checked_mul(n + 2).ok_or(Error::Overflow)?)?;
    let (start, end) = (chain[0], chain[chain.len() - 1]);
    if x.dist(y, start) >= lo {
        return Err(pre("start-inside", format!("d(y,x) = {} is not below {lo}", x.dist(y, start))));
    }
    if x.dist(start, end) <= r {
        return Err(pre("endpoints-far", format!("d(x,x') = {} is not above r = {r}", x.dist(start, end))));
    }
    if let Some(w) = chain.windows(2).find(|w| x.dist(w[0], w[1]) > eps) {
        return Err(pre(
            "step-bound",
            format!("step {}-{} has length {} > eps = {eps}", w[0], w[1], x.dist(w[0], w[1])),
        ));
    }
    if eps >= width {
        return Err(pre("eps-bound", format!("eps = {eps} is not below {width}")));
    }
    if x.dist(y, end) < hi {
        return Err(pre("end-beyond-band", format!("d(y,x') = {} is below {hi}", x.dist(y, end))));
    }
    let band_width = r.checked_mul(width)?;
    if eps >= band_width {
        return Err(pre("eps-below-band-width", format!("eps = {eps} is not below {band_width}")));
    }
    chain
        .iter()
        .position(|&p| lo <= x.dist(y, p) && x.dist(y, p) < hi)
        .ok_or_else(|| Error::Internal(format!("annulus fact falsified: no chain point in [{lo}, {hi}) around {y}")))
}

/// Points reachable from `p` by steps of length at most `eps`.
pub fn epsilon_component(x: &FiniteMetricSpace, p: usize, eps: Rational) -> Vec<usize> {
    let mut seen = vec![false; x.len()];
    let mut queue = VecDeque::from([p]);
    seen[p] = true;
    while let Some(a) = queue.pop_front() {
        for b in 0..x.len() {
            if !seen[b] && x.dist(a, b) <= eps {
                seen[b] = true;
                queue.push_back(b);
            }
        }
    }
    (0..x.len()).filter(|&q| seen[q]).collect()
}

/// `min(1, l)` where `l` is the largest distance between two points of the
/// ε-step component of `p`: the supremum over ε-chains through `p`.
pub fn lambda_epsilon(x: &FiniteMetricSpace, p: usize, eps: Rational) -> Result<Rational> {
    if eps <= Rational::ZERO {
        return Err(Error::Precondition(format!("eps must be positive, got {eps}")));
    }
    if p >= x.len() {
        return Err(Error::Invalid(format!("point {p} is not in the space")));
    }
    let comp = epsilon_component(x, p, eps);
    let spread = comp
        .iter()
        .flat_map(|&a| comp.iter().map(move |&b| (a, b)))
        .map(|(a, b)| x.dist(a, b))
        .max()
        .unwrap_or(Rational::ZERO);
    Ok(spread.min(Rational::ONE))
}
