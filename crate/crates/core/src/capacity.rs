//! Finite-space non-additive measures: capacities, Choquet integration,
//! neo-additive capacities, and the Möbius mass transform.
//!
//! Subsets of the type space are bitmasks over the ordered label list, so the
//! full 2^k event algebra can be enumerated directly. The space size is capped
//! at [`MAX_LABELS`] labels, far above anything the simulations use.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on the number of labels in a [`TypeSpace`].
pub const MAX_LABELS: usize = 16;

/// Absolute tolerance used when validating probability vectors.
pub const PRIOR_TOLERANCE: f64 = 1e-9;

/// A subset of the type space, encoded as a bitmask over label indices.
pub type SubsetMask = u32;

/// Ordered, finite set of agent-type labels.
///
/// Cloning is cheap (the label storage is shared), so capacities built over
/// the same space can be passed around freely.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct TypeSpace {
    labels: Arc<[String]>,
}

impl TryFrom<Vec<String>> for TypeSpace {
    type Error = Error;
    fn try_from(labels: Vec<String>) -> Result<Self> {
        Self::new(labels)
    }
}

impl From<TypeSpace> for Vec<String> {
    fn from(space: TypeSpace) -> Self {
        space.labels.to_vec()
    }
}

impl TypeSpace {
    /// Build a space from distinct labels; requires 2..=16 of them.
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() < 2 || labels.len() > MAX_LABELS {
            return Err(Error::BadSpaceSize {
                got: labels.len(),
                max: MAX_LABELS,
            });
        }
        for (i, a) in labels.iter().enumerate() {
            if labels[..i].contains(a) {
                return Err(Error::DuplicateLabel(a.clone()));
            }
        }
        Ok(Self {
            labels: labels.into(),
        })
    }

    /// Conventional labels for a k-type space: the classic three-type naming
    /// when k = 3, generated names otherwise.
    pub fn with_default_labels(k: usize) -> Result<Self> {
        if k == 3 {
            Self::new(["good", "bad", "worst"])
        } else {
            Self::new((0..k).map(|i| format!("type{i}")))
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Number of subsets (2^k).
    pub fn n_subsets(&self) -> usize {
        1 << self.labels.len()
    }

    /// Mask with every label present.
    pub fn full_mask(&self) -> SubsetMask {
        (self.n_subsets() - 1) as SubsetMask
    }

    /// Translate a set of labels into a bitmask.
    pub fn mask_of<S: AsRef<str>>(&self, subset: &[S]) -> Result<SubsetMask> {
        let mut mask = 0;
        for label in subset {
            let idx = self
                .labels
                .iter()
                .position(|l| l == label.as_ref())
                .ok_or_else(|| Error::UnknownLabel(label.as_ref().to_string()))?;
            mask |= 1 << idx;
        }
        Ok(mask)
    }
}

/// A normalized monotone set function on the power set of a [`TypeSpace`].
///
/// `values[mask]` is the capacity of the subset encoded by `mask`. The
/// constructor enforces normalization and monotonicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Capacity {
    space: TypeSpace,
    values: Vec<f64>,
}

impl Capacity {
    pub fn new(space: TypeSpace, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.n_subsets() {
            return Err(Error::BadCapacityTable {
                expected: space.n_subsets(),
                got: values.len(),
            });
        }
        if values[0] != 0.0 || values[space.full_mask() as usize] != 1.0 {
            return Err(Error::CapacityNotNormalized);
        }
        // Checking every covering pair E ⊂ E ∪ {i} implies full monotonicity.
        for mask in 0..values.len() {
            for i in 0..space.len() {
                if mask & (1 << i) == 0 {
                    let bigger = mask | (1 << i);
                    if values[bigger] < values[mask] {
                        return Err(Error::CapacityNotMonotone {
                            from: values[mask],
                            to: values[bigger],
                        });
                    }
                }
            }
        }
        Ok(Self { space, values })
    }

    pub fn space(&self) -> &TypeSpace {
        &self.space
    }

    pub fn value(&self, subset: SubsetMask) -> f64 {
        self.values[subset as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// A neo-additive capacity: the mixture `(1-σ)·π(E) + σ·α` on essential
/// events, pinned to 0 on the empty set and 1 on the full set.
///
/// `π` is the additive prior over labels, `σ` the ambiguity degree, and `α`
/// the optimism weight. Only the empty set is null and only the full set is
/// universal, so every other subset is essential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeoAdditiveCapacity {
    space: TypeSpace,
    prior: Vec<f64>,
    ambiguity: f64,
    optimism: f64,
}

impl NeoAdditiveCapacity {
    pub fn new(space: TypeSpace, prior: Vec<f64>, ambiguity: f64, optimism: f64) -> Result<Self> {
        validate_prior(&prior, space.len())?;
        validate_unit("ambiguity", ambiguity)?;
        validate_unit("optimism", optimism)?;
        Ok(Self {
            space,
            prior,
            ambiguity,
            optimism,
        })
    }

    pub fn space(&self) -> &TypeSpace {
        &self.space
    }

    pub fn prior(&self) -> &[f64] {
        &self.prior
    }

    pub fn ambiguity(&self) -> f64 {
        self.ambiguity
    }

    pub fn optimism(&self) -> f64 {
        self.optimism
    }

    /// Capacity of the subset encoded by `mask`.
    pub fn evaluate_mask(&self, mask: SubsetMask) -> f64 {
        debug_assert!((mask as usize) < self.space.n_subsets());
        if mask == 0 {
            return 0.0;
        }
        if mask == self.space.full_mask() {
            return 1.0;
        }
        let pi: f64 = (0..self.space.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| self.prior[i])
            .sum();
        (1.0 - self.ambiguity) * pi + self.ambiguity * self.optimism
    }

    /// Capacity of a subset given by labels; unknown labels are an error.
    pub fn evaluate<S: AsRef<str>>(&self, subset: &[S]) -> Result<f64> {
        Ok(self.evaluate_mask(self.space.mask_of(subset)?))
    }

    /// Tabulate the full 2^k capacity.
    pub fn to_capacity(&self) -> Capacity {
        let values = (0..self.space.n_subsets())
            .map(|mask| self.evaluate_mask(mask as SubsetMask))
            .collect();
        Capacity::new(self.space.clone(), values)
            .expect("a neo-additive capacity is always normalized and monotone")
    }
}

/// A payoff outcome per label of the space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimpleFunction {
    outcomes: Vec<f64>,
}

impl SimpleFunction {
    pub fn new(outcomes: Vec<f64>) -> Self {
        debug_assert!(outcomes.iter().all(|v| v.is_finite()));
        Self { outcomes }
    }

    pub fn outcomes(&self) -> &[f64] {
        &self.outcomes
    }

    fn check_space(&self, space: &TypeSpace) -> Result<()> {
        if self.outcomes.len() != space.len() {
            return Err(Error::SpaceMismatch {
                expected: space.len(),
                got: self.outcomes.len(),
            });
        }
        Ok(())
    }
}

/// Choquet integral of `f` with respect to `cap`, via the sorted-levels form:
/// starting from the minimum outcome, each increment between consecutive
/// levels is weighted by the capacity of the surviving upper set.
pub fn choquet_integral(cap: &Capacity, f: &SimpleFunction) -> Result<f64> {
    f.check_space(cap.space())?;
    let outcomes = f.outcomes();
    let mut order: Vec<usize> = (0..outcomes.len()).collect();
    order.sort_by(|&a, &b| outcomes[a].total_cmp(&outcomes[b]));

    let mut upper = cap.space().full_mask();
    let mut total = 0.0;
    let mut prev: Option<f64> = None;
    let mut i = 0;
    while i < order.len() {
        let level = outcomes[order[i]];
        match prev {
            None => total += level, // ν(full set) = 1
            Some(p) => total += (level - p) * cap.value(upper),
        }
        // Drop every label sitting exactly at this level before moving up.
        while i < order.len() && outcomes[order[i]] == level {
            upper &= !(1 << order[i]);
            i += 1;
        }
        prev = Some(level);
    }
    Ok(total)
}

/// Choquet expected value of `f` under a neo-additive capacity, in closed
/// form: `(1-σ)·E_π[f] + σ·(α·max f + (1-α)·min f)`.
pub fn ceu_neo_additive(cap: &NeoAdditiveCapacity, f: &SimpleFunction) -> Result<f64> {
    f.check_space(cap.space())?;
    Ok(hurwicz_mix(
        f.outcomes(),
        cap.prior(),
        cap.ambiguity(),
        cap.optimism(),
    ))
}

/// The scalar kernel behind [`ceu_neo_additive`]; shared with the solver.
pub(crate) fn hurwicz_mix(outcomes: &[f64], prior: &[f64], sigma: f64, alpha: f64) -> f64 {
    let expectation: f64 = outcomes.iter().zip(prior).map(|(o, p)| o * p).sum();
    let max = outcomes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = outcomes.iter().copied().fold(f64::INFINITY, f64::min);
    (1.0 - sigma) * expectation + sigma * (alpha * max + (1.0 - alpha) * min)
}

/// Möbius mass of every subset: `m(E) = Σ_{H ⊆ E} (-1)^(|E|-|H|) ν(H)`.
///
/// Masses may be negative for non-belief-function capacities (neo-additive
/// capacities with α > 0.5 produce them); they are returned as-is.
pub fn mobius_mass(cap: &Capacity) -> Vec<f64> {
    let n = cap.space().n_subsets();
    let mut masses = vec![0.0; n];
    for mask in 0..n as SubsetMask {
        let e_size = mask.count_ones();
        let mut m = 0.0;
        // Iterate H over all submasks of `mask`, including ∅ and `mask` itself.
        let mut h = mask;
        loop {
            let sign = if (e_size - h.count_ones()) % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            m += sign * cap.value(h);
            if h == 0 {
                break;
            }
            h = (h - 1) & mask;
        }
        masses[mask as usize] = m;
    }
    masses
}

/// Belief and plausibility of a subset under a mass assignment:
/// `bel(E) = Σ_{H ⊆ E} m(H)`, `pl(E) = Σ_{H ∩ E ≠ ∅} m(H)`.
pub fn belief_plausibility(masses: &[f64], subset: SubsetMask) -> (f64, f64) {
    let mut belief = 0.0;
    let mut plausibility = 0.0;
    for (h, &m) in masses.iter().enumerate() {
        let h = h as SubsetMask;
        if h & !subset == 0 {
            belief += m;
        }
        if h & subset != 0 {
            plausibility += m;
        }
    }
    (belief, plausibility)
}

pub(crate) fn validate_prior(prior: &[f64], k: usize) -> Result<()> {
    let sum: f64 = prior.iter().sum();
    let component_ok = |p: f64| p.is_finite() && p >= 0.0;
    if prior.len() != k
        || !prior.iter().all(|&p| component_ok(p))
        || (sum - 1.0).abs() > PRIOR_TOLERANCE
    {
        return Err(Error::BadPrior { expected: k, sum });
    }
    Ok(())
}

pub(crate) fn validate_unit(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::OutOfUnitInterval { name, value });
    }
    Ok(())
}
