//! The strict-selfishness limit: pure and mixed Nash equilibria on raw payoffs.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dynamics::deviation_gain;
use crate::error::{Error, Result};
use crate::game::{joint_space_size, next_joint, NormalFormGame, PayoffModel, MAX_JOINT_ACTIONS};
use crate::profile::{argmax, StrategyProfile};

/// Slack added to every epsilon comparison.
pub const VERIFY_SLACK: f64 = 1e-12;
/// Feasibility tolerance inside support enumeration.
pub const SUPPORT_TOLERANCE: f64 = 1e-9;
/// Equilibria closer than this in L-infinity are merged.
pub const DUPLICATE_TOLERANCE: f64 = 1e-7;
/// Largest action count per player accepted by support enumeration.
pub const MAX_SUPPORT_ACTIONS: usize = 8;

/// Largest gain any player can get from a unilateral pure deviation, on raw payoffs.
pub fn raw_epsilon_gap<G: PayoffModel + ?Sized>(game: &G, profile: &StrategyProfile) -> Result<f64> {
    profile.check_shape(game.action_counts())?;
    Ok((0..game.player_count())
        .map(|i| deviation_gain(&game.raw_action_values(profile, i), profile.player(i)))
        .fold(0.0, f64::max))
}

/// True iff no player can gain more than `epsilon` (plus [`VERIFY_SLACK`]) by deviating.
pub fn verify_epsilon_nash<G: PayoffModel + ?Sized>(
    game: &G,
    profile: &StrategyProfile,
    epsilon: f64,
) -> Result<bool> {
    if !(epsilon >= 0.0) {
        return Err(Error::Config(format!("epsilon must be nonnegative, got {epsilon}")));
    }
    Ok(raw_epsilon_gap(game, profile)? <= epsilon + VERIFY_SLACK)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeKind {
    Equilibrium,
    Cycle,
    /// Stopped by `max_steps` before settling or repeating.
    StepLimit,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PureOutcome {
    pub kind: OutcomeKind,
    /// Final joint action; a pure Nash equilibrium when `kind` is `Equilibrium`.
    pub joint_action: Vec<usize>,
    /// Period of the cycle, in sweeps.
    pub cycle_length: Option<usize>,
    /// Number of improving moves made.
    pub steps: usize,
    pub sweeps: usize,
}

/// Sequential best-response dynamics on raw payoffs.
///
/// Players move in index order, and only when their best response (lowest
/// index among ties) strictly beats their current action. The joint action at
/// the end of every sweep is remembered; seeing one again is a cycle.
pub fn best_response_dynamics<G: PayoffModel + ?Sized>(
    game: &G,
    start: &[usize],
    max_steps: usize,
) -> Result<PureOutcome> {
    let counts = game.action_counts();
    if start.len() != counts.len() || start.iter().zip(counts).any(|(a, k)| a >= k) {
        return Err(Error::Shape(format!(
            "start {start:?} is not a joint action of a game with actions {counts:?}"
        )));
    }
    let mut joint = start.to_vec();
    let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
    seen.insert(joint.clone(), 0);
    let mut steps = 0;
    let mut sweep = 0;
    loop {
        sweep += 1;
        let mut moved = false;
        for i in 0..counts.len() {
            let values = game.pure_action_payoffs(i, &joint);
            let best = argmax(&values);
            if values[best] > values[joint[i]] {
                joint[i] = best;
                steps += 1;
                moved = true;
            }
        }
        let outcome = |kind, cycle_length| PureOutcome {
            kind,
            joint_action: joint.clone(),
            cycle_length,
            steps,
            sweeps: sweep,
        };
        if !moved {
            return Ok(outcome(OutcomeKind::Equilibrium, None));
        }
        if let Some(previous) = seen.insert(joint.clone(), sweep) {
            return Ok(outcome(OutcomeKind::Cycle, Some(sweep - previous)));
        }
        if steps >= max_steps {
            return Ok(outcome(OutcomeKind::StepLimit, None));
        }
    }
}

/// Every joint action at which no player has a strictly improving unilateral deviation.
pub fn enumerate_pure_nash<G: PayoffModel + ?Sized>(game: &G) -> Result<Vec<Vec<usize>>> {
    let counts = game.action_counts();
    let size = joint_space_size(counts);
    if size > MAX_JOINT_ACTIONS {
        return Err(Error::TooLarge {
            size,
            limit: MAX_JOINT_ACTIONS,
        });
    }
    let mut found = Vec::new();
    let mut joint = vec![0; counts.len()];
    loop {
        let stable = (0..counts.len()).all(|i| {
            let values = game.pure_action_payoffs(i, &joint);
            values.iter().all(|&v| v <= values[joint[i]])
        });
        if stable {
            found.push(joint.clone());
        }
        if !next_joint(&mut joint, counts) {
            break;
        }
    }
    Ok(found)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Solves for a distribution on `mixing` that makes every action in `indifferent`
/// earn the same value: `payoff(a, b)` is the indifferent side's payoff when it
/// plays `a` against `b`. Returns the full-length distribution and the common value.
fn indifference(
    indifferent: &[usize],
    mixing: &[usize],
    mixing_len: usize,
    payoff: impl Fn(usize, usize) -> f64,
) -> Option<(Vec<f64>, f64)> {
    let k = mixing.len();
    let mut a = DMatrix::<f64>::zeros(k + 1, k + 1);
    let mut rhs = DVector::<f64>::zeros(k + 1);
    for (r, &own) in indifferent.iter().enumerate() {
        for (c, &other) in mixing.iter().enumerate() {
            a[(r, c)] = payoff(own, other);
        }
        a[(r, k)] = -1.0;
    }
    for c in 0..k {
        a[(k, c)] = 1.0;
    }
    rhs[k] = 1.0;
    let solution = a.clone().lu().solve(&rhs)?;
    if solution.iter().any(|v| !v.is_finite()) || (&a * &solution - &rhs).amax() > SUPPORT_TOLERANCE {
        return None;
    }
    let mut dist = vec![0.0; mixing_len];
    for (c, &b) in mixing.iter().enumerate() {
        if solution[c] < -SUPPORT_TOLERANCE {
            return None;
        }
        dist[b] = solution[c].max(0.0);
    }
    let total: f64 = dist.iter().sum();
    dist.iter_mut().for_each(|v| *v /= total);
    Some((dist, solution[k]))
}

/// All Nash equilibria of a two-player game found by enumerating equal-size
/// support pairs. Singular support systems are skipped.
pub fn support_enumeration_mixed_nash(game: &NormalFormGame) -> Result<Vec<StrategyProfile>> {
    let counts = game.action_counts();
    if counts.len() != 2 {
        return Err(Error::Unsupported(format!(
            "support enumeration needs exactly 2 players, got {}",
            counts.len()
        )));
    }
    let (m, n) = (counts[0], counts[1]);
    if m > MAX_SUPPORT_ACTIONS || n > MAX_SUPPORT_ACTIONS {
        return Err(Error::Unsupported(format!(
            "support enumeration is limited to {MAX_SUPPORT_ACTIONS} actions per player, got {m}x{n}"
        )));
    }
    let row = |r: usize, c: usize| game.pure_payoff(0, &[r, c]);
    let col = |r: usize, c: usize| game.pure_payoff(1, &[r, c]);

    let mut found: Vec<StrategyProfile> = Vec::new();
    for k in 1..=m.min(n) {
        let row_supports = combinations(m, k);
        let col_supports = combinations(n, k);
        for s in &row_supports {
            for t in &col_supports {
                // column mix q on t makes the row player indifferent over s, and vice versa
                let Some((q, v)) = indifference(s, t, n, row) else { continue };
                let Some((p, w)) = indifference(t, s, m, |c, r| col(r, c)) else { continue };
                let row_best = (0..m)
                    .map(|r| (0..n).map(|c| row(r, c) * q[c]).sum::<f64>())
                    .fold(f64::NEG_INFINITY, f64::max);
                let col_best = (0..n)
                    .map(|c| (0..m).map(|r| col(r, c) * p[r]).sum::<f64>())
                    .fold(f64::NEG_INFINITY, f64::max);
                if row_best > v + SUPPORT_TOLERANCE || col_best > w + SUPPORT_TOLERANCE {
                    continue;
                }
                let profile = StrategyProfile::normalized(vec![p, q])?;
                if found
                    .iter()
                    .all(|f| f.linf_distance(&profile) > DUPLICATE_TOLERANCE)
                {
                    found.push(profile);
                }
            }
        }
    }
    Ok(found)
}
