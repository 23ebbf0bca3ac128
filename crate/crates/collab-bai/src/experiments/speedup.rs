//! Rounds-versus-speedup tables.
//!
//! Each row answers one question: at a fixed target error, how much less
//! time does the collaborative protocol need than a centralized
//! successive-rejects run, when the protocol is allowed `R` total rounds?
//! Both sides of the ratio are minimal-budget searches at the same target
//! and trial count, so the speedup is a ratio of two thresholds measured
//! by the same yardstick.
//!
//! A row's `R` counts total rounds, i.e. communication steps + 1:
//!
//! * `R = 1` leaves no room for any mid-run exchange, so the row is
//!   executed by a lone agent — with nobody to talk to, extra agents
//!   cannot contribute, and the measured speedup should hover near 1 or
//!   below (the lone agent also pays the protocol's budget split).
//! * `R ≥ 2` rows run the full workforce through `R − 1` elimination
//!   iterations; the final answer occupies the `R`-th round.
//!
//! Because every threshold is an empirical quantity, each row carries
//! conservative bounds derived from the search's probe intervals alongside
//! the point estimate; a monotonicity claim across rows should compare
//! those bounds, not the points (see
//! [`MinTimeResult::confident_bounds`](super::MinTimeResult::confident_bounds)).

use serde::Serialize;

use crate::collab::{CollabConfig, Variant};
use crate::instance::Instance;
use crate::rng::{stream, SeededRng};

use super::{min_time_for_error, AlgoConfig, ExperimentError, SearchOptions};

/// One row of a speedup table, at one total-round count.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpeedupRow {
    /// Workforce size the table models.  The `rounds == 1` row is executed
    /// by a lone agent (see the module docs) but still belongs to this
    /// table.
    pub agents: u32,
    /// Total rounds available to the collaborative side.
    pub rounds: u32,
    /// Target error rate both searches were run at.
    pub target_err: f64,
    /// Smallest accepted collaborative horizon.
    pub t_star: u64,
    /// Largest probed horizon whose error was confidently above the
    /// target; the true threshold cannot lie at or below it.
    pub t_star_low: Option<u64>,
    /// Smallest probed horizon whose error was confidently at or below
    /// the target; the true threshold cannot lie above it.
    pub t_star_high: Option<u64>,
    /// Smallest accepted centralized budget (shared by all rows).
    pub baseline_t: u64,
    /// Confident lower bound for the baseline threshold, as above.
    pub baseline_low: Option<u64>,
    /// Confident upper bound for the baseline threshold, as above.
    pub baseline_high: Option<u64>,
    /// `baseline_t / t_star`.
    pub speedup: f64,
}

/// The execution shape of one row: `(agents, engine iterations)`.
fn row_shape(agents: u32, total_rounds: u32) -> (u32, u32) {
    if total_rounds == 1 {
        (1, 1)
    } else {
        (agents, total_rounds - 1)
    }
}

/// Build a speedup table over `r_list` (in the given order).
///
/// The baseline threshold is searched once — centralized successive
/// rejects, with the search floor raised to the arm count it needs — and
/// reused as the numerator of every row.  Each row then searches the
/// smallest collaborative horizon meeting `target_err` and divides.  Rows
/// and baseline draw from separate seed streams keyed by the row's `R`,
/// so reordering `r_list` reorders the rows without changing any number.
pub fn speedup_table(
    instance: &Instance,
    agents: u32,
    r_list: &[u32],
    target_err: f64,
    trials: u64,
    root: &SeededRng,
    search: &SearchOptions,
) -> Result<Vec<SpeedupRow>, ExperimentError> {
    if r_list.is_empty() {
        return Err(ExperimentError::EmptyRounds);
    }
    if r_list.contains(&0) {
        return Err(ExperimentError::ZeroRoundRow);
    }

    let baseline_search = SearchOptions {
        floor: search.floor.max(instance.arms() as u64),
        ..*search
    };
    let baseline = min_time_for_error(
        |budget| AlgoConfig::SuccessiveRejects { budget },
        instance,
        target_err,
        trials,
        &root.child(stream::BASELINE),
        &baseline_search,
    )?;
    let (baseline_low, baseline_high) = baseline.confident_bounds(target_err);

    let mut rows = Vec::with_capacity(r_list.len());
    for &total_rounds in r_list {
        let (row_agents, iterations) = row_shape(agents, total_rounds);
        let result = min_time_for_error(
            |horizon| {
                AlgoConfig::Collab(CollabConfig {
                    agents: row_agents,
                    horizon,
                    rounds: iterations,
                    variant: Variant::Basic,
                })
            },
            instance,
            target_err,
            trials,
            &root.child(stream::ROW).child(u64::from(total_rounds)),
            search,
        )?;
        let (t_star_low, t_star_high) = result.confident_bounds(target_err);
        rows.push(SpeedupRow {
            agents,
            rounds: total_rounds,
            target_err,
            t_star: result.horizon,
            t_star_low,
            t_star_high,
            baseline_t: baseline.horizon,
            baseline_low,
            baseline_high,
            speedup: baseline.horizon as f64 / result.horizon as f64,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_zero_round_lists() {
        let instance = Instance::one_spike(4, 0.2, 0).unwrap();
        let root = SeededRng::new(0);
        assert_eq!(
            speedup_table(&instance, 4, &[], 0.1, 10, &root, &SearchOptions::default())
                .unwrap_err(),
            ExperimentError::EmptyRounds
        );
        assert_eq!(
            speedup_table(
                &instance,
                4,
                &[2, 0],
                0.1,
                10,
                &root,
                &SearchOptions::default()
            )
            .unwrap_err(),
            ExperimentError::ZeroRoundRow
        );
    }

    #[test]
    fn small_table_is_coherent_and_reproducible() {
        let instance = Instance::one_spike(4, 0.2, 0).unwrap();
        let root = SeededRng::new(77);
        let table = speedup_table(
            &instance,
            4,
            &[1, 2],
            0.2,
            60,
            &root,
            &SearchOptions::default(),
        )
        .unwrap();
        assert_eq!(table.len(), 2);
        assert_eq!(table[0].rounds, 1);
        assert_eq!(table[1].rounds, 2);
        for row in &table {
            assert_eq!(row.agents, 4);
            assert_eq!(row.target_err, 0.2);
            assert!(row.t_star >= 1);
            assert!(row.speedup > 0.0);
            // All rows share the one baseline search.
            assert_eq!(row.baseline_t, table[0].baseline_t);
            assert_eq!(
                row.speedup,
                row.baseline_t as f64 / row.t_star as f64,
                "speedup is the exact threshold ratio"
            );
            // The confident bounds, when present, must embrace the point
            // estimate's general position: a confident lower bound sits
            // below any confident upper bound.
            if let (Some(low), Some(high)) = (row.t_star_low, row.t_star_high) {
                assert!(low < high);
            }
        }
        // The lone-agent row cannot beat the full workforce: it pays the
        // same budget split with a quarter of the pull force.
        assert!(table[0].t_star > table[1].t_star);

        let again = speedup_table(
            &instance,
            4,
            &[1, 2],
            0.2,
            60,
            &root,
            &SearchOptions::default(),
        )
        .unwrap();
        assert_eq!(table, again);
    }

    #[test]
    fn row_order_follows_the_request_without_changing_values() {
        let instance = Instance::one_spike(4, 0.2, 0).unwrap();
        let root = SeededRng::new(78);
        let forward = speedup_table(
            &instance,
            4,
            &[1, 2],
            0.2,
            40,
            &root,
            &SearchOptions::default(),
        )
        .unwrap();
        let reversed = speedup_table(
            &instance,
            4,
            &[2, 1],
            0.2,
            40,
            &root,
            &SearchOptions::default(),
        )
        .unwrap();
        assert_eq!(forward[0], reversed[1]);
        assert_eq!(forward[1], reversed[0]);
    }
}
