//! Scheme trials spread over threads.
//!
//! Thread `t` of `n` tries the schemes whose enumeration index is `t` modulo
//! `n`. A shared latch holds the smallest index that succeeded so far; trials
//! past it are skipped, and the reported solution is the one of the smallest
//! successful index, exactly as a sequential enumeration would report it.
//! Only matrix schemes are enumerated; `config.family` and `config.strategy`
//! are ignored.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::thread;

use eulerflow_core::preprocess::normalize;
use eulerflow_core::scheme::RoutingScheme;
use eulerflow_core::solver::{finish, Prepared, SearchStats, SolveReport, SolverConfig};
use eulerflow_core::{Instance, NormalizeError, Solution};

pub fn solve_parallel(inst: &Instance, config: &SolverConfig, threads: usize) -> Result<SolveReport, NormalizeError> {
    let norm = normalize(inst)?;
    let prepared = Prepared::new(&norm, config);
    let scheme_count = prepared.space.count().unwrap_or(u128::MAX);
    let threads = threads.max(1);
    let best = AtomicU64::new(u64::MAX);
    let trials = AtomicU64::new(0);
    let winner: Mutex<Option<(u64, Solution, RoutingScheme)>> = Mutex::new(None);
    let routed = AtomicU64::new(0);
    let exhausted = std::sync::atomic::AtomicBool::new(false);
    thread::scope(|s| {
        for t in 0..threads {
            let (prepared, best, trials, winner, routed, exhausted) =
                (&prepared, &best, &trials, &winner, &routed, &exhausted);
            s.spawn(move || {
                for (i, scheme) in prepared.space.iter().enumerate().skip(t).step_by(threads) {
                    let i = i as u64;
                    if i >= best.load(Ordering::Acquire) {
                        return;
                    }
                    let n = trials.fetch_add(1, Ordering::AcqRel);
                    if config.max_trials.is_some_and(|m| n >= m) {
                        exhausted.store(true, Ordering::Release);
                        return;
                    }
                    routed.fetch_add(1, Ordering::Relaxed);
                    if let Ok(sol) = prepared.run_scheme(&scheme) {
                        let mut w = winner.lock().unwrap();
                        if w.as_ref().is_none_or(|(j, _, _)| i < *j) {
                            *w = Some((i, sol, scheme));
                            best.fetch_min(i, Ordering::AcqRel);
                        }
                        return;
                    }
                }
            });
        }
    });
    let found = winner.into_inner().unwrap().map(|(_, sol, scheme)| (sol, Some(scheme)));
    let stats = SearchStats {
        trials: routed.load(Ordering::Relaxed),
        vertices_routed: 0,
        exhausted: found.is_none() && exhausted.load(Ordering::Acquire),
    };
    Ok(finish(inst, &norm, found, stats, scheme_count))
}

