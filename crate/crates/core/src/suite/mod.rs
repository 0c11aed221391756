//! The identity catalog and its runner.
//!
//! Every entry turns one distributional identity into a hypothesis test on
//! freshly simulated samples. Entries draw from their own seed, derived from
//! the master seed and the entry id, so a report depends only on the
//! configuration and the master seed, not on scheduling.

mod entries;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::process::BesqParams;
use crate::rng::derive_seed;
use crate::stats::{Skipped, TestResult, VerificationReport};

/// Catalog ids in report order.
pub const CATALOG: [&str; 20] = [
    "pms",
    "cor1",
    "post_hit",
    "post_hit_cond",
    "escape",
    "besa",
    "besa_m",
    "refprinc",
    "stop_time",
    "plus",
    "cond_moment",
    "pair_cov",
    "triple",
    "time_inversion",
    "time_inversion_cor",
    "gbm_decomp",
    "lamperti_s0",
    "lamperti",
    "distr",
    "final_cor",
];

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_240_517;

const ESCAPE_REASON: &str = "expected to fail: after hitting y the process restarts at y, so \
P(|R(tau_y + eps y) - y| <= 0.1 y) = P(|R(eps) - 1| <= 0.1) increases to 1 as eps -> 0; \
select it explicitly to run it";

/// Replaces the dimension of the sampler under test in one entry, leaving
/// reference samplers and targets alone. Used to check that the suite can
/// fail.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mutation {
    pub identity: String,
    pub delta_shift: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub alpha: f64,
    /// Standard errors allowed in mean comparisons.
    pub se_multiple: f64,
    /// Draws per side for exact-transition tests.
    pub n_samples: usize,
    /// Draws for moment and covariance tests.
    pub n_moment: usize,
    /// Paths for tests that need a first-passage time.
    pub n_hitting: usize,
    /// Grid step for first-passage detection.
    pub hitting_step: f64,
    /// Time after which an unfinished first-passage search gives up.
    pub hitting_cap: f64,
    /// Brownian grid step of the Lamperti clock.
    pub clock_step: f64,
    /// Mesh size of the hitting-density solver.
    pub solver_steps: usize,
    /// Run only these ids (all when empty).
    pub only: Vec<String>,
    /// Ids skipped unless named in `only`.
    pub skip: Vec<String>,
    pub mutation: Option<Mutation>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            alpha: 0.01,
            se_multiple: 3.0,
            n_samples: 100_000,
            n_moment: 1_000_000,
            n_hitting: 10_000,
            hitting_step: 1e-4,
            hitting_cap: 50.0,
            clock_step: 1e-3,
            solver_steps: 512,
            only: Vec::new(),
            skip: vec!["escape".to_string()],
            mutation: None,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must be in (0, 1), got {}", self.alpha));
        }
        if !(self.se_multiple > 0.0) {
            return bad(format!("se_multiple must be > 0, got {}", self.se_multiple));
        }
        for (name, n) in [
            ("n_samples", self.n_samples),
            ("n_moment", self.n_moment),
            ("n_hitting", self.n_hitting),
        ] {
            if n < 100 {
                return bad(format!("{name} must be >= 100, got {n}"));
            }
        }
        if !(self.hitting_step > 0.0 && self.hitting_step < 0.1) {
            return bad(format!("hitting_step must be in (0, 0.1), got {}", self.hitting_step));
        }
        if !(self.hitting_cap >= 1.0) {
            return bad(format!("hitting_cap must be >= 1, got {}", self.hitting_cap));
        }
        if !(self.clock_step > 0.0 && self.clock_step <= 0.05) {
            return bad(format!("clock_step must be in (0, 0.05], got {}", self.clock_step));
        }
        if self.solver_steps < 16 {
            return bad(format!("solver_steps must be >= 16, got {}", self.solver_steps));
        }
        for id in self.only.iter().chain(&self.skip).chain(self.mutation.as_ref().map(|m| &m.identity)) {
            if !CATALOG.contains(&id.as_str()) {
                return bad(format!("unknown identity `{id}`; known: {}", CATALOG.join(", ")));
            }
        }
        Ok(())
    }

    fn selected(&self) -> (Vec<&'static str>, Vec<Skipped>) {
        let mut run = Vec::new();
        let mut skipped = Vec::new();
        for id in CATALOG {
            if !self.only.is_empty() {
                if self.only.iter().any(|o| o == id) {
                    run.push(id);
                }
            } else if self.skip.iter().any(|s| s == id) {
                skipped.push(Skipped {
                    identity_id: id.to_string(),
                    reason: if id == "escape" {
                        ESCAPE_REASON.to_string()
                    } else {
                        "skipped by configuration".to_string()
                    },
                });
            } else {
                run.push(id);
            }
        }
        (run, skipped)
    }
}

/// What one entry sees: the configuration, its seed, and whether its sampler
/// is the mutated one.
pub(crate) struct Ctx<'a> {
    pub cfg: &'a SuiteConfig,
    pub seed: u64,
    pub delta_shift: f64,
}

impl Ctx<'_> {
    pub fn seed(&self, label: &str) -> u64 {
        derive_seed(self.seed, label)
    }

    /// Parameters for the reference side and for targets.
    pub fn truth(&self, mu: f64) -> Result<BesqParams<f64>> {
        BesqParams::from_mu(mu, 1.0)
    }

    /// Parameters for the sampler under test.
    pub fn tested(&self, mu: f64) -> Result<BesqParams<f64>> {
        BesqParams::from_mu(mu + self.delta_shift / 2.0, 1.0)
    }

    pub fn mutated(&self) -> bool {
        self.delta_shift != 0.0
    }
}

/// Runs every selected catalog entry. Entries run in parallel; the report
/// lists them in catalog order. A failed identity is a result with
/// `passed = false`; an error means the suite itself could not run.
pub fn run_identity_suite(config: &SuiteConfig, master_seed: u64) -> Result<VerificationReport> {
    config.validate()?;
    let (run, skipped) = config.selected();
    let results = run
        .par_iter()
        .map(|id| {
            let ctx = Ctx {
                cfg: config,
                seed: derive_seed(master_seed, id),
                delta_shift: config
                    .mutation
                    .as_ref()
                    .filter(|m| m.identity == *id)
                    .map_or(0.0, |m| m.delta_shift),
            };
            entries::run(id, &ctx).map(|r| {
                let r = r.labeled(id, ctx.seed);
                if ctx.mutated() {
                    r.with_detail("mutated_delta_shift", ctx.delta_shift)
                } else {
                    r
                }
            })
        })
        .collect::<Result<Vec<TestResult>>>()?;
    Ok(VerificationReport {
        suite_seed: master_seed,
        timestamp: None,
        config: serde_json::to_value(config)?,
        results,
        skipped,
    })
}
