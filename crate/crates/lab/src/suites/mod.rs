//! Experiment suites. Each suite turns a family of random or fixed instances
//! into report rows; randomness comes from per-instance streams.

mod classical;
mod counterexample;
mod invariants;
mod logconvex;
mod magnetic;
mod moyal;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha20Rng;
use serde_json::Value;

use crate::config::RunConfig;
use crate::report::{Claim, ExperimentReport, Verdict};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteInfo {
    pub id: &'static str,
    pub paper_ref: &'static str,
}

/// Registered suites, sorted by id.
pub const SUITES: &[SuiteInfo] = &[
    SuiteInfo { id: "clr", paper_ref: "Cwikel-Lieb-Rozenblum count of negative eigenvalues of -Delta + V in d = 3" },
    SuiteInfo {
        id: "core-invariants",
        paper_ref: "rearrangement identities: distribution inversion, mu of a sum, block majorization, norm reversal, tensor weak bound",
    },
    SuiteInfo { id: "counterexample", paper_ref: "failure of the weak L_4 estimate for f(t) = t^{-1/2} |log t|^{-1}" },
    SuiteInfo {
        id: "dyadic-split",
        paper_ref: "dyadic split bounds ||A_n||_inf <= 2^{n+2} and ||B_n||_2^2 <= ||(x (x) y) E[2^n, inf)||_2^2",
    },
    SuiteInfo {
        id: "logconvex",
        paper_ref: "entropy inequality on the simplex and logarithmic triangle inequality for L_{1,inf}",
    },
    SuiteInfo { id: "magnetic-cwikel", paper_ref: "magnetic Cwikel estimate ||M_f g(-Delta_b)||_E <= c ||f (x) g||_E" },
    SuiteInfo {
        id: "magnetic-hs",
        paper_ref: "Landau level identities ||M_f P_n||_2 = (b/2pi)^{1/2} ||f||_2 and ||M_f g(-Delta_b)||_2 = (2pi)^{-1/2} ||f||_2 ||g||_{L_2(nu)}",
    },
    SuiteInfo {
        id: "moyal-hs",
        paper_ref: "Moyal Hilbert-Schmidt formula ||x g(-i grad_theta)||_2 = (2pi)^{-d/4} ||x||_2 ||g||_2",
    },
    SuiteInfo { id: "moyal-isometry", paper_ref: "quantization isometry ||Op(f)||_{L_2(tau_theta)} = ||f||_2 on the Moyal plane" },
    SuiteInfo { id: "moyal-sobolev", paper_ref: "Sobolev-type Cwikel estimates on the Moyal plane" },
    SuiteInfo { id: "small-p", paper_ref: "Cwikel estimate for 0 < p < 2 against l_p(L_2) and weak l_p(L_2) norms" },
    SuiteInfo { id: "submajorization-532", paper_ref: "submajorization mu^2(M_f g(-i grad)) << 532 mu^2(f (x) g)" },
    SuiteInfo { id: "weak-l2", paper_ref: "weak L_2 Cwikel estimate for positive f, g with logarithmic cell norms" },
];

pub fn suite(id: &str) -> Option<&'static SuiteInfo> {
    SUITES.iter().find(|s| s.id == id)
}

pub fn suite_ids() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.id).collect()
}

pub(crate) fn run_suite(info: &'static SuiteInfo, cfg: &RunConfig) -> Vec<ExperimentReport> {
    let ctx = Ctx { cfg, info };
    match info.id {
        "clr" => magnetic::clr(&ctx),
        "core-invariants" => invariants::run(&ctx),
        "counterexample" => counterexample::run(&ctx),
        "dyadic-split" => classical::dyadic_split(&ctx),
        "logconvex" => logconvex::run(&ctx),
        "magnetic-cwikel" => magnetic::cwikel(&ctx),
        "magnetic-hs" => magnetic::hilbert_schmidt(&ctx),
        "moyal-hs" => moyal::hilbert_schmidt(&ctx),
        "moyal-isometry" => moyal::isometry(&ctx),
        "moyal-sobolev" => moyal::sobolev(&ctx),
        "small-p" => classical::small_p(&ctx),
        "submajorization-532" => classical::submajorization(&ctx),
        "weak-l2" => classical::weak_l2(&ctx),
        other => unreachable!("suite {other} is registered but has no runner"),
    }
}

pub(crate) type Params = BTreeMap<String, Value>;

/// Builds a parameter map from `key => value` pairs.
macro_rules! params {
    ($($k:expr => $v:expr),* $(,)?) => {{
        #[allow(unused_mut)]
        let mut m = $crate::suites::Params::new();
        $(m.insert(String::from($k), serde_json::json!($v));)*
        m
    }};
}
pub(crate) use params;

/// What a row computation produced.
#[derive(Clone, Debug)]
pub(crate) struct Outcome {
    pub observed: f64,
    pub verdict: Verdict,
    pub details: Params,
    pub plot: Vec<(f64, f64)>,
}

impl Outcome {
    /// `holds` when `observed <= bound`.
    pub fn at_most(observed: f64, bound: f64) -> Self {
        let verdict = if observed <= bound { Verdict::Holds } else { Verdict::Fails };
        Self { observed, verdict, details: Params::new(), plot: vec![] }
    }

    pub fn recorded(observed: f64) -> Self {
        Self { observed, verdict: Verdict::RecordedOnly, details: Params::new(), plot: vec![] }
    }

    pub fn with_verdict(observed: f64, holds: bool) -> Self {
        Self { observed, verdict: if holds { Verdict::Holds } else { Verdict::Fails }, details: Params::new(), plot: vec![] }
    }

    pub fn detail(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.details.insert(key.into(), v.into());
        self
    }

    pub fn plot(mut self, points: Vec<(f64, f64)>) -> Self {
        self.plot = points;
        self
    }
}

pub(crate) struct Ctx<'a> {
    pub cfg: &'a RunConfig,
    pub info: &'static SuiteInfo,
}

impl Ctx<'_> {
    pub fn rng(&self, label: &str, index: usize) -> ChaCha20Rng {
        rng::stream(self.cfg.seed, label, index as u64)
    }

    pub fn tol(&self, name: &str, default: f64) -> f64 {
        self.cfg.tolerance(&format!("{}.{name}", self.info.id), default)
    }

    /// Runs one row. Errors and panics turn into a `fails` row with the message
    /// in `details.error`; the rest of the run continues.
    pub fn row(&self, mut params: Params, claimed: Claim, f: impl FnOnce() -> anyhow::Result<Outcome>) -> ExperimentReport {
        params.insert("seed".into(), self.cfg.seed.into());
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f))
            .unwrap_or_else(|p| {
                let msg = p
                    .downcast_ref::<&str>()
                    .map(|s| s.to_string())
                    .or_else(|| p.downcast_ref::<String>().cloned())
                    .unwrap_or_else(|| "panic".into());
                Err(anyhow::anyhow!("panic: {msg}"))
            });
        let seconds = if self.cfg.timing { start.elapsed().as_secs_f64() } else { 0.0 };
        let (observed, verdict, details, plot) = match result {
            Ok(o) if o.observed.is_finite() => (Some(o.observed), o.verdict, o.details, o.plot),
            Ok(o) => {
                let mut d = o.details;
                d.insert("error".into(), "non-finite observed value".into());
                (None, Verdict::Fails, d, o.plot)
            }
            Err(e) => (None, Verdict::Fails, BTreeMap::from([("error".into(), format!("{e:#}").into())]), vec![]),
        };
        ExperimentReport {
            experiment: self.info.id.into(),
            paper_ref: self.info.paper_ref.into(),
            params,
            claimed,
            observed,
            verdict,
            seconds,
            details,
            plot,
        }
    }
}

/// Propagates the first failing instance so the rows built on them fail.
pub(crate) fn all_ok<T, E: std::fmt::Display>(items: &[Result<T, E>]) -> anyhow::Result<Vec<&T>> {
    items
        .iter()
        .enumerate()
        .map(|(i, r)| r.as_ref().map_err(|e| anyhow::anyhow!("instance {i}: {e}")))
        .collect()
}

pub(crate) fn log_uniform(rng: &mut ChaCha20Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// A complex amplitude with modulus in `[0.2, 2)`.
pub(crate) fn amplitude(rng: &mut ChaCha20Rng) -> cwikel_core::C64 {
    cwikel_core::C64::from_polar(rng.random_range(0.2..2.0), rng.random_range(0.0..std::f64::consts::TAU))
}
