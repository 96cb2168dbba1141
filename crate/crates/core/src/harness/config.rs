//! Experiment configuration.
//!
//! Config files are TOML with flat keys and lists. Only `experiment` is
//! required; every other key overrides the catalog default for that
//! experiment. Unknown keys are rejected.
//!
//! ```toml
//! experiment = "hadamard_small"
//! snr_db = [0, 10, 20, 30]
//! trials = 200
//! seed = 7
//! algorithms = ["tf-omp", "omp-k0"]
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentId {
    HadamardSmall,
    GaussianFixedK0,
    GaussianScalingK0,
    ExpDecay,
    Correlated,
    QtfCompare,
    MimoOverdetermined,
    GardSnrSweep,
    GardNoutSweep,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 9] = [
        ExperimentId::HadamardSmall,
        ExperimentId::GaussianFixedK0,
        ExperimentId::GaussianScalingK0,
        ExperimentId::ExpDecay,
        ExperimentId::Correlated,
        ExperimentId::QtfCompare,
        ExperimentId::MimoOverdetermined,
        ExperimentId::GardSnrSweep,
        ExperimentId::GardNoutSweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::HadamardSmall => "hadamard_small",
            ExperimentId::GaussianFixedK0 => "gaussian_fixed_k0",
            ExperimentId::GaussianScalingK0 => "gaussian_scaling_k0",
            ExperimentId::ExpDecay => "exp_decay",
            ExperimentId::Correlated => "correlated",
            ExperimentId::QtfCompare => "qtf_compare",
            ExperimentId::MimoOverdetermined => "mimo_overdetermined",
            ExperimentId::GardSnrSweep => "gard_snr_sweep",
            ExperimentId::GardNoutSweep => "gard_nout_sweep",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ExperimentId::HadamardSmall => "[I, H]/√n dictionary, n = 32, k0 = 3, ±1 signal, SNR sweep",
            ExperimentId::GaussianFixedK0 => "Gaussian design, p = 500, fixed k0, n sweep at 10 dB",
            ExperimentId::GaussianScalingK0 => "Gaussian design, p = 500, k0 = ⌊fraction·n⌋, n sweep at 10 dB",
            ExperimentId::ExpDecay => "[I, H]/√n dictionary, magnitudes [a, aα, aα²], α × SNR sweep",
            ExperimentId::Correlated => "32 × 64 design with column correlation ρ^|i−j|, ρ × SNR sweep",
            ExperimentId::QtfCompare => "TF-OMP vs QTF-OMP1/2 iteration caps and MSE, p = 500, n sweep",
            ExperimentId::MimoOverdetermined => "LMMSE + CS error correction, QPSK, real-equivalent model, SNR sweep",
            ExperimentId::GardSnrSweep => "robust regression n = 250, p = 30, SIR −10 dB, n_out × SNR sweep",
            ExperimentId::GardNoutSweep => "robust regression n = 250, p = 30, SIR −10 dB, 20 dB, n_out sweep",
        }
    }

    pub fn family(self) -> Family {
        match self {
            ExperimentId::MimoOverdetermined => Family::Mimo,
            ExperimentId::GardSnrSweep | ExperimentId::GardNoutSweep => Family::Robust,
            _ => Family::Sparse,
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

/// Which data model an experiment draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Sparse,
    Mimo,
    Robust,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    TfOmp,
    QtfOmp1,
    QtfOmp2,
    OmpK0,
    OmpSigma,
    Lasso,
    OracleLs,
    Lmmse,
    LmmseTfOmp,
    LmmseOmpK0,
    LmmseOmpSigma,
    TfGard,
    GardSigma,
    GardNout,
    Ls,
    LsWithoutOutliers,
}

impl Algorithm {
    pub const ALL: [Algorithm; 16] = [
        Algorithm::TfOmp,
        Algorithm::QtfOmp1,
        Algorithm::QtfOmp2,
        Algorithm::OmpK0,
        Algorithm::OmpSigma,
        Algorithm::Lasso,
        Algorithm::OracleLs,
        Algorithm::Lmmse,
        Algorithm::LmmseTfOmp,
        Algorithm::LmmseOmpK0,
        Algorithm::LmmseOmpSigma,
        Algorithm::TfGard,
        Algorithm::GardSigma,
        Algorithm::GardNout,
        Algorithm::Ls,
        Algorithm::LsWithoutOutliers,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::TfOmp => "tf-omp",
            Algorithm::QtfOmp1 => "qtf-omp1",
            Algorithm::QtfOmp2 => "qtf-omp2",
            Algorithm::OmpK0 => "omp-k0",
            Algorithm::OmpSigma => "omp-sigma",
            Algorithm::Lasso => "lasso",
            Algorithm::OracleLs => "oracle-ls",
            Algorithm::Lmmse => "lmmse",
            Algorithm::LmmseTfOmp => "lmmse+tf-omp",
            Algorithm::LmmseOmpK0 => "lmmse+omp-k0",
            Algorithm::LmmseOmpSigma => "lmmse+omp-sigma",
            Algorithm::TfGard => "tf-gard",
            Algorithm::GardSigma => "gard-sigma",
            Algorithm::GardNout => "gard-nout",
            Algorithm::Ls => "ls",
            Algorithm::LsWithoutOutliers => "ls-wo",
        }
    }

    pub fn family(self) -> Family {
        match self {
            Algorithm::Lmmse | Algorithm::LmmseTfOmp | Algorithm::LmmseOmpK0 | Algorithm::LmmseOmpSigma => Family::Mimo,
            Algorithm::TfGard | Algorithm::GardSigma | Algorithm::GardNout | Algorithm::Ls | Algorithm::LsWithoutOutliers => {
                Family::Robust
            }
            _ => Family::Sparse,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm `{s}`")))
    }
}

/// How the sparsity of the true signal is chosen at each grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SparsityRule {
    Fixed(usize),
    /// `k0 = max(1, ⌊fraction·n⌋)`.
    Fraction(f64),
}

impl SparsityRule {
    pub fn k0(self, n: usize) -> usize {
        match self {
            SparsityRule::Fixed(k) => k,
            SparsityRule::Fraction(f) => ((f * n as f64).floor() as usize).max(1),
        }
    }
}

/// A fully resolved experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub n: usize,
    pub p: usize,
    pub k0: SparsityRule,
    pub rho: f64,
    pub alpha: f64,
    /// Transmit / receive antennas of the complex MIMO model.
    pub nt: usize,
    pub nr: usize,
    pub n_out: usize,
    pub snr_db: Vec<f64>,
    pub sir_db: f64,
    pub n_list: Vec<usize>,
    pub rho_list: Vec<f64>,
    pub alpha_list: Vec<f64>,
    pub n_out_list: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub algorithms: Vec<Algorithm>,
    /// Zero the noise while σ-aware algorithms still receive the nominal σ.
    pub noiseless: bool,
}

fn snr_sweep() -> Vec<f64> {
    (0..=6).map(|i| 5.0 * i as f64).collect()
}

impl ExperimentConfig {
    /// Catalog defaults for `id`.
    pub fn default_for(id: ExperimentId) -> Self {
        use Algorithm::*;
        let base = Self {
            experiment: id,
            n: 32,
            p: 64,
            k0: SparsityRule::Fixed(3),
            rho: 0.0,
            alpha: 1.0,
            nt: 16,
            nr: 24,
            n_out: 10,
            snr_db: snr_sweep(),
            sir_db: -10.0,
            n_list: vec![],
            rho_list: vec![],
            alpha_list: vec![],
            n_out_list: vec![],
            trials: 1000,
            seed: 1,
            algorithms: vec![TfOmp, OmpK0, OmpSigma, Lasso],
            noiseless: false,
        };
        let n_sweep: Vec<usize> = (100..=450).step_by(50).collect();
        match id {
            ExperimentId::HadamardSmall => Self { trials: 10_000, ..base },
            ExperimentId::GaussianFixedK0 => Self {
                p: 500,
                k0: SparsityRule::Fixed(10),
                snr_db: vec![10.0],
                n_list: n_sweep,
                ..base
            },
            ExperimentId::GaussianScalingK0 => Self {
                p: 500,
                k0: SparsityRule::Fraction(0.05),
                snr_db: vec![10.0],
                n_list: n_sweep,
                ..base
            },
            ExperimentId::ExpDecay => Self { alpha_list: vec![1.0, 0.7, 0.5, 0.3], ..base },
            ExperimentId::Correlated => Self { rho_list: vec![0.0, 0.25, 0.5, 0.75], ..base },
            ExperimentId::QtfCompare => Self {
                p: 500,
                k0: SparsityRule::Fixed(10),
                snr_db: vec![10.0],
                n_list: n_sweep,
                algorithms: vec![TfOmp, QtfOmp1, QtfOmp2, OmpK0],
                ..base
            },
            ExperimentId::MimoOverdetermined => Self {
                n: 48,
                p: 32,
                snr_db: (0..=6).map(|i| 2.0 * i as f64).collect(),
                trials: 10_000,
                algorithms: vec![Lmmse, LmmseTfOmp, LmmseOmpK0, LmmseOmpSigma],
                ..base
            },
            ExperimentId::GardSnrSweep => Self {
                n: 250,
                p: 30,
                n_out_list: vec![10, 80],
                algorithms: vec![LsWithoutOutliers, Ls, TfGard, GardSigma, GardNout],
                ..base
            },
            ExperimentId::GardNoutSweep => Self {
                n: 250,
                p: 30,
                snr_db: vec![20.0],
                n_out_list: (10..=100).step_by(10).collect(),
                algorithms: vec![LsWithoutOutliers, Ls, TfGard, GardSigma, GardNout],
                ..base
            },
        }
    }

    /// Reads and resolves a TOML config file.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        raw.resolve()
    }

    /// Checks every parameter against the experiment's domain.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(format!("{}: {msg}", self.experiment)));
        if self.trials == 0 {
            return fail("trials must be at least 1".into());
        }
        if self.snr_db.is_empty() || self.snr_db.iter().any(|s| !s.is_finite()) {
            return fail("snr_db must be a non-empty list of finite values".into());
        }
        if self.algorithms.is_empty() {
            return fail("algorithm roster is empty".into());
        }
        let family = self.experiment.family();
        if let Some(a) = self.algorithms.iter().find(|a| a.family() != family) {
            return fail(format!("algorithm `{a}` does not apply to this experiment"));
        }
        match self.experiment {
            ExperimentId::HadamardSmall | ExperimentId::ExpDecay => {
                if !self.n.is_power_of_two() || self.n < 2 {
                    return fail(format!("n = {} must be a power of two", self.n));
                }
            }
            ExperimentId::GaussianFixedK0 | ExperimentId::GaussianScalingK0 | ExperimentId::QtfCompare => {
                if self.n_list.is_empty() {
                    return fail("n_list must be non-empty".into());
                }
                if self.n_list.iter().any(|&n| n < 2 || n >= self.p) {
                    return fail(format!("every n must lie in [2, p = {})", self.p));
                }
            }
            ExperimentId::Correlated => {
                if self.rho_list.is_empty() || self.rho_list.iter().any(|r| !(0.0..1.0).contains(r)) {
                    return fail("rho_list must be non-empty with values in [0, 1)".into());
                }
            }
            ExperimentId::MimoOverdetermined => {
                if self.nt == 0 || self.nr < self.nt {
                    return fail(format!("need nr ≥ nt ≥ 1 (got nt = {}, nr = {})", self.nt, self.nr));
                }
            }
            ExperimentId::GardSnrSweep | ExperimentId::GardNoutSweep => {
                if self.n <= self.p || self.p == 0 {
                    return fail(format!("need n > p ≥ 1 (got {}×{})", self.n, self.p));
                }
                if self.n_out_list.is_empty() || self.n_out_list.contains(&0) {
                    return fail("n_out_list must be non-empty with positive counts".into());
                }
                let cap = (self.n - self.p + 1) / 2;
                if let Some(k) = self.n_out_list.iter().find(|&&k| k > cap) {
                    return fail(format!("n_out = {k} exceeds ⌊(n − p + 1)/2⌋ = {cap}"));
                }
            }
        }
        if self.experiment == ExperimentId::ExpDecay
            && (self.alpha_list.is_empty() || self.alpha_list.iter().any(|a| !(*a > 0.0 && *a <= 1.0)))
        {
            return fail("alpha_list must be non-empty with values in (0, 1]".into());
        }
        if matches!(self.experiment, ExperimentId::ExpDecay) && self.k0 != SparsityRule::Fixed(3) {
            return fail("exponential decay signals need k0 = 3".into());
        }
        if family == Family::Sparse {
            let p = self.dictionary_p();
            let bad = match self.k0 {
                SparsityRule::Fixed(k) => k == 0 || k > p,
                SparsityRule::Fraction(f) => !(f > 0.0 && f < 1.0),
            };
            if bad {
                return fail(format!("invalid sparsity rule {:?}", self.k0));
            }
        }
        Ok(())
    }

    /// Column count of the dictionary actually generated.
    pub fn dictionary_p(&self) -> usize {
        match self.experiment {
            ExperimentId::HadamardSmall | ExperimentId::ExpDecay => 2 * self.n,
            _ => self.p,
        }
    }
}

/// On-disk form: every field optional, unknown keys rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: String,
    n: Option<usize>,
    p: Option<usize>,
    k0: Option<usize>,
    k0_fraction: Option<f64>,
    rho: Option<f64>,
    alpha: Option<f64>,
    nt: Option<usize>,
    nr: Option<usize>,
    n_out: Option<usize>,
    snr_db: Option<Vec<f64>>,
    sir_db: Option<f64>,
    n_list: Option<Vec<usize>>,
    rho_list: Option<Vec<f64>>,
    alpha_list: Option<Vec<f64>>,
    n_out_list: Option<Vec<usize>>,
    trials: Option<usize>,
    seed: Option<u64>,
    algorithms: Option<Vec<String>>,
    noiseless: Option<bool>,
}

impl RawConfig {
    fn resolve(self) -> Result<ExperimentConfig> {
        let id: ExperimentId = self.experiment.parse()?;
        let mut cfg = ExperimentConfig::default_for(id);
        if self.k0.is_some() && self.k0_fraction.is_some() {
            return Err(Error::Config("k0 and k0_fraction are mutually exclusive".into()));
        }
        if let Some(v) = self.n {
            cfg.n = v;
        }
        if let Some(v) = self.p {
            cfg.p = v;
        }
        if let Some(v) = self.k0 {
            cfg.k0 = SparsityRule::Fixed(v);
        }
        if let Some(v) = self.k0_fraction {
            cfg.k0 = SparsityRule::Fraction(v);
        }
        if let Some(v) = self.rho {
            cfg.rho = v;
            if self.rho_list.is_none() {
                cfg.rho_list = vec![v];
            }
        }
        if let Some(v) = self.alpha {
            cfg.alpha = v;
            if self.alpha_list.is_none() {
                cfg.alpha_list = vec![v];
            }
        }
        if let Some(v) = self.nt {
            cfg.nt = v;
        }
        if let Some(v) = self.nr {
            cfg.nr = v;
        }
        if let Some(v) = self.n_out {
            cfg.n_out = v;
            if self.n_out_list.is_none() {
                cfg.n_out_list = vec![v];
            }
        }
        if let Some(v) = self.snr_db {
            cfg.snr_db = v;
        }
        if let Some(v) = self.sir_db {
            cfg.sir_db = v;
        }
        if let Some(v) = self.n_list {
            cfg.n_list = v;
        }
        if let Some(v) = self.rho_list {
            cfg.rho_list = v;
        }
        if let Some(v) = self.alpha_list {
            cfg.alpha_list = v;
        }
        if let Some(v) = self.n_out_list {
            cfg.n_out_list = v;
        }
        if let Some(v) = self.trials {
            cfg.trials = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.algorithms {
            cfg.algorithms = v.iter().map(|s| s.parse()).collect::<Result<_>>()?;
        }
        if let Some(v) = self.noiseless {
            cfg.noiseless = v;
        }
        if id == ExperimentId::MimoOverdetermined {
            cfg.n = 2 * cfg.nr;
            cfg.p = 2 * cfg.nt;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_defaults_validate() {
        for id in ExperimentId::ALL {
            ExperimentConfig::default_for(id).validate().unwrap();
            assert_eq!(id.name().parse::<ExperimentId>().unwrap(), id);
        }
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
    }

    #[test]
    fn overrides_apply() {
        let cfg = ExperimentConfig::from_toml(
            r#"
            experiment = "gaussian_scaling_k0"
            k0_fraction = 0.1
            n_list = [100, 200]
            trials = 5
            seed = 99
            algorithms = ["tf-omp", "qtf-omp2"]
            "#,
        )
        .unwrap();
        assert_eq!(cfg.k0, SparsityRule::Fraction(0.1));
        assert_eq!(cfg.k0.k0(200), 20);
        assert_eq!(cfg.n_list, vec![100, 200]);
        assert_eq!((cfg.trials, cfg.seed), (5, 99));
        assert_eq!(cfg.algorithms, vec![Algorithm::TfOmp, Algorithm::QtfOmp2]);
        assert_eq!(cfg.p, 500);
    }

    #[test]
    fn unknown_keys_and_values_rejected() {
        assert!(ExperimentConfig::from_toml("experiment = \"hadamard_small\"\nbogus = 1").is_err());
        assert!(ExperimentConfig::from_toml("experiment = \"nope\"").is_err());
        assert!(ExperimentConfig::from_toml("experiment = \"hadamard_small\"\nalgorithms = [\"tf-gard\"]").is_err());
        assert!(ExperimentConfig::from_toml("experiment = \"hadamard_small\"\ntrials = 0").is_err());
        assert!(ExperimentConfig::from_toml("experiment = \"hadamard_small\"\nsnr_db = []").is_err());
        assert!(ExperimentConfig::from_toml("experiment = \"hadamard_small\"\nn = 24").is_err());
        assert!(ExperimentConfig::from_toml("experiment = \"correlated\"\nrho_list = [1.0]").is_err());
        assert!(ExperimentConfig::from_toml("experiment = \"gard_nout_sweep\"\nn_out_list = [120]").is_err());
        assert!(ExperimentConfig::from_toml("experiment = \"exp_decay\"\nk0 = 4").is_err());
        assert!(ExperimentConfig::from_toml("experiment = \"hadamard_small\"\nk0 = 3\nk0_fraction = 0.1").is_err());
        assert!(ExperimentConfig::from_toml("n = 3").is_err());
    }

    #[test]
    fn mimo_dimensions_follow_antennas() {
        let cfg = ExperimentConfig::from_toml("experiment = \"mimo_overdetermined\"\nnt = 4\nnr = 6").unwrap();
        assert_eq!((cfg.n, cfg.p), (12, 8));
        assert!(ExperimentConfig::from_toml("experiment = \"mimo_overdetermined\"\nnt = 6\nnr = 4").is_err());
    }
}
