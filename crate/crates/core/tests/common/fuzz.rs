//! Random pipeline configs around a small CSV data set, for checking that a
//! config which validates never fails at run time with a config error.

use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};
use tsforge::commands::{cmd_run, cmd_validate, EXIT_CONFIG, EXIT_OK};
use tsforge::ingest::write_csv;
use tsforge::Record;

use super::random_signal;

pub const FS: f64 = 125.0;
pub const ROWS: usize = 400;
pub const CHANNELS: [&str; 2] = ["ECG", "ABP"];

pub fn write_data(dir: &Path, rng: &mut ChaCha8Rng) {
    std::fs::create_dir_all(dir.join("data")).unwrap();
    for k in 0..2 {
        let mut r = Record::new(format!("r{k}"), FS);
        for c in CHANNELS {
            let mut x = random_signal(rng, ROWS);
            x[rng.gen_range(0..ROWS)] = f64::NAN;
            r.push_channel(c, x).unwrap();
        }
        write_csv(
            &r,
            std::fs::File::create(dir.join(format!("data/r{k}.csv"))).unwrap(),
        )
        .unwrap();
    }
}

/// Draws from `good` unless the per-config corruption rate says otherwise.
struct Gen<'a> {
    rng: &'a mut ChaCha8Rng,
    wild: f64,
}

impl Gen<'_> {
    fn either<T: Clone>(&mut self, good: &[T], bad: &[T]) -> T {
        if !bad.is_empty() && self.rng.gen_bool(self.wild) {
            bad.choose(self.rng).unwrap().clone()
        } else {
            good.choose(self.rng).unwrap().clone()
        }
    }

    fn coin(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn corrupt(&mut self) -> bool {
        self.rng.gen_bool(self.wild)
    }

    /// Nyquist is 62.5.
    fn freq(&mut self) -> f64 {
        self.either(&[0.5, 1.0, 5.0, 20.0, 40.0, 60.0], &[0.0, 62.5, 70.0, -1.0])
    }

    fn band(&mut self) -> (f64, f64) {
        let (a, b) = (self.freq(), self.freq());
        if self.corrupt() {
            (b.max(a), a.min(b))
        } else {
            (a.min(b), a.max(b) + 1.0)
        }
    }

    fn spectral_params(&mut self, step: &mut Map<String, Value>) {
        if self.coin(0.5) {
            step.insert("spectrum".into(), json!("welch"));
            if self.coin(0.5) {
                step.insert(
                    "nperseg".into(),
                    json!(self.either(&[16, 64, 256, 512, 5000], &[0, 1])),
                );
            }
            if self.coin(0.3) {
                step.insert(
                    "overlap".into(),
                    json!(self.either(&[0.0, 0.5, 0.9], &[1.0, -0.1])),
                );
            }
            if self.coin(0.2) {
                step.insert(
                    "window".into(),
                    json!(self.either(&["hann", "hamming", "rectangular"], &["boxcar"])),
                );
            }
        } else if self.coin(0.2) {
            step.insert("spectrum".into(), json!(self.either(&["ps"], &["fft"])));
            if self.corrupt() {
                step.insert("nperseg".into(), json!(64));
            }
        }
    }

    fn feature(&mut self) -> Value {
        let good = [
            "mean",
            "std",
            "basic_stats",
            "zcr",
            "entropy",
            "sample_entropy",
            "perm_entropy",
            "spectral_entropy",
            "mnf",
            "mdf",
            "stdf",
            "vcf",
            "psr",
            "peaks",
            "band_power",
            "band_std",
            "band_mnf",
            "band_mdf",
            "swt_features",
            "p2p",
            "rms",
        ];
        let name = self.either(&good, &["mnff", "Mean", "wavelet"]);
        let mut step = Map::new();
        step.insert("name".into(), json!(name));
        match name {
            "zcr" => {
                step.insert("center".into(), json!(self.coin(0.5)));
            }
            "entropy" if self.coin(0.5) => {
                step.insert("bins".into(), json!(self.either(&[2, 10, 1000], &[0])));
            }
            "sample_entropy" => {
                step.insert("m".into(), json!(self.either(&[1, 2, 3], &[0])));
                if self.coin(0.4) {
                    step.insert("r".into(), json!(self.either(&[0.2, 1.0], &[-0.1, 0.0])));
                }
            }
            "perm_entropy" => {
                step.insert("order".into(), json!(self.either(&[2, 3, 5], &[0, 1])));
                step.insert("delay".into(), json!(self.either(&[1, 2], &[0])));
            }
            "psr" => {
                self.spectral_params(&mut step);
                if self.coin(0.5) {
                    step.insert(
                        "int_limit_ratio".into(),
                        json!(self.either(&[0.01, 0.1, 0.5], &[0.0, 1.5, -0.2])),
                    );
                }
            }
            "peaks" => {
                self.spectral_params(&mut step);
                step.insert("n_peaks".into(), json!(self.either(&[1, 2, 3], &[0])));
                step.insert("height".into(), json!(self.coin(0.5)));
            }
            n if n.starts_with("band_") => {
                self.spectral_params(&mut step);
                let (low, high) = self.band();
                if !self.corrupt() {
                    step.insert("low".into(), json!(low));
                }
                step.insert("high".into(), json!(high));
            }
            "mnf" | "mdf" | "stdf" | "vcf" | "spectral_entropy" => self.spectral_params(&mut step),
            "swt_features" => {
                step.insert(
                    "wavelet".into(),
                    json!(self.either(&["haar", "db2", "db4"], &["db9"])),
                );
                if self.coin(0.7) {
                    // A 400-sample record fits 8 levels; windows may fit fewer.
                    step.insert("levels".into(), json!(self.either(&[1, 3, 5, 8], &[0, 11])));
                }
                if self.coin(0.3) {
                    step.insert("features".into(), json!(["nse", "mean"]));
                }
            }
            _ => {}
        }
        if self.coin(self.wild * 0.2) {
            step.insert("bogus".into(), json!(1));
        }
        Value::Object(step)
    }

    fn filter(&mut self) -> Value {
        match self.rng.gen_range(0..6) {
            0 => {
                let (low, high) = self.either(&[(-5.0, 5.0), (-1.0, 0.5)], &[(0.5, -1.0)]);
                json!({"name": "rm_outlier", "low": low, "high": high})
            }
            1 => {
                let (low_q, high_q) =
                    self.either(&[(0.05, 0.95), (0.0, 1.0)], &[(0.9, 0.5), (0.0, 1.2)]);
                json!({"name": "rm_outliers_quantile", "low_q": low_q, "high_q": high_q})
            }
            2 => json!({"name": "butter_filter", "cutoff": self.freq(),
                        "btype": self.either(&["lowpass", "highpass"], &["notch"]),
                        "order": self.either(&[1, 2, 4, 5], &[0])}),
            3 => {
                let (low, high) = self.band();
                json!({"name": "butter_filter", "cutoff": [low, high], "btype": "bandpass"})
            }
            4 => {
                json!({"name": "interpolate", "kind": self.either(&["linear", "cubic"], &["nearest"])})
            }
            _ => json!({"name": self.either(&["interpolate"], &["notch", "butter"])}),
        }
    }

    fn config(&mut self) -> Value {
        let kind = self.either(&["csv-glob"], &["wfdb-manifest", "parquet"]);
        let mut importer = Map::new();
        importer.insert("kind".into(), json!(kind));
        if kind == "wfdb-manifest" {
            importer.insert("manifest".into(), json!("missing.json"));
            importer.insert("channels".into(), json!(["II"]));
        } else {
            let paths = self.either(
                &[json!(["data/*.csv"]), json!(["data/r0.csv", "data/r1.csv"])],
                &[json!(["nope/*.csv"]), json!([])],
            );
            importer.insert("paths".into(), paths);
            if !self.corrupt() {
                importer.insert(
                    "fs".into(),
                    self.either(&[json!(FS)], &[json!(0), json!(-3), json!("fast")]),
                );
            }
            if self.coin(0.3) {
                let channels = self.either(&[vec!["ECG"], vec!["ABP", "ECG"]], &[vec!["SpO2"]]);
                importer.insert("channels".into(), json!(channels));
            }
            if self.coin(0.3) {
                let length = self.either(&[50, 200, 400], &[0, 1000]);
                let step = self.either(&[25, 100], &[0]);
                importer.insert("window".into(), json!({"length": length, "step": step}));
            }
        }

        let n_filters = self.rng.gen_range(0..3);
        let filters: Vec<Value> = (0..n_filters).map(|_| self.filter()).collect();
        let n_features = self.rng.gen_range(0..6);
        let shared: Vec<Value> = (0..n_features).map(|_| self.feature()).collect();
        let mut features = json!({ "shared": shared });
        if self.coin(0.2) {
            let channel = self.either(&["ECG", "ABP"], &["SpO2"]);
            let n = self.rng.gen_range(1..3);
            let own: Vec<Value> = (0..n).map(|_| self.feature()).collect();
            features["per_channel"] = json!({ channel: own });
        }

        let mut run = Map::new();
        run.insert(
            "output".into(),
            json!(self.either(&["out.csv"], &["missing_dir/out.csv"])),
        );
        if self.coin(0.5) {
            run.insert("n_jobs".into(), json!(self.either(&[1, 2, 4], &[0])));
        }
        if self.coin(0.3) {
            run.insert(
                "format".into(),
                json!(self.either(&["csv", "jsonl"], &["xml"])),
            );
        }
        if self.coin(0.2) {
            run.insert(
                "report".into(),
                json!(self.either(&["report.json"], &["missing_dir/report.json"])),
            );
        }

        let mut config =
            json!({ "importer": importer, "filters": filters, "features": features, "run": run });
        if self.coin(self.wild * 0.2) {
            config["extra"] = json!(true);
        }
        config
    }
}

/// A config drawn with a random corruption rate: about a third are drawn
/// clean, the rest carry a few invalid choices.
pub fn random_config(rng: &mut ChaCha8Rng) -> Value {
    let wild = if rng.gen_bool(0.35) {
        0.0
    } else {
        rng.gen_range(0.02..0.3)
    };
    Gen { rng, wild }.config()
}

#[derive(Debug, Default)]
pub struct FuzzOutcome {
    pub cases: usize,
    pub validated: usize,
    /// Validated configs whose run ended in a config error.
    pub violations: Vec<(Value, String)>,
}

/// Validates every config; those that pass are run, and a config-class exit
/// from the run is recorded as a violation.
pub fn check_corpus(dir: &Path, configs: &[Value]) -> FuzzOutcome {
    let mut outcome = FuzzOutcome::default();
    let path: PathBuf = dir.join("fuzz.json");
    for config in configs {
        outcome.cases += 1;
        std::fs::write(&path, serde_json::to_string(config).unwrap()).unwrap();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        if cmd_validate(&path, &mut out, &mut err) != EXIT_OK {
            continue;
        }
        outcome.validated += 1;
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = cmd_run(&path, None, None, &mut out, &mut err);
        if code == EXIT_CONFIG {
            outcome
                .violations
                .push((config.clone(), String::from_utf8_lossy(&err).into_owned()));
        }
    }
    outcome
}
