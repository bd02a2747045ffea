#![allow(dead_code)]

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

pub mod fuzz;
pub mod oracles;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tsforge::ingest::wfdb::{checksum, encode_dat, SignalFormat};

/// Minimal HTTP/1.1 file server on loopback. Paths not in `files` get 404;
/// a path listed in `flaky` answers 503 that many times before serving.
pub struct FixtureServer {
    port: u16,
    requests: Arc<AtomicUsize>,
    flaky: Arc<Mutex<HashMap<String, usize>>>,
}

impl FixtureServer {
    pub fn start(files: HashMap<String, Vec<u8>>) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let port = listener.local_addr().unwrap().port();
        let requests = Arc::new(AtomicUsize::new(0));
        let flaky: Arc<Mutex<HashMap<String, usize>>> = Arc::default();
        let files = Arc::new(files);
        {
            let requests = requests.clone();
            let flaky = flaky.clone();
            std::thread::spawn(move || {
                for stream in listener.incoming().flatten() {
                    let files = files.clone();
                    let requests = requests.clone();
                    let flaky = flaky.clone();
                    std::thread::spawn(move || serve(stream, &files, &requests, &flaky));
                }
            });
        }
        FixtureServer {
            port,
            requests,
            flaky,
        }
    }

    pub fn base_url(&self) -> String {
        format!("http://127.0.0.1:{}", self.port)
    }

    pub fn requests(&self) -> usize {
        self.requests.load(Ordering::SeqCst)
    }

    pub fn fail_next(&self, path: &str, times: usize) {
        self.flaky.lock().unwrap().insert(path.to_string(), times);
    }
}

fn serve(
    stream: TcpStream,
    files: &HashMap<String, Vec<u8>>,
    requests: &AtomicUsize,
    flaky: &Mutex<HashMap<String, usize>>,
) {
    let mut reader = BufReader::new(stream.try_clone().unwrap());
    let mut stream = stream;
    loop {
        let mut request_line = String::new();
        if reader.read_line(&mut request_line).unwrap_or(0) == 0 {
            return;
        }
        loop {
            let mut line = String::new();
            if reader.read_line(&mut line).unwrap_or(0) == 0 || line == "\r\n" {
                break;
            }
        }
        requests.fetch_add(1, Ordering::SeqCst);
        let path = request_line
            .split_whitespace()
            .nth(1)
            .unwrap_or("/")
            .to_string();
        let fail = {
            let mut flaky = flaky.lock().unwrap();
            match flaky.get_mut(&path) {
                Some(n) if *n > 0 => {
                    *n -= 1;
                    true
                }
                _ => false,
            }
        };
        let (status, body): (&str, &[u8]) = if fail {
            ("503 Service Unavailable", b"busy")
        } else {
            match files.get(&path) {
                Some(b) => ("200 OK", b),
                None => ("404 Not Found", b"missing"),
            }
        };
        let head = format!(
            "HTTP/1.1 {status}\r\nContent-Length: {}\r\n\r\n",
            body.len()
        );
        if stream.write_all(head.as_bytes()).is_err() || stream.write_all(body).is_err() {
            return;
        }
    }
}

pub struct SyntheticChannel {
    pub name: String,
    pub adu: Vec<i32>,
}

/// Header text and signal file bytes for a single-file WFDB record.
pub fn wfdb_files(
    name: &str,
    fs: f64,
    channels: &[SyntheticChannel],
    format: SignalFormat,
    gain: f64,
    baseline: i32,
) -> (String, Vec<u8>) {
    let n = channels[0].adu.len();
    let mut hea = format!("{name} {} {fs} {n}\n", channels.len());
    for c in channels {
        hea.push_str(&format!(
            "{name}.dat {} {gain}({baseline})/mV 12 0 {} {} 0 {}\n",
            format.code(),
            c.adu[0],
            checksum(&c.adu),
            c.name
        ));
    }
    hea.push_str("# synthetic fixture\n");
    let adu: Vec<Vec<i32>> = channels.iter().map(|c| c.adu.clone()).collect();
    (hea, encode_dat(&adu, format).unwrap())
}

/// ECG-like synthetic channel in ADC units: a few harmonics of a heart
/// rate plus noise, centred on `baseline`.
pub fn ecg_like_adu(rng: &mut ChaCha8Rng, n: usize, fs: f64, gain: f64, baseline: i32) -> Vec<i32> {
    let rate = rng.gen_range(0.9..1.6);
    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
    (0..n)
        .map(|i| {
            let t = i as f64 / fs;
            let w = std::f64::consts::TAU * rate * t + phase;
            let mv = 1.2 * w.sin().powi(15).abs()
                + 0.2 * (2.0 * w).sin()
                + 0.1 * (5.0 * w).cos()
                + 0.05 * (std::f64::consts::TAU * 50.0 * t).sin()
                + rng.gen_range(-0.03..0.03);
            baseline + (mv * gain).round() as i32
        })
        .collect()
}

pub struct WfdbFixtureSet {
    pub files: HashMap<String, Vec<u8>>,
    pub record_names: Vec<String>,
    pub public_dir: String,
}

/// `count` three-lead records (I, II, V1) at 500 Hz, 5000 samples each,
/// stored under `/{public_dir}/`.
pub fn ecg_fixture_set(count: usize, seed: u64, format: SignalFormat) -> WfdbFixtureSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let public_dir = "ecgfix/1.0.0".to_string();
    let mut files = HashMap::new();
    let mut record_names = Vec::new();
    for k in 0..count {
        let name = format!("s{:04}", k + 1);
        let channels: Vec<SyntheticChannel> = ["I", "II", "V1"]
            .iter()
            .map(|lead| SyntheticChannel {
                name: lead.to_string(),
                adu: ecg_like_adu(&mut rng, 5000, 500.0, 200.0, 0),
            })
            .collect();
        let (hea, dat) = wfdb_files(&name, 500.0, &channels, format, 200.0, 0);
        files.insert(format!("/{public_dir}/{name}.hea"), hea.into_bytes());
        files.insert(format!("/{public_dir}/{name}.dat"), dat);
        record_names.push(name);
    }
    WfdbFixtureSet {
        files,
        record_names,
        public_dir,
    }
}

pub fn manifest_json(names: &[String], dir: &str) -> String {
    serde_json::json!({
        "record_name": names,
        "public_dir": vec![dir; names.len()],
    })
    .to_string()
}

pub fn random_signal(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}
