//! HTTP retrieval of WFDB records with retries and an on-disk cache.
//!
//! Cache entries are named by the SHA-256 of the full URL. Writes go through
//! a temporary file and a rename, and are serialized per key so concurrent
//! fetches of one URL download it once.

use std::collections::HashMap;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use sha2::{Digest, Sha256};

use super::wfdb::{assemble_record, parse_wfdb_header};
use crate::error::{Error, Result};
use crate::signal::Record;

pub const DEFAULT_BASE_URL: &str = "https://physionet.org/files";
pub const BASE_URL_ENV: &str = "TSFORGE_WFDB_BASE";
pub const CACHE_DIR_ENV: &str = "TSFORGE_CACHE_DIR";

#[derive(Debug, Clone, PartialEq)]
pub struct FetchConfig {
    pub base_url: String,
    pub cache_dir: PathBuf,
    /// Total tries per URL, including the first.
    pub attempts: u32,
    /// Delay before the second try; doubled after every further failure.
    pub initial_backoff: Duration,
    pub timeout: Duration,
}

impl Default for FetchConfig {
    fn default() -> Self {
        FetchConfig {
            base_url: DEFAULT_BASE_URL.to_string(),
            cache_dir: std::env::temp_dir().join("tsforge-cache"),
            attempts: 3,
            initial_backoff: Duration::from_millis(250),
            timeout: Duration::from_secs(60),
        }
    }
}

impl FetchConfig {
    /// Defaults overridden by `TSFORGE_WFDB_BASE` and `TSFORGE_CACHE_DIR`.
    pub fn from_env() -> Self {
        let mut config = FetchConfig::default();
        if let Some(base) = std::env::var(BASE_URL_ENV).ok().filter(|v| !v.is_empty()) {
            config.base_url = base;
        }
        if let Some(dir) = std::env::var_os(CACHE_DIR_ENV).filter(|v| !v.is_empty()) {
            config.cache_dir = PathBuf::from(dir);
        }
        config
    }
}

/// Cache file name for `url`.
pub fn cache_key(url: &str) -> String {
    hex::encode(Sha256::digest(url.as_bytes()))
}

fn join_url(parts: &[&str]) -> String {
    parts
        .iter()
        .enumerate()
        .map(|(i, p)| {
            if i == 0 {
                p.trim_end_matches('/')
            } else {
                p.trim_matches('/')
            }
        })
        .filter(|p| !p.is_empty())
        .collect::<Vec<_>>()
        .join("/")
}

pub struct WfdbFetcher {
    config: FetchConfig,
    agent: ureq::Agent,
    requests: AtomicUsize,
    locks: Mutex<HashMap<String, Arc<Mutex<()>>>>,
}

impl WfdbFetcher {
    pub fn new(config: FetchConfig) -> Self {
        let agent = ureq::AgentBuilder::new().timeout(config.timeout).build();
        WfdbFetcher {
            config,
            agent,
            requests: AtomicUsize::new(0),
            locks: Mutex::new(HashMap::new()),
        }
    }

    pub fn config(&self) -> &FetchConfig {
        &self.config
    }

    /// HTTP requests issued so far, retries included.
    pub fn network_requests(&self) -> usize {
        self.requests.load(Ordering::SeqCst)
    }

    pub fn header_url(&self, public_dir: &str, record_name: &str) -> String {
        join_url(&[
            &self.config.base_url,
            public_dir,
            &format!("{record_name}.hea"),
        ])
    }

    pub fn cache_path(&self, url: &str) -> PathBuf {
        self.config.cache_dir.join(cache_key(url))
    }

    /// Body of `url`, from the cache when present.
    pub fn get(&self, url: &str) -> Result<Vec<u8>> {
        let key = cache_key(url);
        let lock = {
            let mut locks = self.locks.lock().unwrap_or_else(|e| e.into_inner());
            locks.entry(key.clone()).or_default().clone()
        };
        let _guard = lock.lock().unwrap_or_else(|e| e.into_inner());

        let path = self.config.cache_dir.join(&key);
        if path.is_file() {
            return std::fs::read(&path).map_err(|e| Error::io(&path, e));
        }
        let body = self.download(url)?;
        self.store(&path, &body)?;
        Ok(body)
    }

    fn store(&self, path: &Path, body: &[u8]) -> Result<()> {
        let dir = &self.config.cache_dir;
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let tmp = path.with_extension(format!("part{}", std::process::id()));
        std::fs::write(&tmp, body).map_err(|e| Error::io(&tmp, e))?;
        std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    }

    fn download(&self, url: &str) -> Result<Vec<u8>> {
        let attempts = self.config.attempts.max(1);
        let mut backoff = self.config.initial_backoff;
        let mut last_error = String::new();
        for attempt in 1..=attempts {
            self.requests.fetch_add(1, Ordering::SeqCst);
            match self.agent.get(url).call() {
                Ok(response) => {
                    let mut body = Vec::new();
                    match response.into_reader().read_to_end(&mut body) {
                        Ok(_) => return Ok(body),
                        Err(e) => last_error = format!("reading body: {e}"),
                    }
                }
                Err(ureq::Error::Status(404, _)) => {
                    return Err(Error::NotFound {
                        url: url.to_string(),
                    })
                }
                Err(ureq::Error::Status(code, _)) if code < 500 => {
                    return Err(Error::Transport {
                        url: url.to_string(),
                        message: format!("HTTP status {code}"),
                    })
                }
                Err(ureq::Error::Status(code, _)) => last_error = format!("HTTP status {code}"),
                Err(ureq::Error::Transport(t)) => last_error = t.to_string(),
            }
            log::debug!("GET {url} failed (attempt {attempt}/{attempts}): {last_error}");
            if attempt < attempts {
                std::thread::sleep(backoff);
                backoff *= 2;
            }
        }
        Err(Error::Transport {
            url: url.to_string(),
            message: format!("{last_error} after {attempts} attempts"),
        })
    }

    /// Downloads `{base_url}/{public_dir}/{record_name}.hea` and the signal
    /// files it references.
    pub fn fetch_record(
        &self,
        public_dir: &str,
        record_name: &str,
        channels: Option<&[String]>,
    ) -> Result<Record> {
        let url = self.header_url(public_dir, record_name);
        self.fetch_header_url(&url, record_name, channels)
    }

    /// Like [`fetch_record`](Self::fetch_record) for a full header URL.
    pub fn fetch_header_url(
        &self,
        url: &str,
        id: &str,
        channels: Option<&[String]>,
    ) -> Result<Record> {
        let bytes = self.get(url)?;
        let text = String::from_utf8(bytes)
            .map_err(|_| Error::Header(format!("{url}: header is not valid UTF-8")))?;
        let header = parse_wfdb_header(&text)?;
        let dir = url.rsplit_once('/').map_or(url, |(d, _)| d);
        assemble_record(&header, id, channels, |file| {
            self.get(&join_url(&[dir, file]))
        })
    }
}
