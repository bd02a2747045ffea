//! Record acquisition: CSV files, WFDB headers and signal files (local or
//! fetched over HTTP with a disk cache), and rolling-window segmentation.

pub mod csv;
pub mod fetch;
pub mod wfdb;
pub mod window;

pub use self::csv::{read_csv, write_csv};
pub use fetch::{FetchConfig, WfdbFetcher};
pub use wfdb::{
    adc_to_physical, decode_dat, encode_dat, parse_wfdb_header, SignalFormat, WfdbHeader,
};
pub use window::{rolling_windows, WindowSpec};
