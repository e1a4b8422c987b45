//! File formats: landmark exports, canonical motion files and metric tables.

mod landmarks;
mod motion;
mod table;

pub use landmarks::{parse_landmark_export, write_landmark_export};
pub use motion::{
    format_coord, parse_motion, parse_motion_with, write_motion, write_motion_csv, FORMAT_VERSION,
};
pub use table::{parse_table, write_table, TABLE_HEADER};

/// Reads a file, mapping failures to [`crate::Error::Io`].
pub fn read_file(path: &std::path::Path) -> crate::Result<Vec<u8>> {
    Ok(std::fs::read(path)?)
}
