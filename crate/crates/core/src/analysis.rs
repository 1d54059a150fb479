//! Per-channel intensity histograms, `h(r_k) = n_k` over the 256 levels.

use std::io;

use crate::image::RgbImage;

pub const CHANNEL_NAMES: [&str; 3] = ["red", "green", "blue"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HistogramReport {
    width: usize,
    height: usize,
    counts: [[u64; 256]; 3],
}

impl HistogramReport {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Counts for channel 0 (red), 1 (green) or 2 (blue).
    pub fn channel(&self, channel: usize) -> &[u64; 256] {
        &self.counts[channel]
    }

    pub fn channels(&self) -> &[[u64; 256]; 3] {
        &self.counts
    }

    /// Bin counts of one channel in ascending order. Two images whose
    /// histograms differ only by a relabeling of levels agree here.
    pub fn sorted_counts(&self, channel: usize) -> Vec<u64> {
        let mut bins = self.counts[channel].to_vec();
        bins.sort_unstable();
        bins
    }

    /// Writes `channel,level,count` followed by 768 data rows.
    pub fn write_csv<W: io::Write>(&self, writer: W) -> Result<(), csv::Error> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["channel", "level", "count"])?;
        for (name, bins) in CHANNEL_NAMES.iter().zip(&self.counts) {
            for (level, count) in bins.iter().enumerate() {
                out.write_record([*name, &level.to_string(), &count.to_string()])?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

pub fn histogram(image: &RgbImage) -> HistogramReport {
    let mut counts = [[0u64; 256]; 3];
    for (bins, plane) in counts.iter_mut().zip(image.planes()) {
        for &v in plane.data() {
            bins[v as usize] += 1;
        }
    }
    HistogramReport {
        width: image.width(),
        height: image.height(),
        counts,
    }
}
