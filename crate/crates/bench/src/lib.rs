//! Deterministic inputs shared by the benchmarks.

use pioucrypt::RgbImage;

/// A `w` x `h` image with a fixed, value-rich pattern.
pub fn fixture_image(w: usize, h: usize) -> RgbImage {
    let data: Vec<u8> = (0..w * h * 3)
        .map(|i| (i.wrapping_mul(2_654_435_761) >> 7) as u8)
        .collect();
    RgbImage::from_interleaved(w, h, &data).expect("non-empty fixture")
}

/// Printable bytes of length `n`, for text-layer benchmarks.
pub fn fixture_text(n: usize) -> Vec<u8> {
    (0..n).map(|i| b' ' + (i * 7 % 95) as u8).collect()
}
