//! In-memory RGB images as three separate 8-bit planes.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ImageError {
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    EmptyDimensions { width: usize, height: usize },
    #[error("expected {expected} samples for a {width}x{height} plane, got {actual}")]
    SampleCount {
        width: usize,
        height: usize,
        expected: usize,
        actual: usize,
    },
    #[error("channel planes disagree on dimensions")]
    PlaneMismatch,
}

/// One channel, row-major, `height` rows of `width` samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plane {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl Plane {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::EmptyDimensions { width, height });
        }
        let expected = width
            .checked_mul(height)
            .ok_or(ImageError::EmptyDimensions { width, height })?;
        if data.len() != expected {
            return Err(ImageError::SampleCount {
                width,
                height,
                expected,
                actual: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self, ImageError> {
        Self::new(width, height, vec![value; width.saturating_mul(height)])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.data[row * self.width + col]
    }

    pub fn row(&self, row: usize) -> &[u8] {
        &self.data[row * self.width..(row + 1) * self.width]
    }

    pub(crate) fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        let w = self.width;
        let (head, tail) = self.data.split_at_mut(hi * w);
        head[lo * w..(lo + 1) * w].swap_with_slice(&mut tail[..w]);
    }

    pub(crate) fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in self.data.chunks_exact_mut(self.width) {
            row.swap(i, j);
        }
    }
}

/// Red, green and blue planes of identical dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    planes: [Plane; 3],
}

impl RgbImage {
    pub fn from_planes(red: Plane, green: Plane, blue: Plane) -> Result<Self, ImageError> {
        let dims = (red.width, red.height);
        if (green.width, green.height) != dims || (blue.width, blue.height) != dims {
            return Err(ImageError::PlaneMismatch);
        }
        Ok(Self {
            planes: [red, green, blue],
        })
    }

    /// Builds an image from interleaved `RGBRGB...` samples.
    pub fn from_interleaved(width: usize, height: usize, rgb: &[u8]) -> Result<Self, ImageError> {
        let expected = width.saturating_mul(height).saturating_mul(3);
        if rgb.len() != expected {
            return Err(ImageError::SampleCount {
                width,
                height,
                expected,
                actual: rgb.len(),
            });
        }
        let mut channels = [
            Vec::with_capacity(rgb.len() / 3),
            Vec::with_capacity(rgb.len() / 3),
            Vec::with_capacity(rgb.len() / 3),
        ];
        for px in rgb.chunks_exact(3) {
            for (c, &v) in channels.iter_mut().zip(px) {
                c.push(v);
            }
        }
        let [r, g, b] = channels;
        Self::from_planes(
            Plane::new(width, height, r)?,
            Plane::new(width, height, g)?,
            Plane::new(width, height, b)?,
        )
    }

    /// Replicates one gray plane into all three channels.
    pub fn from_gray(gray: Plane) -> Self {
        Self {
            planes: [gray.clone(), gray.clone(), gray],
        }
    }

    pub fn width(&self) -> usize {
        self.planes[0].width
    }

    pub fn height(&self) -> usize {
        self.planes[0].height
    }

    pub fn planes(&self) -> &[Plane; 3] {
        &self.planes
    }

    pub fn planes_mut(&mut self) -> &mut [Plane; 3] {
        &mut self.planes
    }

    pub fn red(&self) -> &Plane {
        &self.planes[0]
    }

    pub fn green(&self) -> &Plane {
        &self.planes[1]
    }

    pub fn blue(&self) -> &Plane {
        &self.planes[2]
    }

    pub fn to_interleaved(&self) -> Vec<u8> {
        let [r, g, b] = &self.planes;
        let mut out = Vec::with_capacity(r.data.len() * 3);
        for ((&x, &y), &z) in r.data.iter().zip(&g.data).zip(&b.data) {
            out.extend_from_slice(&[x, y, z]);
        }
        out
    }
}
