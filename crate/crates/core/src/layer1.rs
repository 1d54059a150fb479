//! Pixel layer: row/column swaps on each channel followed by a bijective
//! 256-entry value substitution, plus the exact inverse.
//!
//! Key generation consumes the xorshift stream in a fixed order: `h` row
//! pairs, then `w` column pairs, then substitution draws for plain values
//! 255 down to 0, re-drawing any cipher value that is already taken.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::image::{Plane, RgbImage};
use crate::prng::Xs1024State;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Layer1Error {
    #[error("{axis:?} swap ({i}, {j}) out of range for a plane with {limit} {axis:?}s")]
    IndexOutOfRange {
        axis: Axis,
        i: usize,
        j: usize,
        limit: usize,
    },
    #[error("substitution table is not a permutation of 0..=255")]
    NonBijectiveTable,
    #[error("key is for a {key_w}x{key_h} image but the cipher is {img_w}x{img_h}")]
    DimensionMismatch {
        key_w: usize,
        key_h: usize,
        img_w: usize,
        img_h: usize,
    },
    #[error("invalid layer-1 key: {0}")]
    InvalidKey(String),
    #[error("layer-1 key line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    Row,
    Column,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SwapRecord {
    pub axis: Axis,
    pub i: usize,
    pub j: usize,
}

impl SwapRecord {
    pub fn row(i: usize, j: usize) -> Self {
        Self {
            axis: Axis::Row,
            i,
            j,
        }
    }

    pub fn column(i: usize, j: usize) -> Self {
        Self {
            axis: Axis::Column,
            i,
            j,
        }
    }
}

/// Entry `v` is the cipher value for plain value `v`. Always a permutation.
#[derive(Clone, PartialEq, Eq)]
pub struct SubstitutionTable([u8; 256]);

impl SubstitutionTable {
    pub fn new(entries: [u8; 256]) -> Result<Self, Layer1Error> {
        let mut seen = [false; 256];
        for &z in &entries {
            if std::mem::replace(&mut seen[z as usize], true) {
                return Err(Layer1Error::NonBijectiveTable);
            }
        }
        Ok(Self(entries))
    }

    pub fn identity() -> Self {
        Self(std::array::from_fn(|v| v as u8))
    }

    pub fn entries(&self) -> &[u8; 256] {
        &self.0
    }

    pub fn get(&self, plain: u8) -> u8 {
        self.0[plain as usize]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = [0u8; 256];
        for (plain, &cipher) in self.0.iter().enumerate() {
            inv[cipher as usize] = plain as u8;
        }
        Self(inv)
    }
}

impl fmt::Debug for SubstitutionTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("SubstitutionTable")
            .field(&&self.0[..])
            .finish()
    }
}

/// Everything needed to undo [`encrypt_layer1`]. Its text form is the
/// plaintext of the second layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layer1Key {
    width: usize,
    height: usize,
    row_swaps: Vec<SwapRecord>,
    col_swaps: Vec<SwapRecord>,
    lut: SubstitutionTable,
}

impl Layer1Key {
    pub fn new(
        width: usize,
        height: usize,
        row_swaps: Vec<SwapRecord>,
        col_swaps: Vec<SwapRecord>,
        lut: SubstitutionTable,
    ) -> Result<Self, Layer1Error> {
        if width == 0 || height == 0 {
            return Err(Layer1Error::InvalidKey(format!(
                "empty dimensions {width}x{height}"
            )));
        }
        if row_swaps.len() != height || col_swaps.len() != width {
            return Err(Layer1Error::InvalidKey(format!(
                "expected {height} row and {width} column swaps, got {} and {}",
                row_swaps.len(),
                col_swaps.len()
            )));
        }
        check_records(&row_swaps, Axis::Row, height)?;
        check_records(&col_swaps, Axis::Column, width)?;
        Ok(Self {
            width,
            height,
            row_swaps,
            col_swaps,
            lut,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn row_swaps(&self) -> &[SwapRecord] {
        &self.row_swaps
    }

    pub fn col_swaps(&self) -> &[SwapRecord] {
        &self.col_swaps
    }

    pub fn lut(&self) -> &SubstitutionTable {
        &self.lut
    }
}

fn check_records(records: &[SwapRecord], axis: Axis, limit: usize) -> Result<(), Layer1Error> {
    for r in records {
        if r.axis != axis || r.i >= limit || r.j >= limit {
            return Err(Layer1Error::IndexOutOfRange {
                axis: r.axis,
                i: r.i,
                j: r.j,
                limit,
            });
        }
    }
    Ok(())
}

/// Draws a complete key for a `width` x `height` image.
pub fn generate_layer1_key(rng: &mut Xs1024State, width: usize, height: usize) -> Layer1Key {
    assert!(width >= 1 && height >= 1, "image must be at least 1x1");
    let row_swaps = (0..height)
        .map(|_| {
            let i = rng.next_index(height - 1);
            let j = rng.next_index(height - 1);
            SwapRecord::row(i, j)
        })
        .collect();
    let col_swaps = (0..width)
        .map(|_| {
            let i = rng.next_index(width - 1);
            let j = rng.next_index(width - 1);
            SwapRecord::column(i, j)
        })
        .collect();

    let mut table = [0u8; 256];
    let mut taken = [false; 256];
    for plain in (0..256).rev() {
        let z = loop {
            let z = rng.next_index(255);
            if !taken[z] {
                break z;
            }
        };
        taken[z] = true;
        table[plain] = z as u8;
    }

    Layer1Key {
        width,
        height,
        row_swaps,
        col_swaps,
        lut: SubstitutionTable(table),
    }
}

/// Applies `records` in order. Every record is validated before any swap
/// happens, so an error leaves the plane untouched.
pub fn apply_swaps<'a, I>(plane: &mut Plane, records: I) -> Result<(), Layer1Error>
where
    I: IntoIterator<Item = &'a SwapRecord>,
    I::IntoIter: Clone,
{
    let records = records.into_iter();
    for r in records.clone() {
        let limit = match r.axis {
            Axis::Row => plane.height(),
            Axis::Column => plane.width(),
        };
        if r.i >= limit || r.j >= limit {
            return Err(Layer1Error::IndexOutOfRange {
                axis: r.axis,
                i: r.i,
                j: r.j,
                limit,
            });
        }
    }
    for r in records {
        match r.axis {
            Axis::Row => plane.swap_rows(r.i, r.j),
            Axis::Column => plane.swap_cols(r.i, r.j),
        }
    }
    Ok(())
}

/// Maps every sample through `lut` in one pass keyed on the original value.
pub fn apply_lut(image: &RgbImage, lut: &SubstitutionTable) -> RgbImage {
    let mut out = image.clone();
    for plane in out.planes_mut() {
        for v in plane.data_mut() {
            *v = lut.get(*v);
        }
    }
    out
}

pub fn encrypt_layer1(image: &RgbImage, rng: &mut Xs1024State) -> (RgbImage, Layer1Key) {
    let key = generate_layer1_key(rng, image.width(), image.height());
    let cipher = encrypt_with_key(image, &key).expect("generated key matches the image");
    (cipher, key)
}

/// Encrypts with a known key: row swaps, column swaps, then substitution.
pub fn encrypt_with_key(image: &RgbImage, key: &Layer1Key) -> Result<RgbImage, Layer1Error> {
    check_dimensions(image, key)?;
    let mut shuffled = image.clone();
    for plane in shuffled.planes_mut() {
        apply_swaps(plane, key.row_swaps.iter())?;
        apply_swaps(plane, key.col_swaps.iter())?;
    }
    Ok(apply_lut(&shuffled, &key.lut))
}

/// Inverse substitution, then column swaps reversed, then row swaps reversed.
pub fn decrypt_layer1(cipher: &RgbImage, key: &Layer1Key) -> Result<RgbImage, Layer1Error> {
    check_dimensions(cipher, key)?;
    let mut plain = apply_lut(cipher, &key.lut.inverse());
    for plane in plain.planes_mut() {
        apply_swaps(plane, key.col_swaps.iter().rev())?;
        apply_swaps(plane, key.row_swaps.iter().rev())?;
    }
    Ok(plain)
}

fn check_dimensions(image: &RgbImage, key: &Layer1Key) -> Result<(), Layer1Error> {
    if image.width() != key.width || image.height() != key.height {
        return Err(Layer1Error::DimensionMismatch {
            key_w: key.width,
            key_h: key.height,
            img_w: image.width(),
            img_h: image.height(),
        });
    }
    Ok(())
}

/// Text form: `PIOU1 <w> <h>`, then `R i j` per row swap, `C i j` per column
/// swap and `L v z` for `v` from 255 down to 0. Every line ends in `\n`.
pub fn serialize_layer1_key(key: &Layer1Key) -> String {
    let mut out = String::with_capacity(16 + 12 * (key.width + key.height + 256));
    writeln!(out, "PIOU1 {} {}", key.width, key.height).unwrap();
    for r in &key.row_swaps {
        writeln!(out, "R {} {}", r.i, r.j).unwrap();
    }
    for r in &key.col_swaps {
        writeln!(out, "C {} {}", r.i, r.j).unwrap();
    }
    for v in (0..256).rev() {
        writeln!(out, "L {} {}", v, key.lut.0[v]).unwrap();
    }
    out
}

fn parse_err(line: usize, message: impl Into<String>) -> Layer1Error {
    Layer1Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_number(token: &str, line: usize) -> Result<usize, Layer1Error> {
    // Canonical decimal only: no sign, no leading zeros.
    let canonical = !token.is_empty()
        && token.bytes().all(|b| b.is_ascii_digit())
        && (token == "0" || !token.starts_with('0'));
    if !canonical {
        return Err(parse_err(line, format!("expected a number, got {token:?}")));
    }
    token
        .parse()
        .map_err(|_| parse_err(line, format!("number {token:?} out of range")))
}

fn parse_triple(text: Option<&str>, line: usize, tag: &str) -> Result<(usize, usize), Layer1Error> {
    let text = text.ok_or_else(|| parse_err(line, format!("missing `{tag}` line")))?;
    let mut parts = text.split(' ');
    if parts.next() != Some(tag) {
        return Err(parse_err(
            line,
            format!("expected `{tag} <a> <b>`, got {text:?}"),
        ));
    }
    let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(parse_err(
            line,
            format!("expected `{tag} <a> <b>`, got {text:?}"),
        ));
    };
    Ok((parse_number(a, line)?, parse_number(b, line)?))
}

pub fn parse_layer1_key(text: &str) -> Result<Layer1Key, Layer1Error> {
    let body = text
        .strip_suffix('\n')
        .ok_or_else(|| parse_err(text.lines().count().max(1), "missing final newline"))?;
    let mut lines = body.split('\n');
    let mut lineno = 1;

    let (width, height) = parse_triple(lines.next(), lineno, "PIOU1")?;
    if width == 0 || height == 0 {
        return Err(parse_err(lineno, "image dimensions must be positive"));
    }

    let mut row_swaps = Vec::with_capacity(height);
    for _ in 0..height {
        lineno += 1;
        let (i, j) = parse_triple(lines.next(), lineno, "R")?;
        if i >= height || j >= height {
            return Err(parse_err(
                lineno,
                format!("row index out of range 0..{height}"),
            ));
        }
        row_swaps.push(SwapRecord::row(i, j));
    }
    let mut col_swaps = Vec::with_capacity(width);
    for _ in 0..width {
        lineno += 1;
        let (i, j) = parse_triple(lines.next(), lineno, "C")?;
        if i >= width || j >= width {
            return Err(parse_err(
                lineno,
                format!("column index out of range 0..{width}"),
            ));
        }
        col_swaps.push(SwapRecord::column(i, j));
    }
    let mut table = [0u8; 256];
    for v in (0..256usize).rev() {
        lineno += 1;
        let (plain, z) = parse_triple(lines.next(), lineno, "L")?;
        if plain != v {
            return Err(parse_err(
                lineno,
                format!("expected table entry for {v}, got {plain}"),
            ));
        }
        if z > 255 {
            return Err(parse_err(
                lineno,
                format!("substitution value {z} exceeds 255"),
            ));
        }
        table[v] = z as u8;
    }
    if lines.next().is_some() {
        return Err(parse_err(lineno + 1, "trailing content after table"));
    }
    let lut = SubstitutionTable::new(table)
        .map_err(|_| parse_err(lineno, "table is not a permutation"))?;
    Layer1Key::new(width, height, row_swaps, col_swaps, lut)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn image(w: usize, h: usize, seed: u64) -> RgbImage {
        let mut rng = Xs1024State::from_seed(seed).unwrap();
        let bytes: Vec<u8> = (0..w * h * 3).map(|_| rng.next_u64() as u8).collect();
        RgbImage::from_interleaved(w, h, &bytes).unwrap()
    }

    #[test]
    fn one_by_one_key_is_forced() {
        let mut rng = Xs1024State::from_seed(3).unwrap();
        let key = generate_layer1_key(&mut rng, 1, 1);
        assert_eq!(key.row_swaps(), &[SwapRecord::row(0, 0)]);
        assert_eq!(key.col_swaps(), &[SwapRecord::column(0, 0)]);
        assert!(SubstitutionTable::new(*key.lut().entries()).is_ok());
    }

    #[test]
    fn key_lengths_follow_dimensions() {
        let mut rng = Xs1024State::from_seed(8).unwrap();
        for (w, h) in [(1, 5), (7, 2), (13, 13)] {
            let key = generate_layer1_key(&mut rng, w, h);
            assert_eq!(key.row_swaps().len(), h);
            assert_eq!(key.col_swaps().len(), w);
        }
    }

    /// Replays the documented draw order directly on the generator.
    #[test]
    fn two_by_two_key_matches_replay() {
        let seed = 2024;
        let mut rng = Xs1024State::from_seed(seed).unwrap();
        let key = generate_layer1_key(&mut rng, 2, 2);

        let mut replay = Xs1024State::from_seed(seed).unwrap();
        let mut draw = |hi: i64| replay.next_in_range(0, hi).unwrap() as usize;
        let rows: Vec<_> = (0..2).map(|_| SwapRecord::row(draw(1), draw(1))).collect();
        let cols: Vec<_> = (0..2)
            .map(|_| SwapRecord::column(draw(1), draw(1)))
            .collect();
        let mut table = [None; 256];
        let mut used = std::collections::HashSet::new();
        for v in (0..256).rev() {
            loop {
                let z = draw(255);
                if used.insert(z) {
                    table[v] = Some(z as u8);
                    break;
                }
            }
        }
        assert_eq!(key.row_swaps(), rows.as_slice());
        assert_eq!(key.col_swaps(), cols.as_slice());
        let table: Vec<u8> = table.iter().map(|z| z.unwrap()).collect();
        assert_eq!(&key.lut().entries()[..], table.as_slice());
        assert_eq!(rng, replay);
    }

    #[test]
    fn swap_examples() {
        let mut p = Plane::new(2, 2, vec![1, 2, 3, 4]).unwrap();
        apply_swaps(&mut p, &[SwapRecord::row(0, 1)]).unwrap();
        assert_eq!(p.data(), &[3, 4, 1, 2]);

        let mut q = Plane::new(4, 4, (0..16).collect()).unwrap();
        apply_swaps(&mut q, &[SwapRecord::row(3, 3)]).unwrap();
        assert_eq!(q.data(), (0..16).collect::<Vec<u8>>().as_slice());
    }

    #[test]
    fn swaps_then_reversed_restore() {
        let original = Plane::new(5, 3, (0..15).collect()).unwrap();
        let records = [
            SwapRecord::row(0, 2),
            SwapRecord::column(4, 1),
            SwapRecord::row(1, 0),
            SwapRecord::column(0, 3),
        ];
        let mut p = original.clone();
        apply_swaps(&mut p, &records).unwrap();
        assert_ne!(p, original);
        apply_swaps(&mut p, records.iter().rev()).unwrap();
        assert_eq!(p, original);
    }

    #[test]
    fn out_of_range_swap_rejected_without_side_effects() {
        let mut p = Plane::new(3, 2, (0..6).collect()).unwrap();
        let err = apply_swaps(&mut p, &[SwapRecord::column(0, 1), SwapRecord::row(0, 2)]);
        assert_eq!(
            err,
            Err(Layer1Error::IndexOutOfRange {
                axis: Axis::Row,
                i: 0,
                j: 2,
                limit: 2
            })
        );
        assert_eq!(p.data(), &[0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn lut_examples() {
        let img = image(4, 3, 1);
        assert_eq!(apply_lut(&img, &SubstitutionTable::identity()), img);

        let mut table = *SubstitutionTable::identity().entries();
        table.swap(255, 10);
        let lut = SubstitutionTable::new(table).unwrap();
        let white = RgbImage::from_interleaved(1, 1, &[255, 255, 255]).unwrap();
        assert_eq!(apply_lut(&white, &lut).to_interleaved(), vec![10, 10, 10]);

        let mut rng = Xs1024State::from_seed(5).unwrap();
        let lut = generate_layer1_key(&mut rng, 1, 1).lut().clone();
        assert_eq!(apply_lut(&apply_lut(&img, &lut), &lut.inverse()), img);
    }

    #[test]
    fn non_bijective_table_rejected() {
        let mut table = *SubstitutionTable::identity().entries();
        table[0] = 1;
        assert_eq!(
            SubstitutionTable::new(table),
            Err(Layer1Error::NonBijectiveTable)
        );
    }

    #[test]
    fn one_pixel_cipher_is_a_lookup() {
        let img = RgbImage::from_interleaved(1, 1, &[7, 99, 200]).unwrap();
        let mut rng = Xs1024State::from_seed(77).unwrap();
        let (cipher, key) = encrypt_layer1(&img, &mut rng);
        let lut = key.lut();
        assert_eq!(
            cipher.to_interleaved(),
            vec![lut.get(7), lut.get(99), lut.get(200)]
        );
    }

    #[test]
    fn identity_key_decrypts_to_input() {
        let img = image(3, 2, 4);
        let key = Layer1Key::new(
            3,
            2,
            vec![SwapRecord::row(0, 0), SwapRecord::row(1, 1)],
            (0..3).map(|c| SwapRecord::column(c, c)).collect(),
            SubstitutionTable::identity(),
        )
        .unwrap();
        assert_eq!(decrypt_layer1(&img, &key).unwrap(), img);
    }

    #[test]
    fn worked_swap_example_inverts() {
        let plane = Plane::new(2, 2, vec![1, 2, 3, 4]).unwrap();
        let img = RgbImage::from_planes(plane.clone(), plane.clone(), plane).unwrap();
        let key = Layer1Key::new(
            2,
            2,
            vec![SwapRecord::row(0, 1), SwapRecord::row(0, 0)],
            vec![SwapRecord::column(0, 0), SwapRecord::column(1, 1)],
            SubstitutionTable::identity(),
        )
        .unwrap();
        let cipher = encrypt_with_key(&img, &key).unwrap();
        assert_eq!(cipher.red().data(), &[3, 4, 1, 2]);
        assert_eq!(decrypt_layer1(&cipher, &key).unwrap(), img);
    }

    #[test]
    fn round_trip_random_images() {
        let mut rng = Xs1024State::from_seed(123).unwrap();
        for trial in 0..100 {
            let img = image(64, 64, trial);
            let (cipher, key) = encrypt_layer1(&img, &mut rng);
            assert_eq!(cipher.width(), 64);
            assert_eq!(cipher.height(), 64);
            assert_eq!(decrypt_layer1(&cipher, &key).unwrap(), img);
        }
    }

    #[test]
    fn dimension_mismatch_detected() {
        let mut rng = Xs1024State::from_seed(1).unwrap();
        let key = generate_layer1_key(&mut rng, 4, 4);
        let img = image(4, 3, 0);
        assert!(matches!(
            decrypt_layer1(&img, &key),
            Err(Layer1Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn key_file_shape() {
        let mut rng = Xs1024State::from_seed(9).unwrap();
        let key = generate_layer1_key(&mut rng, 1, 1);
        let text = serialize_layer1_key(&key);
        assert_eq!(text.lines().count(), 259);
        assert!(text.starts_with("PIOU1 1 1\nR 0 0\nC 0 0\nL 255 "));
        assert!(text.ends_with('\n'));

        let key = generate_layer1_key(&mut rng, 512, 512);
        let text = serialize_layer1_key(&key);
        assert!(text.starts_with("PIOU1 512 512\n"));
        assert_eq!(parse_layer1_key(&text).unwrap(), key);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let mut rng = Xs1024State::from_seed(9).unwrap();
        let key = generate_layer1_key(&mut rng, 2, 3);
        let text = serialize_layer1_key(&key);

        let line_of = |e: Layer1Error| match e {
            Layer1Error::Parse { line, .. } => line,
            other => panic!("unexpected {other:?}"),
        };

        let bad = text.replacen("R ", "X ", 1);
        assert_eq!(line_of(parse_layer1_key(&bad).unwrap_err()), 2);

        let bad = text.replacen("C 0", "C 9", 1).replacen("C 1", "C 9", 1);
        assert_eq!(line_of(parse_layer1_key(&bad).unwrap_err()), 5);

        let truncated: String = text.lines().take(100).map(|l| format!("{l}\n")).collect();
        assert_eq!(line_of(parse_layer1_key(&truncated).unwrap_err()), 101);

        let doubled = format!("{text}L 0 0\n");
        assert_eq!(line_of(parse_layer1_key(&doubled).unwrap_err()), 263);

        let no_newline = text.trim_end();
        assert!(parse_layer1_key(no_newline).is_err());

        let padded = text.replacen("PIOU1 2 3", "PIOU1 02 3", 1);
        assert_eq!(line_of(parse_layer1_key(&padded).unwrap_err()), 1);

        // Duplicate substitution values.
        let lines: Vec<&str> = text.lines().collect();
        let first_l = lines.iter().position(|l| l.starts_with("L ")).unwrap();
        let z0 = lines[first_l].split(' ').nth(2).unwrap();
        let mut dup: Vec<String> = lines.iter().map(|s| s.to_string()).collect();
        dup[first_l + 1] = format!("L 254 {z0}");
        let dup = dup.join("\n") + "\n";
        assert!(matches!(
            parse_layer1_key(&dup),
            Err(Layer1Error::Parse { .. })
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn sorted_bins(plane: &Plane) -> Vec<usize> {
            let mut bins = vec![0usize; 256];
            for &v in plane.data() {
                bins[v as usize] += 1;
            }
            bins.sort_unstable();
            bins
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn lossless_and_histogram_permuting(
                w in 1usize..12,
                h in 1usize..12,
                img_seed in any::<u64>(),
                key_seed in any::<u64>(),
            ) {
                let img = image(w, h, img_seed);
                let mut rng = Xs1024State::from_seed(key_seed).unwrap();
                let (cipher, key) = encrypt_layer1(&img, &mut rng);
                prop_assert_eq!((cipher.width(), cipher.height()), (w, h));
                for (p, c) in img.planes().iter().zip(cipher.planes()) {
                    prop_assert_eq!(sorted_bins(p), sorted_bins(c));
                }
                prop_assert_eq!(decrypt_layer1(&cipher, &key).unwrap(), img);
            }

            #[test]
            fn serialization_round_trip(w in 1usize..20, h in 1usize..20, seed in any::<u64>()) {
                let mut rng = Xs1024State::from_seed(seed).unwrap();
                let key = generate_layer1_key(&mut rng, w, h);
                let text = serialize_layer1_key(&key);
                prop_assert_eq!(text.lines().count(), 1 + w + h + 256);
                let parsed = parse_layer1_key(&text).unwrap();
                prop_assert_eq!(serialize_layer1_key(&parsed), text);
                prop_assert_eq!(parsed, key);
            }

            #[test]
            fn draw_count_matches_contract(w in 1usize..10, h in 1usize..10, seed in any::<u64>()) {
                // Count draws by replaying with a shadow generator.
                let mut rng = Xs1024State::from_seed(seed).unwrap();
                let key = generate_layer1_key(&mut rng, w, h);
                let mut shadow = Xs1024State::from_seed(seed).unwrap();
                for _ in 0..2 * (w + h) {
                    shadow.next_u64();
                }
                let mut taken = [false; 256];
                let mut rejections = 0usize;
                for v in (0..256).rev() {
                    loop {
                        let z = (shadow.next_u64() % 256) as usize;
                        if !taken[z] {
                            taken[z] = true;
                            prop_assert_eq!(key.lut().entries()[v] as usize, z);
                            break;
                        }
                        rejections += 1;
                    }
                }
                prop_assert!(rejections > 0);
                prop_assert_eq!(&rng, &shadow);
            }
        }
    }
}
