//! Odd/even attribute cipher over byte strings.
//!
//! Encryption splits the plaintext by byte parity into an even list `SE` and
//! an odd list `SO`, recording the routing in a marker bit string `SC`
//! (`1` = odd). With `mk = weight(key) * len(plaintext)`:
//!
//! * `SE[0] -= mk`, then prefix sums `SE[i] += SE[i-1]`, then `SE[last] -= mk`
//! * `SO[0] -= mk`, then prefix sums `SO[i] += SO[i-1]`, then `SO[last] += mk`
//!
//! Two redundancy sections of length `weight mod 10` are derived from the key,
//! cycling over its bytes: `red1[i]` is `1` for an even key byte and `0` for an
//! odd one, `red2[i] = key byte + mk`. Decryption re-derives both and rejects
//! the key on any difference.

use std::fmt::Write as _;

use thiserror::Error;

/// Upper bound (exclusive) on `weight * len(plaintext)`.
pub const MASTER_KEY_LIMIT: u128 = 1 << 62;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OeaError {
    #[error("OEA key is empty")]
    EmptyKey,
    #[error("master key {weight} x {length} does not fit below 2^62")]
    OverflowGuard { weight: u64, length: usize },
    #[error("key does not match the ciphertext")]
    KeyMismatch,
    #[error("malformed ciphertext: {0}")]
    MalformedCipher(String),
    #[error("recovered value {value} at plaintext position {position} is not a byte")]
    NonByteValue { position: usize, value: i64 },
    #[error("OEA ciphertext, section {section}: {message}")]
    Parse {
        section: &'static str,
        message: String,
    },
}

/// Secret key bytes and their weight (sum of byte values).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OeaKey {
    bytes: Vec<u8>,
    weight: u64,
}

impl OeaKey {
    pub fn new(bytes: impl Into<Vec<u8>>) -> Result<Self, OeaError> {
        let bytes = bytes.into();
        if bytes.is_empty() {
            return Err(OeaError::EmptyKey);
        }
        let weight = key_weight(&bytes)?;
        Ok(Self { bytes, weight })
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn weight(&self) -> u64 {
        self.weight
    }

    /// Length of each redundancy section.
    pub fn redundancy_len(&self) -> usize {
        (self.weight % 10) as usize
    }

    fn cycled(&self) -> impl Iterator<Item = u8> + '_ {
        self.bytes
            .iter()
            .copied()
            .cycle()
            .take(self.redundancy_len())
    }
}

pub fn key_weight(key: &[u8]) -> Result<u64, OeaError> {
    if key.is_empty() {
        return Err(OeaError::EmptyKey);
    }
    Ok(key.iter().map(|&b| u64::from(b)).sum())
}

/// `weight * length`, guarded to stay below 2^62.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MasterKey(i64);

impl MasterKey {
    pub fn new(weight: u64, length: usize) -> Result<Self, OeaError> {
        let product = weight as u128 * length as u128;
        if product >= MASTER_KEY_LIMIT {
            return Err(OeaError::OverflowGuard { weight, length });
        }
        Ok(Self(product as i64))
    }

    pub fn value(&self) -> i64 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OeaCipher {
    pub red1: Vec<bool>,
    pub sc: Vec<bool>,
    pub se: Vec<i64>,
    pub so: Vec<i64>,
    pub red2: Vec<i64>,
}

fn red1_bits(key: &OeaKey) -> Vec<bool> {
    key.cycled().map(|b| b % 2 == 0).collect()
}

fn red2_values(key: &OeaKey, mk: MasterKey) -> Vec<i64> {
    key.cycled().map(|b| i64::from(b) + mk.0).collect()
}

pub fn oea_encrypt(plaintext: &[u8], key: &OeaKey) -> Result<OeaCipher, OeaError> {
    let mk = MasterKey::new(key.weight, plaintext.len())?;
    let mut sc = Vec::with_capacity(plaintext.len());
    let mut se = Vec::new();
    let mut so = Vec::new();
    for &b in plaintext {
        let odd = b % 2 == 1;
        sc.push(odd);
        if odd {
            so.push(i64::from(b));
        } else {
            se.push(i64::from(b));
        }
    }

    // Under the guard |mk| < 2^62 and the running sums stay below
    // 2^62 + 255 * len, so plain i64 arithmetic cannot overflow.
    if let Some(first) = se.first_mut() {
        *first -= mk.0;
    }
    prefix_sum(&mut se);
    if let Some(last) = se.last_mut() {
        *last -= mk.0;
    }

    if let Some(first) = so.first_mut() {
        *first -= mk.0;
    }
    prefix_sum(&mut so);
    if let Some(last) = so.last_mut() {
        *last += mk.0;
    }

    Ok(OeaCipher {
        red1: red1_bits(key),
        sc,
        se,
        so,
        red2: red2_values(key, mk),
    })
}

fn prefix_sum(values: &mut [i64]) {
    for i in 1..values.len() {
        values[i] += values[i - 1];
    }
}

/// Undoes the prefix sums in place, last element first.
fn successive_differences(values: &mut [i64]) -> Result<(), OeaError> {
    for i in (1..values.len()).rev() {
        values[i] = values[i]
            .checked_sub(values[i - 1])
            .ok_or_else(|| OeaError::MalformedCipher("value overflow".into()))?;
    }
    Ok(())
}

fn offset(value: &mut i64, by: i64) -> Result<(), OeaError> {
    *value = value
        .checked_add(by)
        .ok_or_else(|| OeaError::MalformedCipher("value overflow".into()))?;
    Ok(())
}

pub fn oea_decrypt(cipher: &OeaCipher, key: &OeaKey) -> Result<Vec<u8>, OeaError> {
    let odd_markers = cipher.sc.iter().filter(|&&b| b).count();
    if odd_markers != cipher.so.len() || cipher.sc.len() - odd_markers != cipher.se.len() {
        return Err(OeaError::MalformedCipher(format!(
            "marker string routes {} even / {} odd values but sections hold {} / {}",
            cipher.sc.len() - odd_markers,
            odd_markers,
            cipher.se.len(),
            cipher.so.len()
        )));
    }
    if cipher.red1.len() != cipher.red2.len() {
        return Err(OeaError::MalformedCipher(format!(
            "redundancy sections differ in length ({} vs {})",
            cipher.red1.len(),
            cipher.red2.len()
        )));
    }
    let mk = MasterKey::new(key.weight, cipher.sc.len())?;
    if cipher.red1 != red1_bits(key) || cipher.red2 != red2_values(key, mk) {
        return Err(OeaError::KeyMismatch);
    }

    let mut se = cipher.se.clone();
    if let Some(last) = se.last_mut() {
        offset(last, mk.0)?;
    }
    successive_differences(&mut se)?;
    if let Some(first) = se.first_mut() {
        offset(first, mk.0)?;
    }

    let mut so = cipher.so.clone();
    if let Some(last) = so.last_mut() {
        offset(last, -mk.0)?;
    }
    successive_differences(&mut so)?;
    if let Some(first) = so.first_mut() {
        offset(first, mk.0)?;
    }

    let mut even = se.into_iter();
    let mut odd = so.into_iter();
    cipher
        .sc
        .iter()
        .enumerate()
        .map(|(position, &is_odd)| {
            let value = if is_odd { odd.next() } else { even.next() }.expect("counts checked");
            match u8::try_from(value) {
                Ok(b) if (b % 2 == 1) == is_odd => Ok(b),
                _ => Err(OeaError::NonByteValue { position, value }),
            }
        })
        .collect()
}

fn write_bits(out: &mut String, bits: &[bool]) {
    out.extend(bits.iter().map(|&b| if b { '1' } else { '0' }));
    out.push('\n');
}

fn write_values(out: &mut String, values: &[i64]) {
    for (k, v) in values.iter().enumerate() {
        if k > 0 {
            out.push(' ');
        }
        write!(out, "{v}").unwrap();
    }
    out.push('\n');
}

/// Six LF-terminated lines: the header
/// `PIOU2 <|red1|> <|sc|> <|se|> <|so|> <|red2|>`, then red1 bits, sc bits,
/// and the se, so and red2 values as signed decimals.
pub fn serialize_oea(cipher: &OeaCipher) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "PIOU2 {} {} {} {} {}",
        cipher.red1.len(),
        cipher.sc.len(),
        cipher.se.len(),
        cipher.so.len(),
        cipher.red2.len()
    )
    .unwrap();
    write_bits(&mut out, &cipher.red1);
    write_bits(&mut out, &cipher.sc);
    write_values(&mut out, &cipher.se);
    write_values(&mut out, &cipher.so);
    write_values(&mut out, &cipher.red2);
    out
}

fn parse_err(section: &'static str, message: impl Into<String>) -> OeaError {
    OeaError::Parse {
        section,
        message: message.into(),
    }
}

fn parse_bits(
    section: &'static str,
    line: Option<&str>,
    len: usize,
) -> Result<Vec<bool>, OeaError> {
    let line = line.ok_or_else(|| parse_err(section, "missing line"))?;
    if line.len() != len {
        return Err(parse_err(
            section,
            format!("expected {len} bits, got {}", line.len()),
        ));
    }
    line.bytes()
        .map(|b| match b {
            b'0' => Ok(false),
            b'1' => Ok(true),
            other => Err(parse_err(
                section,
                format!("invalid bit {:?}", other as char),
            )),
        })
        .collect()
}

fn parse_values(
    section: &'static str,
    line: Option<&str>,
    len: usize,
) -> Result<Vec<i64>, OeaError> {
    let line = line.ok_or_else(|| parse_err(section, "missing line"))?;
    if line.is_empty() {
        return if len == 0 {
            Ok(Vec::new())
        } else {
            Err(parse_err(section, format!("expected {len} values, got 0")))
        };
    }
    let values: Vec<i64> = line
        .split(' ')
        .map(|tok| {
            let canonical = tok == "0"
                || tok
                    .strip_prefix('-')
                    .unwrap_or(tok)
                    .bytes()
                    .enumerate()
                    .all(|(k, b)| b.is_ascii_digit() && !(k == 0 && b == b'0'))
                    && tok != "-"
                    && !tok.is_empty();
            if !canonical {
                return Err(parse_err(section, format!("invalid integer {tok:?}")));
            }
            tok.parse()
                .map_err(|_| parse_err(section, format!("integer {tok:?} out of range")))
        })
        .collect::<Result<_, _>>()?;
    if values.len() != len {
        return Err(parse_err(
            section,
            format!("expected {len} values, got {}", values.len()),
        ));
    }
    Ok(values)
}

pub fn parse_oea(text: &str) -> Result<OeaCipher, OeaError> {
    let body = text
        .strip_suffix('\n')
        .ok_or_else(|| parse_err("red2", "missing final newline"))?;
    let mut lines = body.split('\n');
    let header = lines.next().unwrap_or_default();
    let fields: Vec<&str> = header.split(' ').collect();
    let lens: Vec<usize> = match fields.split_first() {
        Some((&"PIOU2", rest)) if rest.len() == 5 => rest
            .iter()
            .map(|t| t.parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| parse_err("header", format!("bad section lengths in {header:?}")))?,
        _ => {
            return Err(parse_err(
                "header",
                format!("expected PIOU2 header, got {header:?}"),
            ))
        }
    };
    let cipher = OeaCipher {
        red1: parse_bits("red1", lines.next(), lens[0])?,
        sc: parse_bits("sc", lines.next(), lens[1])?,
        se: parse_values("se", lines.next(), lens[2])?,
        so: parse_values("so", lines.next(), lens[3])?,
        red2: parse_values("red2", lines.next(), lens[4])?,
    };
    if lines.next().is_some() {
        return Err(parse_err("red2", "trailing content after last section"));
    }
    Ok(cipher)
}
