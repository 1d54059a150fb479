//! End-to-end encryption and decryption.
//!
//! Sender side, in order:
//!
//! 1. pixel layer on the image (xorshift seeded with the master seed),
//! 2. lattice basis from the image dimensions (triple LCG seeded from the
//!    master seed),
//! 3. lattice points, rank-2 NMF, `W` serialized as the text-layer key,
//! 4. text layer over the serialized pixel-layer key.
//!
//! The three outputs (cipher image, text-layer ciphertext, text-layer key)
//! are written together or not at all. The key file must reach the receiver
//! over a separate secure channel.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::analysis::{histogram, HistogramReport};
use crate::image::RgbImage;
use crate::lattice::{
    derive_lattice_vectors, generate_lattice_points, nmf_multiplicative, parse_w, serialize_w,
    LatticeError, LatticeVectors, NmfConfig, WindowSpec,
};
use crate::layer1::{
    decrypt_layer1, encrypt_layer1, parse_layer1_key, serialize_layer1_key, Layer1Error,
};
use crate::netpbm::{self, NetpbmError};
use crate::oea::{oea_decrypt, oea_encrypt, parse_oea, serialize_oea, OeaError, OeaKey};
use crate::prng::{LcgParams, PrngError, TlcgState, Xs1024State, TLCG_DEFAULT_PARAMS};

pub const CIPHER_IMAGE_FILE: &str = "cipher.ppm";
pub const OEA_CIPHER_FILE: &str = "cipher.oea";
pub const OEA_KEY_FILE: &str = "OEA-key.txt";

/// Mixed into the master seed to seed the NMF initializer.
pub const NMF_SEED_SALT: u64 = 0xD1B5_4A32_D192_ED03;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Image(#[from] NetpbmError),
    #[error("the OEA key does not belong to this ciphertext")]
    KeyMismatch,
    #[error("key is for a {key_w}x{key_h} image but the cipher image is {img_w}x{img_h}")]
    DimensionMismatch {
        key_w: usize,
        key_h: usize,
        img_w: usize,
        img_h: usize,
    },
    #[error(transparent)]
    Prng(#[from] PrngError),
    #[error(transparent)]
    Layer1(#[from] Layer1Error),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Oea(#[from] OeaError),
    #[error("histogram CSV: {0}")]
    Csv(#[from] csv::Error),
}

impl PipelineError {
    fn io(path: &Path, source: io::Error) -> Self {
        Self::Io {
            path: path.to_owned(),
            source,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub seed: u64,
    pub tlcg_params: [LcgParams; 3],
    pub nmf: NmfConfig,
    pub out_dir: PathBuf,
}

impl PipelineConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            tlcg_params: TLCG_DEFAULT_PARAMS,
            nmf: NmfConfig {
                init_seed: seed ^ NMF_SEED_SALT,
                ..NmfConfig::default()
            },
            out_dir: PathBuf::from("."),
        }
    }

    pub fn with_out_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.out_dir = dir.into();
        self
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        for p in &self.tlcg_params {
            LcgParams::new(p.modulus, p.multiplier, p.increment)?;
        }
        self.nmf.validate()?;
        Ok(())
    }
}

/// Everything the sender produces.
#[derive(Debug, Clone, PartialEq)]
pub struct EncryptionBundle {
    pub cipher_image: RgbImage,
    pub oea_cipher_text: String,
    pub oea_key_text: String,
    pub lattice: LatticeVectors,
    pub lattice_points: usize,
}

/// Locations of a bundle written to disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundlePaths {
    pub cipher_image: PathBuf,
    pub oea_cipher: PathBuf,
    pub oea_key: PathBuf,
}

impl BundlePaths {
    pub fn in_dir(dir: &Path) -> Self {
        Self {
            cipher_image: dir.join(CIPHER_IMAGE_FILE),
            oea_cipher: dir.join(OEA_CIPHER_FILE),
            oea_key: dir.join(OEA_KEY_FILE),
        }
    }
}

/// Runs both layers in memory.
pub fn encrypt_image(
    image: &RgbImage,
    config: &PipelineConfig,
) -> Result<EncryptionBundle, PipelineError> {
    config.validate()?;

    let mut rng = Xs1024State::from_seed(config.seed)?;
    let (cipher_image, layer1_key) = encrypt_layer1(image, &mut rng);
    let plaintext = serialize_layer1_key(&layer1_key);

    let mut tlcg = TlcgState::from_master_seed(config.tlcg_params, config.seed);
    let window = WindowSpec::new(image.width() as u64, image.height() as u64)?;
    let lattice = derive_lattice_vectors(&mut tlcg, window)?;
    let points = generate_lattice_points(&lattice, window);
    let run = nmf_multiplicative(&points.to_matrix(), &config.nmf)?;
    let oea_key_text = serialize_w(run.factors.w());

    let oea_key = OeaKey::new(oea_key_text.as_bytes())?;
    let oea_cipher = oea_encrypt(plaintext.as_bytes(), &oea_key)?;

    Ok(EncryptionBundle {
        cipher_image,
        oea_cipher_text: serialize_oea(&oea_cipher),
        oea_key_text,
        lattice,
        lattice_points: points.len(),
    })
}

/// Recovers the plain image from the three bundle artifacts.
pub fn decrypt_image(
    cipher_image: &RgbImage,
    oea_cipher_text: &str,
    oea_key_text: &str,
) -> Result<RgbImage, PipelineError> {
    parse_w(oea_key_text)?;
    let oea_key = OeaKey::new(oea_key_text.as_bytes())?;
    let oea_cipher = parse_oea(oea_cipher_text)?;
    let plaintext = oea_decrypt(&oea_cipher, &oea_key).map_err(|e| match e {
        OeaError::KeyMismatch | OeaError::NonByteValue { .. } => PipelineError::KeyMismatch,
        other => other.into(),
    })?;
    // Only a wrong key of matching weight class could produce non-text here.
    let text = String::from_utf8(plaintext).map_err(|_| PipelineError::KeyMismatch)?;
    let key = parse_layer1_key(&text)?;
    if key.width() != cipher_image.width() || key.height() != cipher_image.height() {
        return Err(PipelineError::DimensionMismatch {
            key_w: key.width(),
            key_h: key.height(),
            img_w: cipher_image.width(),
            img_h: cipher_image.height(),
        });
    }
    Ok(decrypt_layer1(cipher_image, &key)?)
}

/// Reads the image, encrypts it and writes the bundle into
/// `config.out_dir`.
pub fn encrypt_pipeline(
    image_path: impl AsRef<Path>,
    config: &PipelineConfig,
) -> Result<(EncryptionBundle, BundlePaths), PipelineError> {
    let image = netpbm::read_image(image_path)?;
    let bundle = encrypt_image(&image, config)?;
    let paths = write_bundle(&bundle, &config.out_dir)?;
    Ok((bundle, paths))
}

/// Writes all three files via temporaries and renames; on failure nothing
/// new is left behind.
pub fn write_bundle(bundle: &EncryptionBundle, dir: &Path) -> Result<BundlePaths, PipelineError> {
    fs::create_dir_all(dir).map_err(|e| PipelineError::io(dir, e))?;
    let paths = BundlePaths::in_dir(dir);
    let items: [(&Path, Vec<u8>); 3] = [
        (&paths.cipher_image, netpbm::encode(&bundle.cipher_image)),
        (
            &paths.oea_cipher,
            bundle.oea_cipher_text.clone().into_bytes(),
        ),
        (&paths.oea_key, bundle.oea_key_text.clone().into_bytes()),
    ];
    let temp = |p: &Path| {
        let mut name = p.file_name().unwrap_or_default().to_os_string();
        name.push(".partial");
        p.with_file_name(name)
    };

    let mut staged = Vec::new();
    let mut committed = Vec::new();
    let result = (|| {
        for (path, bytes) in &items {
            let tmp = temp(path);
            staged.push(tmp.clone());
            fs::write(&tmp, bytes).map_err(|e| PipelineError::io(&tmp, e))?;
        }
        for (path, _) in &items {
            let tmp = temp(path);
            fs::rename(&tmp, path).map_err(|e| PipelineError::io(path, e))?;
            committed.push(path.to_path_buf());
        }
        Ok(())
    })();
    if let Err(e) = result {
        for p in staged.iter().chain(&committed) {
            let _ = fs::remove_file(p);
        }
        return Err(e);
    }
    Ok(paths)
}

fn read_text(path: &Path) -> Result<String, PipelineError> {
    fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))
}

/// Decrypts a bundle from disk and writes the recovered image to `out`.
pub fn decrypt_pipeline(
    cipher_image_path: impl AsRef<Path>,
    oea_cipher_path: impl AsRef<Path>,
    oea_key_path: impl AsRef<Path>,
    out: impl AsRef<Path>,
) -> Result<RgbImage, PipelineError> {
    let cipher = netpbm::read_image(cipher_image_path)?;
    let oea_text = read_text(oea_cipher_path.as_ref())?;
    let key_text = read_text(oea_key_path.as_ref())?;
    let plain = decrypt_image(&cipher, &oea_text, &key_text)?;
    netpbm::write_image(&plain, out)?;
    Ok(plain)
}

/// Histogram of the image at `image_path`, optionally written as CSV.
pub fn analyze(
    image_path: impl AsRef<Path>,
    csv_out: Option<&Path>,
) -> Result<HistogramReport, PipelineError> {
    let image = netpbm::read_image(image_path)?;
    let report = histogram(&image);
    if let Some(path) = csv_out {
        let file = fs::File::create(path).map_err(|e| PipelineError::io(path, e))?;
        report.write_csv(io::BufWriter::new(file))?;
    }
    Ok(report)
}
