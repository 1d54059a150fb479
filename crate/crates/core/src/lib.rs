//! PiouCrypt: a two-layer, lossless image cipher.
//!
//! The first layer shuffles rows and columns of each colour channel and
//! substitutes every sample through a bijective 256-entry table, all driven
//! by a Xorshift1024* stream. The key material of that layer is a small text
//! file. A Bravais lattice derived from the image dimensions is factorized
//! with non-negative matrix factorization; the left factor `W`, printed as
//! text, keys the second layer, an odd/even parity cipher that encrypts the
//! first layer's key file.
//!
//! ```
//! use pioucrypt::{decrypt_image, encrypt_image, PipelineConfig, RgbImage};
//!
//! let img = RgbImage::from_interleaved(2, 1, &[10, 20, 30, 40, 50, 60]).unwrap();
//! let bundle = encrypt_image(&img, &PipelineConfig::new(42)).unwrap();
//! let back = decrypt_image(&bundle.cipher_image, &bundle.oea_cipher_text, &bundle.oea_key_text).unwrap();
//! assert_eq!(back, img);
//! ```

pub mod analysis;
pub mod image;
pub mod lattice;
pub mod layer1;
pub mod netpbm;
pub mod oea;
pub mod pipeline;
pub mod prng;

pub use analysis::{histogram, HistogramReport};
pub use image::{ImageError, Plane, RgbImage};
pub use lattice::{
    derive_lattice_vectors, generate_lattice_points, nmf_multiplicative, FactorPair, LatticeError,
    LatticeVectors, Matrix, NmfConfig, PointMatrix, WindowSpec,
};
pub use layer1::{
    decrypt_layer1, encrypt_layer1, Layer1Error, Layer1Key, SubstitutionTable, SwapRecord,
};
pub use netpbm::{read_image, write_image, NetpbmError};
pub use oea::{oea_decrypt, oea_encrypt, OeaCipher, OeaError, OeaKey};
pub use pipeline::{
    analyze, decrypt_image, decrypt_pipeline, encrypt_image, encrypt_pipeline, EncryptionBundle,
    PipelineConfig, PipelineError,
};
pub use prng::{parse_seed, BitBiasSpec, LcgParams, PrngError, TlcgState, Xs1024State};
