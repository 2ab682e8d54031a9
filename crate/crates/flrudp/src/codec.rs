//! Canonical model serialization, hex encoding, and chunking.
//!
//! A model is an ordered list of shaped 32-bit float tensors. Its canonical
//! byte form (also the `.fmp` file format) is:
//!
//! ```text
//! u32  tensor count
//! per tensor:
//!   u8   rank
//!   u32  dim[0..rank]
//!   f32  values, row-major   (IEEE-754 single, big-endian like everything)
//! ```
//!
//! The serialized stream is hex-encoded chunk by chunk for transport: the
//! stream is split into fixed-size chunks (the last may be shorter) and each
//! DATA frame carries one chunk as lowercase hex text.

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    /// A tensor's value count does not match the product of its dimensions.
    #[error("tensor has {values} values but shape implies {expected}")]
    TensorShape { values: usize, expected: usize },
    /// More than 255 dimensions cannot be expressed in the rank byte.
    #[error("tensor rank {0} exceeds 255")]
    RankTooLarge(usize),
    /// The byte stream is not a valid canonical model encoding.
    #[error("malformed model: {0}")]
    MalformedModel(&'static str),
    /// Odd length or a character outside `[0-9a-f]`.
    #[error("invalid hex text")]
    InvalidHex,
    /// A transfer must carry at least one packet.
    #[error("empty model stream cannot be chunked")]
    EmptyModel,
    /// Reassembly was attempted with sequence numbers missing.
    #[error("chunk set incomplete: missing sequence {0}")]
    IncompleteChunkSet(u32),
}

/// One shaped tensor of 32-bit floats, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<u32>,
    values: Vec<f32>,
}

impl Tensor {
    /// The product of an empty shape is 1: a scalar holds one value.
    pub fn new(shape: Vec<u32>, values: Vec<f32>) -> Result<Self, CodecError> {
        let expected = shape
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d as usize))
            .ok_or(CodecError::MalformedModel("shape product overflow"))?;
        if values.len() != expected {
            return Err(CodecError::TensorShape {
                values: values.len(),
                expected,
            });
        }
        Ok(Self { shape, values })
    }

    pub fn shape(&self) -> &[u32] {
        &self.shape
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }
}

/// Ordered model parameters; order is significant and preserved everywhere.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModelParameters {
    pub tensors: Vec<Tensor>,
}

impl ModelParameters {
    pub fn new(tensors: Vec<Tensor>) -> Self {
        Self { tensors }
    }

    pub fn shapes(&self) -> Vec<Vec<u32>> {
        self.tensors.iter().map(|t| t.shape.clone()).collect()
    }

    pub fn value_count(&self) -> usize {
        self.tensors.iter().map(|t| t.values.len()).sum()
    }

    pub fn has_non_finite(&self) -> bool {
        self.tensors
            .iter()
            .any(|t| t.values.iter().any(|v| !v.is_finite()))
    }
}

/// Serialize to the canonical byte layout. Same model, same bytes.
pub fn serialize_model(model: &ModelParameters) -> Result<Vec<u8>, CodecError> {
    let mut out = Vec::new();
    out.extend_from_slice(&(model.tensors.len() as u32).to_be_bytes());
    for tensor in &model.tensors {
        let rank = tensor.shape.len();
        if rank > 255 {
            return Err(CodecError::RankTooLarge(rank));
        }
        out.push(rank as u8);
        for &dim in &tensor.shape {
            out.extend_from_slice(&dim.to_be_bytes());
        }
        for &value in &tensor.values {
            out.extend_from_slice(&value.to_bits().to_be_bytes());
        }
    }
    Ok(out)
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CodecError> {
        let end = self
            .pos
            .checked_add(n)
            .ok_or(CodecError::MalformedModel("length overflow"))?;
        if end > self.data.len() {
            return Err(CodecError::MalformedModel("truncated stream"));
        }
        let slice = &self.data[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    fn take_u32(&mut self) -> Result<u32, CodecError> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().unwrap()))
    }
}

/// Exact inverse of [`serialize_model`] on its image.
pub fn deserialize_model(data: &[u8]) -> Result<ModelParameters, CodecError> {
    let mut reader = Reader { data, pos: 0 };
    let count = reader.take_u32()?;
    let mut tensors = Vec::new();
    for _ in 0..count {
        let rank = reader.take(1)?[0] as usize;
        let mut shape = Vec::with_capacity(rank);
        for _ in 0..rank {
            shape.push(reader.take_u32()?);
        }
        let value_count = shape
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d as usize))
            .ok_or(CodecError::MalformedModel("value-count overflow"))?;
        let byte_count = value_count
            .checked_mul(4)
            .ok_or(CodecError::MalformedModel("value-count overflow"))?;
        let raw = reader.take(byte_count)?;
        let values = raw
            .chunks_exact(4)
            .map(|b| f32::from_bits(u32::from_be_bytes(b.try_into().unwrap())))
            .collect();
        tensors.push(Tensor { shape, values });
    }
    if reader.pos != data.len() {
        return Err(CodecError::MalformedModel("trailing bytes"));
    }
    Ok(ModelParameters { tensors })
}

const HEX_DIGITS: &[u8; 16] = b"0123456789abcdef";

/// Lowercase hex, two characters per byte.
pub fn to_hex(data: &[u8]) -> String {
    let mut out = String::with_capacity(data.len() * 2);
    for &byte in data {
        out.push(HEX_DIGITS[(byte >> 4) as usize] as char);
        out.push(HEX_DIGITS[(byte & 0x0f) as usize] as char);
    }
    out
}

fn hex_value(c: u8) -> Result<u8, CodecError> {
    match c {
        b'0'..=b'9' => Ok(c - b'0'),
        b'a'..=b'f' => Ok(c - b'a' + 10),
        _ => Err(CodecError::InvalidHex),
    }
}

/// Inverse of [`to_hex`]. Strict: even length, lowercase `[0-9a-f]` only.
pub fn from_hex(text: &str) -> Result<Vec<u8>, CodecError> {
    let bytes = text.as_bytes();
    if bytes.len() % 2 != 0 {
        return Err(CodecError::InvalidHex);
    }
    bytes
        .chunks_exact(2)
        .map(|pair| Ok(hex_value(pair[0])? << 4 | hex_value(pair[1])?))
        .collect()
}

/// The serialized model split into `np = ceil(len / chunk_size)` chunks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkSet {
    chunks: Vec<Vec<u8>>,
    chunk_size: usize,
}

impl ChunkSet {
    pub fn np(&self) -> u32 {
        self.chunks.len() as u32
    }

    pub fn chunk_size(&self) -> usize {
        self.chunk_size
    }

    /// Chunk for sequence number `x` (1-based).
    pub fn chunk(&self, x: u32) -> &[u8] {
        &self.chunks[(x - 1) as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &[u8])> {
        self.chunks
            .iter()
            .enumerate()
            .map(|(i, c)| (i as u32 + 1, c.as_slice()))
    }
}

/// Split a serialized model into sequence-numbered chunks.
pub fn chunk_model(data: &[u8], chunk_size: usize) -> Result<ChunkSet, CodecError> {
    assert!(chunk_size >= 1, "chunk_size must be positive");
    if data.is_empty() {
        return Err(CodecError::EmptyModel);
    }
    let chunks = data.chunks(chunk_size).map(<[u8]>::to_vec).collect();
    Ok(ChunkSet { chunks, chunk_size })
}

/// Concatenate chunks `1..=np` back into the original stream.
///
/// `chunks` is keyed by sequence number, matching the receiver's store.
pub fn reassemble(np: u32, chunks: &BTreeMap<u32, Vec<u8>>) -> Result<Vec<u8>, CodecError> {
    let mut out = Vec::new();
    for x in 1..=np {
        let chunk = chunks.get(&x).ok_or(CodecError::IncompleteChunkSet(x))?;
        out.extend_from_slice(chunk);
    }
    Ok(out)
}
