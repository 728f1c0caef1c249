//! Dichroic-image end-to-end demonstration: PBM codec, image <-> bitstream
//! conversion, transmission through a channel scenario and pixel-error
//! accounting.
//!
//! Pixels are 1 = dark (the PBM convention); payload bits travel row-major
//! with dimensions out of band (the receiver knows the format).

use crate::ber::Quadrature;
use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::modem::{self, ModemConfig};
use crate::rng::ChannelSeed;
use crate::waveform::Waveform;

/// Largest accepted side length (dimension overflow guard).
pub const MAX_SIDE: u32 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl BinaryImage {
    pub fn new(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Domain("image sides must be >= 1 pixel".into()));
        }
        if width > MAX_SIDE || height > MAX_SIDE {
            return Err(Error::Domain(format!(
                "image side exceeds {MAX_SIDE} pixels: {width}x{height}"
            )));
        }
        if pixels.len() != width as usize * height as usize {
            return Err(Error::Shape(format!(
                "pixel count {} != {width}x{height}",
                pixels.len()
            )));
        }
        if pixels.iter().any(|&p| p > 1) {
            return Err(Error::Domain("pixels must be 0 or 1".into()));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    /// Deterministic geometric test pattern (stands in for the paper's
    /// figure): frame, diagonal stripes, a filled disc and a dark block.
    pub fn test_pattern(width: u32, height: u32) -> Self {
        let (w, h) = (width as i64, height as i64);
        let mut pixels = Vec::with_capacity((w * h) as usize);
        let (cx, cy) = (w / 2, h / 2);
        let radius = w.min(h) / 4;
        for y in 0..h {
            for x in 0..w {
                let border =
                    x < w / 25 + 1 || y < h / 25 + 1 || x >= w - w / 25 - 1 || y >= h - h / 25 - 1;
                let stripes = ((x + y) / 8) % 2 == 0 && x < w / 2 && y >= h / 2;
                let disc = (x - cx) * (x - cx) + (y - cy) * (y - cy) <= radius * radius;
                let block = x >= (3 * w) / 4 && y < h / 4;
                pixels.push(u8::from(border || stripes || disc || block));
            }
        }
        Self {
            width,
            height,
            pixels,
        }
    }

    /// Fraction of pixels differing from `other` (exact Hamming ratio).
    pub fn pixel_error_rate(&self, other: &BinaryImage) -> Result<f64> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::Shape(format!(
                "image dimensions differ: {}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )));
        }
        let flips = self
            .pixels
            .iter()
            .zip(&other.pixels)
            .filter(|(a, b)| a != b)
            .count();
        Ok(flips as f64 / self.pixels.len() as f64)
    }
}

/// Row-major pixel bits; the payload carries no header (dimensions travel
/// out of band).
pub fn image_to_bits(image: &BinaryImage) -> Vec<u8> {
    image.pixels.clone()
}

pub fn bits_to_image(bits: &[u8], width: u32, height: u32) -> Result<BinaryImage> {
    if bits.len() != width as usize * height as usize {
        return Err(Error::Shape(format!(
            "bit count {} != {width}x{height}",
            bits.len()
        )));
    }
    BinaryImage::new(width, height, bits.to_vec())
}

struct PbmCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> PbmCursor<'a> {
    fn err<T>(&self, message: &str) -> Result<T> {
        Err(Error::PbmParse {
            offset: self.pos,
            message: message.into(),
        })
    }

    /// Skip whitespace and `#` comments.
    fn skip_space(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b' ' | b'\t' | b'\r' | b'\n' => self.pos += 1,
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
    }

    fn read_u32(&mut self) -> Result<u32> {
        self.skip_space();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return self.err("expected a decimal integer");
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or(Error::PbmParse {
                offset: start,
                message: "integer overflow".into(),
            })
    }
}

/// Parse a P1 (ASCII) or P4 (packed binary) PBM payload.
pub fn load_pbm(bytes: &[u8]) -> Result<BinaryImage> {
    let mut cur = PbmCursor { bytes, pos: 0 };
    cur.skip_space();
    if bytes.len() < cur.pos + 2 {
        return cur.err("missing magic number");
    }
    let magic = &bytes[cur.pos..cur.pos + 2];
    if magic != b"P1" && magic != b"P4" {
        return cur.err("magic must be P1 or P4");
    }
    cur.pos += 2;
    let width = cur.read_u32()?;
    let height = cur.read_u32()?;
    if width == 0 || height == 0 {
        return cur.err("dimensions must be >= 1");
    }
    if width > MAX_SIDE || height > MAX_SIDE {
        return cur.err("dimension overflow (side > 2^16)");
    }
    let n = width as usize * height as usize;
    let mut pixels = Vec::with_capacity(n);
    if magic == b"P1" {
        while pixels.len() < n {
            cur.skip_space();
            if cur.pos >= bytes.len() {
                return cur.err("truncated raster");
            }
            match bytes[cur.pos] {
                b'0' => pixels.push(0),
                b'1' => pixels.push(1),
                _ => return cur.err("raster must contain only 0/1 digits"),
            }
            cur.pos += 1;
        }
    } else {
        // P4: exactly one whitespace byte after the header, then packed rows
        // padded to byte boundaries.
        if cur.pos >= bytes.len() || !bytes[cur.pos].is_ascii_whitespace() {
            return cur.err("expected single whitespace before raster");
        }
        cur.pos += 1;
        let row_bytes = width.div_ceil(8) as usize;
        for _ in 0..height {
            if cur.pos + row_bytes > bytes.len() {
                return cur.err("truncated raster");
            }
            let row = &bytes[cur.pos..cur.pos + row_bytes];
            for x in 0..width as usize {
                pixels.push((row[x / 8] >> (7 - (x % 8))) & 1);
            }
            cur.pos += row_bytes;
        }
    }
    BinaryImage::new(width, height, pixels)
}

/// Emit P4 with a single provenance comment line.
pub fn save_pbm(image: &BinaryImage) -> Vec<u8> {
    let header = format!(
        "P4\n# qrfol v{}\n{} {}\n",
        env!("CARGO_PKG_VERSION"),
        image.width,
        image.height
    );
    let row_bytes = image.width.div_ceil(8) as usize;
    let mut out = Vec::with_capacity(header.len() + row_bytes * image.height as usize);
    out.extend_from_slice(header.as_bytes());
    for row in image.pixels.chunks_exact(image.width as usize) {
        let mut packed = vec![0u8; row_bytes];
        for (x, &p) in row.iter().enumerate() {
            packed[x / 8] |= p << (7 - (x % 8));
        }
        out.extend_from_slice(&packed);
    }
    out
}

/// Pipe an image through the full modem + channel chain on one quadrature.
///
/// Returns the reconstructed image and the fraction of flipped pixels.
/// Sync failure surfaces as an error, never a garbled image.
pub fn transmit_image(
    image: &BinaryImage,
    cfg: &ModemConfig,
    channel: &Channel,
    seed: ChannelSeed,
    quadrature: Quadrature,
) -> Result<(BinaryImage, f64)> {
    let bits = image_to_bits(image);
    let frame = modem::modulate(&bits, cfg)?;
    let silent = Waveform::zeros_like(&frame);
    let received = match quadrature {
        Quadrature::X => channel.transmit(&frame, &silent, seed)?.0,
        Quadrature::Y => channel.transmit(&silent, &frame, seed)?.1,
    };
    let decided = modem::demodulate_frame(&received, cfg, bits.len())?;
    let out = bits_to_image(&decided, image.width, image.height)?;
    let rate = image.pixel_error_rate(&out)?;
    Ok((out, rate))
}

/// Dual-quadrature split mode: the first half of the row-major bits rides
/// quadrature X, the second half rides Y, in one simultaneous transmission.
pub fn transmit_image_split(
    image: &BinaryImage,
    cfg: &ModemConfig,
    channel: &Channel,
    seed: ChannelSeed,
) -> Result<(BinaryImage, f64)> {
    let bits = image_to_bits(image);
    if bits.len() < 2 {
        return Err(Error::Domain("split mode needs at least 2 pixels".into()));
    }
    let half = bits.len() / 2;
    let (first, second) = bits.split_at(half);
    let frame_x = modem::modulate(first, cfg)?;
    let frame_y = modem::modulate(second, cfg)?;
    // Zero-pad the shorter quadrature so both travel in one channel use.
    let len = frame_x.len().max(frame_y.len());
    let pad = |w: &Waveform| {
        let mut s = w.samples.clone();
        s.resize(len, 0.0);
        Waveform::new(s, w.sample_rate_hz)
    };
    let (rx, ry) = channel.transmit(&pad(&frame_x), &pad(&frame_y), seed)?;
    let mut decided = modem::demodulate_frame(&rx, cfg, first.len())?;
    decided.extend(modem::demodulate_frame(&ry, cfg, second.len())?);
    let out = bits_to_image(&decided, image.width, image.height)?;
    let rate = image.pixel_error_rate(&out)?;
    Ok((out, rate))
}
