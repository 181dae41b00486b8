//! Netpbm and raw-volume I/O, feature quantization, neighborhood graphs and
//! synthetic noise.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::model::{EdgeSet, Labeling, Rational};

/// Grayscale image or volume, samples in row-major order (x fastest, then
/// y, then z).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    pub width: usize,
    pub height: usize,
    pub depth: usize,
    pub max_value: u16,
    pub samples: Vec<u16>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, depth: usize, max_value: u16, samples: Vec<u16>) -> Result<Self> {
        if width == 0 || height == 0 || depth == 0 {
            return Err(Error::Format(format!("empty dimensions {width}x{height}x{depth}")));
        }
        if max_value == 0 {
            return Err(Error::Format("max value must be positive".into()));
        }
        if samples.len() != width * height * depth {
            return Err(Error::Format(format!(
                "{} samples for a {width}x{height}x{depth} raster",
                samples.len()
            )));
        }
        if let Some(s) = samples.iter().find(|&&s| s > max_value) {
            return Err(Error::Format(format!("sample {s} exceeds max value {max_value}")));
        }
        Ok(RasterImage { width, height, depth, max_value, samples })
    }

    pub fn dims(&self) -> GridDims {
        GridDims { width: self.width, height: self.height, depth: self.depth }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Header<'a> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u64> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Format(format!("missing {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::Format(format!("{what} too large")))
    }
}

struct Pnm {
    width: usize,
    height: usize,
    max_value: u16,
    channels: usize,
    samples: Vec<u16>,
}

fn parse_pnm(bytes: &[u8]) -> Result<Pnm> {
    if bytes.len() < 2 || bytes[0] != b'P' {
        return Err(Error::Format("not a netpbm file".into()));
    }
    let (binary, channels) = match bytes[1] {
        b'2' => (false, 1),
        b'5' => (true, 1),
        b'3' => (false, 3),
        b'6' => (true, 3),
        m => return Err(Error::Format(format!("unsupported netpbm magic P{}", m as char))),
    };
    let mut h = Header { bytes, pos: 2 };
    let width = h.number("width")? as usize;
    let height = h.number("height")? as usize;
    if width == 0 || height == 0 {
        return Err(Error::Format(format!("empty dimensions {width}x{height}")));
    }
    let max = h.number("max value")?;
    if max == 0 || max > 65535 {
        return Err(Error::Format(format!("max value {max} outside 1..=65535")));
    }
    let count = width
        .checked_mul(height)
        .and_then(|p| p.checked_mul(channels))
        .ok_or_else(|| Error::Format("dimensions overflow".into()))?;
    let mut samples = Vec::with_capacity(count);
    if binary {
        // exactly one whitespace byte separates the header from the raster
        if h.pos >= bytes.len() || !bytes[h.pos].is_ascii_whitespace() {
            return Err(Error::Format("missing raster separator".into()));
        }
        let raster = &bytes[h.pos + 1..];
        let wide = max > 255;
        let need = count * if wide { 2 } else { 1 };
        if raster.len() < need {
            return Err(Error::Format(format!("truncated raster: {} of {need} bytes", raster.len())));
        }
        if wide {
            samples.extend(raster[..need].chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]])));
        } else {
            samples.extend(raster[..need].iter().map(|&b| b as u16));
        }
    } else {
        for _ in 0..count {
            let v = h.number("sample").map_err(|e| match e {
                Error::Format(m) if m == "missing sample" => Error::Format("truncated raster".into()),
                other => other,
            })?;
            if v > max {
                return Err(Error::Format(format!("sample {v} exceeds max value {max}")));
            }
            samples.push(v as u16);
        }
    }
    if let Some(s) = samples.iter().find(|&&s| s as u64 > max) {
        return Err(Error::Format(format!("sample {s} exceeds max value {max}")));
    }
    Ok(Pnm { width, height, max_value: max as u16, channels, samples })
}

/// Reads a P2 or P5 graymap.
pub fn read_pgm(bytes: &[u8]) -> Result<RasterImage> {
    let pnm = parse_pnm(bytes)?;
    if pnm.channels != 1 {
        return Err(Error::Format("expected a graymap (P2/P5)".into()));
    }
    RasterImage::new(pnm.width, pnm.height, 1, pnm.max_value, pnm.samples)
}

/// Reads a P3 or P6 pixmap and reduces it to integer luminance
/// `(2126 R + 7152 G + 722 B) / 10000`.
pub fn read_ppm(bytes: &[u8]) -> Result<RasterImage> {
    let pnm = parse_pnm(bytes)?;
    if pnm.channels != 3 {
        return Err(Error::Format("expected a pixmap (P3/P6)".into()));
    }
    let samples = pnm
        .samples
        .chunks_exact(3)
        .map(|c| ((2126 * c[0] as u64 + 7152 * c[1] as u64 + 722 * c[2] as u64) / 10000) as u16)
        .collect();
    RasterImage::new(pnm.width, pnm.height, 1, pnm.max_value, samples)
}

/// Graymap or pixmap, chosen by the magic number.
pub fn read_pnm(bytes: &[u8]) -> Result<RasterImage> {
    match bytes.get(..2) {
        Some(b"P3") | Some(b"P6") => read_ppm(bytes),
        _ => read_pgm(bytes),
    }
}

fn check_planar(image: &RasterImage) -> Result<()> {
    if image.depth != 1 {
        return Err(Error::Format(format!("cannot write a volume of depth {} as a graymap", image.depth)));
    }
    Ok(())
}

/// Binary P5; samples above 255 are written as big-endian pairs.
pub fn write_pgm(image: &RasterImage) -> Result<Vec<u8>> {
    check_planar(image)?;
    let mut out = format!("P5\n{} {}\n{}\n", image.width, image.height, image.max_value).into_bytes();
    if image.max_value > 255 {
        out.extend(image.samples.iter().flat_map(|s| s.to_be_bytes()));
    } else {
        out.extend(image.samples.iter().map(|&s| s as u8));
    }
    Ok(out)
}

/// Plain P2, one image row per line.
pub fn write_pgm_ascii(image: &RasterImage) -> Result<Vec<u8>> {
    check_planar(image)?;
    let mut out = format!("P2\n{} {}\n{}\n", image.width, image.height, image.max_value);
    for row in image.samples.chunks(image.width) {
        let line: Vec<String> = row.iter().map(|s| s.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    Ok(out.into_bytes())
}

/// Headerless 8-bit volume, `width * height * depth` bytes.
pub fn read_raw_volume(bytes: &[u8], width: usize, height: usize, depth: usize) -> Result<RasterImage> {
    let expected = width * height * depth;
    if bytes.len() != expected {
        return Err(Error::Format(format!(
            "raw volume {width}x{height}x{depth} needs {expected} bytes, got {}",
            bytes.len()
        )));
    }
    RasterImage::new(width, height, depth, 255, bytes.iter().map(|&b| b as u16).collect())
}

pub fn write_raw_volume(image: &RasterImage) -> Result<Vec<u8>> {
    if image.max_value > 255 {
        return Err(Error::Format("raw volumes hold 8-bit samples only".into()));
    }
    Ok(image.samples.iter().map(|&s| s as u8).collect())
}

/// `f_i = floor(sample_i * L / max_value)`.
pub fn quantize(image: &RasterImage, max_feature: i64) -> Result<Vec<i64>> {
    if max_feature < 1 {
        return Err(Error::InvalidArgument(format!("feature range L = {max_feature} must be >= 1")));
    }
    let max = image.max_value as i64;
    Ok(image.samples.iter().map(|&s| s as i64 * max_feature / max).collect())
}

/// Label image with labels as sample values.
pub fn labeling_to_image(labeling: &Labeling, dims: GridDims, max_value: u16) -> Result<RasterImage> {
    let samples = labeling
        .values()
        .iter()
        .map(|&v| u16::try_from(v).map_err(|_| Error::Format(format!("label {v} not representable"))))
        .collect::<Result<Vec<_>>>()?;
    RasterImage::new(dims.width, dims.height, dims.depth, max_value, samples)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridDims {
    pub width: usize,
    pub height: usize,
    pub depth: usize,
}

impl GridDims {
    pub fn planar(width: usize, height: usize) -> Self {
        GridDims { width, height, depth: 1 }
    }

    pub fn volume(width: usize, height: usize, depth: usize) -> Self {
        GridDims { width, height, depth }
    }

    pub fn len(&self) -> usize {
        self.width * self.height * self.depth
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        (z * self.height + y) * self.width + x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
    Six,
    TwentySix,
}

impl Connectivity {
    fn is_planar(self) -> bool {
        matches!(self, Connectivity::Four | Connectivity::Eight)
    }

    /// One offset per undirected neighbor pair.
    fn half_offsets(self) -> Vec<(isize, isize, isize)> {
        let mut out = Vec::new();
        let zs: &[isize] = if self.is_planar() { &[0] } else { &[-1, 0, 1] };
        for &dz in zs {
            for dy in -1isize..=1 {
                for dx in -1isize..=1 {
                    if (dz, dy, dx) <= (0, 0, 0) {
                        continue;
                    }
                    let nonzero = [dx, dy, dz].iter().filter(|&&d| d != 0).count();
                    let keep = match self {
                        Connectivity::Four | Connectivity::Six => nonzero == 1,
                        Connectivity::Eight | Connectivity::TwentySix => true,
                    };
                    if keep {
                        out.push((dx, dy, dz));
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for Connectivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = match self {
            Connectivity::Four => 4,
            Connectivity::Eight => 8,
            Connectivity::Six => 6,
            Connectivity::TwentySix => 26,
        };
        write!(f, "{n}")
    }
}

impl FromStr for Connectivity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "4" => Ok(Connectivity::Four),
            "8" => Ok(Connectivity::Eight),
            "6" => Ok(Connectivity::Six),
            "26" => Ok(Connectivity::TwentySix),
            other => Err(Error::InvalidArgument(format!("connectivity must be 4, 8, 6 or 26, got `{other}`"))),
        }
    }
}

/// Both directed arcs, each of weight `beta`, for every neighbor pair.
pub fn grid_edges(dims: GridDims, connectivity: Connectivity, beta: Rational) -> Result<EdgeSet> {
    if beta < Rational::from(0) {
        return Err(Error::NegativeWeight { what: "coupling", index: 0 });
    }
    if connectivity.is_planar() && dims.depth != 1 {
        return Err(Error::InvalidArgument(format!("{connectivity}-connectivity needs a planar grid")));
    }
    let offsets = connectivity.half_offsets();
    let mut edges = EdgeSet::new();
    for z in 0..dims.depth {
        for y in 0..dims.height {
            for x in 0..dims.width {
                let here = dims.index(x, y, z);
                for &(dx, dy, dz) in &offsets {
                    let (nx, ny, nz) = (x as isize + dx, y as isize + dy, z as isize + dz);
                    if nx < 0 || ny < 0 || nz < 0 {
                        continue;
                    }
                    let (nx, ny, nz) = (nx as usize, ny as usize, nz as usize);
                    if nx >= dims.width || ny >= dims.height || nz >= dims.depth {
                        continue;
                    }
                    let there = dims.index(nx, ny, nz);
                    edges.add(here, there, beta);
                    edges.add(there, here, beta);
                }
            }
        }
    }
    Ok(edges)
}

/// Default pixel cap for [`complete_edges`].
pub const COMPLETE_GRAPH_CAP: usize = 64;

/// Every ordered pair of distinct pixels, each arc of weight `beta`.
pub fn complete_edges(n: usize, beta: Rational, cap: usize) -> Result<EdgeSet> {
    if n > cap {
        return Err(Error::InvalidArgument(format!("complete graph on {n} pixels exceeds the cap {cap}")));
    }
    Ok(EdgeSet::from_arcs(
        (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j, beta))),
    ))
}

/// Adds independent `N(0, sigma^2)` noise to every sample, rounds and
/// clamps to `[0, max_value]`. The generator is ChaCha8 seeded with `seed`,
/// so output is reproducible across runs and platforms.
pub fn add_gaussian_noise(image: &RasterImage, sigma: f64, seed: u64) -> Result<RasterImage> {
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::InvalidArgument(format!("sigma must be finite and >= 0, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(image.clone());
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max = image.max_value as f64;
    let samples = image
        .samples
        .iter()
        .map(|&s| (s as f64 + normal.sample(&mut rng)).round().clamp(0.0, max) as u16)
        .collect();
    Ok(RasterImage { samples, ..image.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p5_roundtrip() {
        let img = RasterImage::new(2, 2, 1, 255, vec![0, 128, 255, 7]).unwrap();
        let bytes = write_pgm(&img).unwrap();
        assert_eq!(read_pgm(&bytes).unwrap(), img);
    }

    #[test]
    fn sixteen_bit_roundtrip() {
        let img = RasterImage::new(3, 1, 1, 65535, vec![0, 256, 65535]).unwrap();
        let bytes = write_pgm(&img).unwrap();
        assert_eq!(&bytes[bytes.len() - 6..], &[0, 0, 1, 0, 255, 255]);
        assert_eq!(read_pgm(&bytes).unwrap(), img);
    }

    #[test]
    fn header_errors() {
        assert!(matches!(read_pgm(b"P5 0 0 255\n"), Err(Error::Format(m)) if m.contains("empty")));
        assert!(read_pgm(b"P5 2 2 255\n\x01\x02").is_err());
        assert!(read_pgm(b"P2 1 1 3\n4\n").is_err());
        assert!(read_pgm(b"P2 2 1 3\n1\n").is_err());
        assert!(read_pgm(b"P4 1 1\n").is_err());
        assert!(read_pgm(b"P5 1 1 70000\n\0\0").is_err());
        assert!(read_pgm(b"hello").is_err());
    }

    #[test]
    fn ascii_with_comments() {
        let text = b"P2\n# made by hand\n3 1 # width height\n# max next\n15\n0 7\n# mid-raster\n15\n";
        let img = read_pgm(text).unwrap();
        assert_eq!((img.width, img.height, img.max_value), (3, 1, 15));
        assert_eq!(img.samples, vec![0, 7, 15]);
        assert_eq!(read_pgm(&write_pgm_ascii(&img).unwrap()).unwrap(), img);
    }

    #[test]
    fn ppm_luminance() {
        let mut bytes = b"P6 2 1 255\n".to_vec();
        bytes.extend([255, 255, 255, 255, 0, 0]);
        let img = read_pnm(&bytes).unwrap();
        assert_eq!(img.samples, vec![255, 54]);
        let plain = read_pnm(b"P3 1 1 255\n0 255 0\n").unwrap();
        assert_eq!(plain.samples, vec![182]);
    }

    #[test]
    fn raw_volume() {
        let v = read_raw_volume(&[0; 8], 2, 2, 2).unwrap();
        assert_eq!((v.len(), v.depth), (8, 2));
        assert!(v.samples.iter().all(|&s| s == 0));
        assert!(read_raw_volume(&[0; 7], 2, 2, 2).is_err());
        let bytes: Vec<u8> = (0..24).map(|i| i * 10).collect();
        let vol = read_raw_volume(&bytes, 2, 3, 4).unwrap();
        assert_eq!(write_raw_volume(&vol).unwrap(), bytes);
        assert!(write_pgm(&vol).is_err());
    }

    #[test]
    fn quantize_examples() {
        let img = RasterImage::new(4, 1, 1, 255, vec![0, 128, 254, 255]).unwrap();
        assert_eq!(quantize(&img, 3).unwrap(), vec![0, 1, 2, 3]);
        assert!(quantize(&img, 0).is_err());
        let ramp = RasterImage::new(256, 1, 1, 255, (0..=255).collect()).unwrap();
        let q = quantize(&ramp, 7).unwrap();
        assert!(q.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!((0..=7).filter(|v| q.contains(v)).count(), 8);
    }

    #[test]
    fn grid_counts() {
        let one = Rational::from(1);
        assert_eq!(grid_edges(GridDims::planar(2, 2), Connectivity::Four, one).unwrap().len(), 8);
        assert!(grid_edges(GridDims::planar(1, 1), Connectivity::Eight, one).unwrap().is_empty());
        assert_eq!(
            grid_edges(GridDims::volume(2, 2, 1), Connectivity::Six, one).unwrap(),
            grid_edges(GridDims::planar(2, 2), Connectivity::Four, one).unwrap()
        );
        // w(h-1) + h(w-1) + 2(w-1)(h-1) undirected pairs for 8-connectivity
        assert_eq!(grid_edges(GridDims::planar(4, 3), Connectivity::Eight, one).unwrap().len(), 2 * (8 + 9 + 12));
        // 3x3x3 with 26-connectivity: (3^3 * 27 - 3^3... ) counted by brute force
        let e = grid_edges(GridDims::volume(3, 3, 3), Connectivity::TwentySix, one).unwrap();
        let mut pairs = 0;
        for a in 0..27usize {
            for b in 0..27usize {
                let (ax, ay, az) = ((a % 3) as i32, (a / 3 % 3) as i32, (a / 9) as i32);
                let (bx, by, bz) = ((b % 3) as i32, (b / 3 % 3) as i32, (b / 9) as i32);
                if a != b && (ax - bx).abs() <= 1 && (ay - by).abs() <= 1 && (az - bz).abs() <= 1 {
                    pairs += 1;
                }
            }
        }
        assert_eq!(e.len(), pairs);
        for (i, j, b) in e.iter() {
            assert_eq!(e.get(j, i), b);
        }
        assert!(grid_edges(GridDims::volume(2, 2, 2), Connectivity::Four, one).is_err());
    }

    #[test]
    fn complete_graph_cap() {
        assert_eq!(complete_edges(4, Rational::from(1), COMPLETE_GRAPH_CAP).unwrap().len(), 12);
        assert!(complete_edges(65, Rational::from(1), COMPLETE_GRAPH_CAP).is_err());
    }

    #[test]
    fn noise_properties() {
        let img = RasterImage::new(100, 100, 1, 255, vec![128; 10_000]).unwrap();
        assert_eq!(add_gaussian_noise(&img, 0.0, 1).unwrap(), img);
        let a = add_gaussian_noise(&img, 30.0, 42).unwrap();
        assert_eq!(a, add_gaussian_noise(&img, 30.0, 42).unwrap());
        assert_ne!(a, add_gaussian_noise(&img, 30.0, 43).unwrap());
        let n = a.samples.len() as f64;
        let mean = a.samples.iter().map(|&s| s as f64).sum::<f64>() / n;
        let var = a.samples.iter().map(|&s| (s as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((var.sqrt() - 30.0).abs() < 3.0, "std {}", var.sqrt());
        assert!(add_gaussian_noise(&img, -1.0, 1).is_err());
    }
}
