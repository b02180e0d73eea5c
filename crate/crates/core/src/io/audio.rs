use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Encoding {
    Pcm16,
    Pcm24,
    #[default]
    Float32,
}

impl Encoding {
    fn bits(self) -> u16 {
        match self {
            Encoding::Pcm16 => 16,
            Encoding::Pcm24 => 24,
            Encoding::Float32 => 32,
        }
    }

    fn full_scale(self) -> f64 {
        match self {
            Encoding::Pcm16 => 32768.0,
            Encoding::Pcm24 => 8_388_608.0,
            Encoding::Float32 => 1.0,
        }
    }
}

impl std::str::FromStr for Encoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pcm16" => Ok(Encoding::Pcm16),
            "pcm24" => Ok(Encoding::Pcm24),
            "float32" => Ok(Encoding::Float32),
            _ => Err(Error::arg(format!("unknown encoding '{s}' (pcm16, pcm24, float32)"))),
        }
    }
}

/// Deinterleaved audio.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    pub channels: Vec<Vec<f64>>,
    pub sample_rate: u32,
    pub encoding: Encoding,
}

impl AudioBuffer {
    pub fn mono(samples: Vec<f64>, sample_rate: u32) -> Self {
        AudioBuffer {
            channels: vec![samples],
            sample_rate,
            encoding: Encoding::default(),
        }
    }

    pub fn frames(&self) -> usize {
        self.channels.first().map_or(0, Vec::len)
    }

    /// Average of all channels.
    pub fn to_mono(&self) -> Vec<f64> {
        let n = self.channels.len().max(1) as f64;
        (0..self.frames())
            .map(|i| self.channels.iter().map(|c| c[i]).sum::<f64>() / n)
            .collect()
    }
}

/// What happened while writing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct WriteReport {
    /// Samples clamped to the PCM range.
    pub clipped: usize,
}

fn audio_err(path: &Path) -> impl FnOnce(hound::Error) -> Error + '_ {
    move |source| Error::Audio {
        path: path.to_path_buf(),
        source,
    }
}

pub fn load_audio(path: impl AsRef<Path>) -> Result<AudioBuffer> {
    let path = path.as_ref();
    let mut reader = WavReader::open(path).map_err(audio_err(path))?;
    let spec = reader.spec();
    let encoding = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Int, 16) => Encoding::Pcm16,
        (SampleFormat::Int, 24) => Encoding::Pcm24,
        (SampleFormat::Float, 32) => Encoding::Float32,
        (fmt, bits) => {
            return Err(Error::arg(format!(
                "{}: unsupported encoding {fmt:?} with {bits} bits",
                path.display()
            )))
        }
    };
    let interleaved: Vec<f64> = match encoding {
        Encoding::Float32 => reader
            .samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<Result<_, _>>()
            .map_err(audio_err(path))?,
        _ => {
            let scale = encoding.full_scale();
            reader
                .samples::<i32>()
                .map(|s| s.map(|v| v as f64 / scale))
                .collect::<Result<_, _>>()
                .map_err(audio_err(path))?
        }
    };
    let nch = spec.channels.max(1) as usize;
    let mut channels = vec![Vec::with_capacity(interleaved.len() / nch); nch];
    for (i, s) in interleaved.into_iter().enumerate() {
        channels[i % nch].push(s);
    }
    Ok(AudioBuffer {
        channels,
        sample_rate: spec.sample_rate,
        encoding,
    })
}

pub fn write_audio(path: impl AsRef<Path>, buffer: &AudioBuffer) -> Result<WriteReport> {
    let path = path.as_ref();
    let frames = buffer.frames();
    if buffer.channels.is_empty() || frames == 0 {
        return Err(Error::arg("refusing to write an empty audio buffer"));
    }
    if buffer.channels.iter().any(|c| c.len() != frames) {
        return Err(Error::arg("channels differ in length"));
    }
    if buffer.channels.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::arg("audio contains non-finite samples"));
    }
    let enc = buffer.encoding;
    let spec = WavSpec {
        channels: buffer.channels.len() as u16,
        sample_rate: buffer.sample_rate,
        bits_per_sample: enc.bits(),
        sample_format: if enc == Encoding::Float32 { SampleFormat::Float } else { SampleFormat::Int },
    };
    let mut writer = WavWriter::create(path, spec).map_err(audio_err(path))?;
    let mut report = WriteReport::default();
    let scale = enc.full_scale();
    for i in 0..frames {
        for ch in &buffer.channels {
            let x = ch[i];
            if enc == Encoding::Float32 {
                writer.write_sample(x as f32).map_err(audio_err(path))?;
            } else {
                let v = (x * scale).round();
                let clamped = v.clamp(-scale, scale - 1.0);
                if clamped != v {
                    report.clipped += 1;
                }
                writer.write_sample(clamped as i32).map_err(audio_err(path))?;
            }
        }
    }
    writer.finalize().map_err(audio_err(path))?;
    Ok(report)
}
