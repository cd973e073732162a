//! Binary PGM (P5) images, 8- or 16-bit.

use std::io::{self, BufRead, Write};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PgmError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("malformed PGM: {0}")]
    Malformed(String),
}

/// Raw PGM contents; samples are row-major, row 0 at the top.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub samples: Vec<u16>,
}

impl Pgm {
    pub fn write<W: Write>(&self, mut w: W) -> Result<(), PgmError> {
        if self.samples.len() != self.width * self.height {
            return Err(PgmError::Malformed(
                "sample count does not match dimensions".into(),
            ));
        }
        write!(w, "P5\n{} {}\n{}\n", self.width, self.height, self.maxval)?;
        if self.maxval < 256 {
            let bytes: Vec<u8> = self.samples.iter().map(|&s| s.min(255) as u8).collect();
            w.write_all(&bytes)?;
        } else {
            let mut bytes = Vec::with_capacity(self.samples.len() * 2);
            for s in &self.samples {
                bytes.extend_from_slice(&s.to_be_bytes());
            }
            w.write_all(&bytes)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read<R: BufRead>(mut r: R) -> Result<Self, PgmError> {
        let mut header = Vec::new();
        // Magic, width, height, maxval: four whitespace-separated tokens,
        // '#' comments allowed between them.
        while header.len() < 4 {
            let mut token = Vec::new();
            loop {
                let mut byte = [0u8; 1];
                if r.read(&mut byte)? == 0 {
                    return Err(PgmError::Malformed("truncated header".into()));
                }
                let c = byte[0];
                if c == b'#' && token.is_empty() {
                    let mut comment = Vec::new();
                    r.read_until(b'\n', &mut comment)?;
                    continue;
                }
                if c.is_ascii_whitespace() {
                    if token.is_empty() {
                        continue;
                    }
                    break;
                }
                token.push(c);
            }
            header.push(String::from_utf8_lossy(&token).into_owned());
        }
        if header[0] != "P5" {
            return Err(PgmError::Malformed(format!(
                "unsupported magic {}",
                header[0]
            )));
        }
        let parse = |s: &str, what: &str| {
            s.parse::<usize>()
                .map_err(|_| PgmError::Malformed(format!("bad {what}: {s}")))
        };
        let width = parse(&header[1], "width")?;
        let height = parse(&header[2], "height")?;
        let maxval = parse(&header[3], "maxval")?;
        if maxval == 0 || maxval > 65535 {
            return Err(PgmError::Malformed(format!("maxval {maxval} out of range")));
        }
        let n = width * height;
        let samples = if maxval < 256 {
            let mut bytes = vec![0u8; n];
            r.read_exact(&mut bytes)?;
            bytes.into_iter().map(u16::from).collect()
        } else {
            let mut bytes = vec![0u8; 2 * n];
            r.read_exact(&mut bytes)?;
            bytes
                .chunks_exact(2)
                .map(|b| u16::from_be_bytes([b[0], b[1]]))
                .collect()
        };
        Ok(Self {
            width,
            height,
            maxval: maxval as u16,
            samples,
        })
    }
}
