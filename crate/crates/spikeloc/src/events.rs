//! Event streams from a real or simulated DVS sensor, and the EVTS file format.

use crate::error::{Error, Result};

const EVTS_MAGIC: &[u8; 4] = b"EVTS";
const EVTS_VERSION: u8 = 1;

pub const POLARITY_OFF: u8 = 0;
pub const POLARITY_ON: u8 = 1;

/// A single DVS event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DvsEvent {
    pub timestamp_us: u32,
    pub x: u16,
    pub y: u16,
    pub polarity: u8,
}

/// Timestamped event record stream with sensor geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct EventStream {
    width: u16,
    height: u16,
    events: Vec<DvsEvent>,
}

impl EventStream {
    pub fn new(width: u16, height: u16, events: Vec<DvsEvent>) -> Result<Self> {
        let mut last = 0u32;
        for (i, e) in events.iter().enumerate() {
            if e.timestamp_us < last {
                return Err(Error::Data(format!(
                    "event {i}: timestamps must be non-decreasing"
                )));
            }
            if e.x >= width || e.y >= height {
                return Err(Error::Data(format!(
                    "event {i}: coordinate ({}, {}) outside {}x{}",
                    e.x, e.y, width, height
                )));
            }
            if e.polarity > 1 {
                return Err(Error::Data(format!("event {i}: polarity must be 0 or 1")));
            }
            last = e.timestamp_us;
        }
        Ok(EventStream {
            width,
            height,
            events,
        })
    }

    pub fn width(&self) -> u16 {
        self.width
    }

    pub fn height(&self) -> u16 {
        self.height
    }

    pub fn events(&self) -> &[DvsEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + 1 + 2 + 2 + 4 + self.events.len() * 9);
        out.extend_from_slice(EVTS_MAGIC);
        out.push(EVTS_VERSION);
        out.extend_from_slice(&self.width.to_le_bytes());
        out.extend_from_slice(&self.height.to_le_bytes());
        out.extend_from_slice(&(self.events.len() as u32).to_le_bytes());
        for e in &self.events {
            out.extend_from_slice(&e.timestamp_us.to_le_bytes());
            out.extend_from_slice(&e.x.to_le_bytes());
            out.extend_from_slice(&e.y.to_le_bytes());
            out.push(e.polarity);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 13 {
            return Err(Error::Data("EVTS: truncated header".into()));
        }
        if &bytes[0..4] != EVTS_MAGIC {
            return Err(Error::Data("EVTS: bad magic".into()));
        }
        if bytes[4] != EVTS_VERSION {
            return Err(Error::Data(format!(
                "EVTS: unsupported version {}",
                bytes[4]
            )));
        }
        let width = u16::from_le_bytes(bytes[5..7].try_into().unwrap());
        let height = u16::from_le_bytes(bytes[7..9].try_into().unwrap());
        let count = u32::from_le_bytes(bytes[9..13].try_into().unwrap()) as usize;
        let payload = &bytes[13..];
        if payload.len() != count * 9 {
            return Err(Error::Data(format!(
                "EVTS: payload length {} != {} events x 9 bytes",
                payload.len(),
                count
            )));
        }
        let mut events = Vec::with_capacity(count);
        for i in 0..count {
            let rec = &payload[i * 9..i * 9 + 9];
            events.push(DvsEvent {
                timestamp_us: u32::from_le_bytes(rec[0..4].try_into().unwrap()),
                x: u16::from_le_bytes(rec[4..6].try_into().unwrap()),
                y: u16::from_le_bytes(rec[6..8].try_into().unwrap()),
                polarity: rec[8],
            });
        }
        EventStream::new(width, height, events)
    }

    pub fn write_file(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn read_file(path: &std::path::Path) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        EventStream::from_bytes(&bytes)
    }
}
