//! Classic libpcap capture files (not pcapng).
//!
//! Layout: a 24-byte global header followed by records, each a 16-byte
//! header (`ts_sec`, `ts_frac`, `incl_len`, `orig_len`) and `incl_len` bytes
//! of captured data. The magic number fixes byte order and whether `ts_frac`
//! counts microseconds or nanoseconds.

use std::net::IpAddr;

use satqoe_core::trace::{Direction, PacketRecord, SessionTrace};

use crate::error::{Error, Result};

pub const GLOBAL_HEADER_LEN: usize = 24;
pub const RECORD_HEADER_LEN: usize = 16;

pub const LINKTYPE_ETHERNET: u32 = 1;
pub const LINKTYPE_RAW: u32 = 101;
pub const LINKTYPE_LINUX_SLL: u32 = 113;
pub const LINKTYPE_IPV4: u32 = 228;
pub const LINKTYPE_IPV6: u32 = 229;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimestampUnit {
    Micros,
    Nanos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PcapHeader {
    pub little_endian: bool,
    pub unit: TimestampUnit,
    pub version: (u16, u16),
    pub snaplen: u32,
    pub linktype: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RawRecord<'a> {
    /// Byte offset of the record header in the file.
    pub offset: u64,
    pub ts_sec: u32,
    pub ts_frac: u32,
    pub incl_len: u32,
    pub orig_len: u32,
    pub data: &'a [u8],
}

impl RawRecord<'_> {
    pub fn timestamp_nanos(&self, unit: TimestampUnit) -> i128 {
        let frac = match unit {
            TimestampUnit::Micros => i128::from(self.ts_frac) * 1_000,
            TimestampUnit::Nanos => i128::from(self.ts_frac),
        };
        i128::from(self.ts_sec) * 1_000_000_000 + frac
    }
}

fn u16_at(b: &[u8], le: bool) -> u16 {
    let a = [b[0], b[1]];
    if le { u16::from_le_bytes(a) } else { u16::from_be_bytes(a) }
}

fn u32_at(b: &[u8], le: bool) -> u32 {
    let a = [b[0], b[1], b[2], b[3]];
    if le { u32::from_le_bytes(a) } else { u32::from_be_bytes(a) }
}

pub fn read_header(bytes: &[u8]) -> Result<PcapHeader> {
    if bytes.len() < 4 {
        return Err(Error::Pcap { offset: bytes.len() as u64, message: "file shorter than the magic number".into() });
    }
    let (little_endian, unit) = match [bytes[0], bytes[1], bytes[2], bytes[3]] {
        [0xd4, 0xc3, 0xb2, 0xa1] => (true, TimestampUnit::Micros),
        [0xa1, 0xb2, 0xc3, 0xd4] => (false, TimestampUnit::Micros),
        [0x4d, 0x3c, 0xb2, 0xa1] => (true, TimestampUnit::Nanos),
        [0xa1, 0xb2, 0x3c, 0x4d] => (false, TimestampUnit::Nanos),
        m => {
            return Err(Error::Pcap {
                offset: 0,
                message: format!("unrecognized magic 0x{:08x}", u32::from_be_bytes(m)),
            })
        }
    };
    if bytes.len() < GLOBAL_HEADER_LEN {
        return Err(Error::Pcap {
            offset: bytes.len() as u64,
            message: format!("global header needs {GLOBAL_HEADER_LEN} bytes, file has {}", bytes.len()),
        });
    }
    let le = little_endian;
    Ok(PcapHeader {
        little_endian,
        unit,
        version: (u16_at(&bytes[4..], le), u16_at(&bytes[6..], le)),
        snaplen: u32_at(&bytes[16..], le),
        linktype: u32_at(&bytes[20..], le),
    })
}

/// Outcome of walking the records.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Records<'a> {
    pub header: PcapHeader,
    pub records: Vec<RawRecord<'a>>,
    /// Offset of an incomplete trailing record, if any.
    pub truncated_at: Option<u64>,
}

pub fn read_records(bytes: &[u8]) -> Result<Records<'_>> {
    let header = read_header(bytes)?;
    let le = header.little_endian;
    let mut at = GLOBAL_HEADER_LEN;
    let mut records = Vec::new();
    let mut truncated_at = None;
    while at < bytes.len() {
        if bytes.len() - at < RECORD_HEADER_LEN {
            truncated_at = Some(at as u64);
            break;
        }
        let h = &bytes[at..at + RECORD_HEADER_LEN];
        let incl_len = u32_at(&h[8..], le);
        let start = at + RECORD_HEADER_LEN;
        let Some(end) = start.checked_add(incl_len as usize).filter(|&e| e <= bytes.len()) else {
            truncated_at = Some(at as u64);
            break;
        };
        records.push(RawRecord {
            offset: at as u64,
            ts_sec: u32_at(h, le),
            ts_frac: u32_at(&h[4..], le),
            incl_len,
            orig_len: u32_at(&h[12..], le),
            data: &bytes[start..end],
        });
        at = end;
    }
    Ok(Records { header, records, truncated_at })
}

/// Assigns packet direction from the client's address. Packets whose
/// addresses cannot be read (or that don't involve the client) count as
/// downstream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Classifier {
    #[default]
    AllDownstream,
    ClientIp(IpAddr),
}

impl Classifier {
    pub fn classify(&self, linktype: u32, data: &[u8]) -> Direction {
        let Classifier::ClientIp(client) = self else {
            return Direction::Downstream;
        };
        match ip_endpoints(linktype, data) {
            Some((src, _)) if src == *client => Direction::Upstream,
            _ => Direction::Downstream,
        }
    }
}

/// Source and destination addresses of the IP packet inside a frame.
pub fn ip_endpoints(linktype: u32, data: &[u8]) -> Option<(IpAddr, IpAddr)> {
    let ip = match linktype {
        LINKTYPE_ETHERNET => {
            let mut off = 12;
            let mut ethertype = u16::from_be_bytes([*data.get(off)?, *data.get(off + 1)?]);
            // 802.1Q / 802.1ad tags
            while ethertype == 0x8100 || ethertype == 0x88a8 {
                off += 4;
                ethertype = u16::from_be_bytes([*data.get(off)?, *data.get(off + 1)?]);
            }
            match ethertype {
                0x0800 | 0x86dd => data.get(off + 2..)?,
                _ => return None,
            }
        }
        LINKTYPE_LINUX_SLL => data.get(16..)?,
        LINKTYPE_RAW | LINKTYPE_IPV4 | LINKTYPE_IPV6 => data,
        _ => return None,
    };
    match ip.first()? >> 4 {
        4 if ip.len() >= 20 => {
            let src: [u8; 4] = ip[12..16].try_into().ok()?;
            let dst: [u8; 4] = ip[16..20].try_into().ok()?;
            Some((IpAddr::from(src), IpAddr::from(dst)))
        }
        6 if ip.len() >= 40 => {
            let src: [u8; 16] = ip[8..24].try_into().ok()?;
            let dst: [u8; 16] = ip[24..40].try_into().ok()?;
            Some((IpAddr::from(src), IpAddr::from(dst)))
        }
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcapOptions {
    pub video_id: String,
    pub source_id: String,
    /// Playback duration; defaults to the last packet's timestamp.
    pub duration: Option<f64>,
    /// Keep the complete records of a truncated capture instead of failing.
    pub lenient: bool,
    pub classifier: Classifier,
}

impl PcapOptions {
    pub fn new(video_id: impl Into<String>, source_id: impl Into<String>) -> Self {
        Self {
            video_id: video_id.into(),
            source_id: source_id.into(),
            duration: None,
            lenient: false,
            classifier: Classifier::AllDownstream,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedCapture {
    pub trace: SessionTrace,
    pub header: PcapHeader,
    pub truncated_at: Option<u64>,
}

pub fn parse_pcap(bytes: &[u8], options: &PcapOptions) -> Result<ParsedCapture> {
    let parsed = read_records(bytes)?;
    if let (Some(offset), false) = (parsed.truncated_at, options.lenient) {
        return Err(Error::PcapTruncated { offset, complete_records: parsed.records.len() });
    }
    let unit = parsed.header.unit;
    let origin = parsed.records.iter().map(|r| r.timestamp_nanos(unit)).min().unwrap_or(0);
    let packets: Vec<PacketRecord> = parsed
        .records
        .iter()
        .map(|r| PacketRecord {
            timestamp: (r.timestamp_nanos(unit) - origin) as f64 / 1e9,
            length: u64::from(r.orig_len),
            direction: options.classifier.classify(parsed.header.linktype, r.data),
        })
        .collect();
    let last = packets.iter().map(|p| p.timestamp).fold(0.0, f64::max);
    let duration = options.duration.unwrap_or(last);
    let trace = SessionTrace::new(options.video_id.clone(), options.source_id.clone(), duration, packets)?;
    Ok(ParsedCapture { trace, header: parsed.header, truncated_at: parsed.truncated_at })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header_le(linktype: u32) -> Vec<u8> {
        let mut b = vec![0xd4, 0xc3, 0xb2, 0xa1, 2, 0, 4, 0];
        b.extend_from_slice(&[0; 8]);
        b.extend_from_slice(&65535u32.to_le_bytes());
        b.extend_from_slice(&linktype.to_le_bytes());
        b
    }

    fn record_le(b: &mut Vec<u8>, sec: u32, usec: u32, data: &[u8], orig: u32) {
        for v in [sec, usec, data.len() as u32, orig] {
            b.extend_from_slice(&v.to_le_bytes());
        }
        b.extend_from_slice(data);
    }

    #[test]
    fn empty_capture() {
        let p = parse_pcap(&header_le(1), &PcapOptions::new("v", "s")).unwrap();
        assert!(p.trace.packets().is_empty());
        assert_eq!(p.trace.duration(), 0.0);
    }

    #[test]
    fn wrong_magic_at_offset_zero() {
        let mut b = header_le(1);
        b[..4].copy_from_slice(&0xdeadbeefu32.to_be_bytes());
        match parse_pcap(&b, &PcapOptions::new("v", "s")) {
            Err(Error::Pcap { offset: 0, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rebased_timestamps() {
        let mut b = header_le(1);
        record_le(&mut b, 100, 0, &[0; 4], 1500);
        record_le(&mut b, 100, 500_000, &[0; 4], 1500);
        record_le(&mut b, 101, 0, &[0; 4], 400);
        let p = parse_pcap(&b, &PcapOptions::new("v", "s")).unwrap();
        let ts: Vec<f64> = p.trace.packets().iter().map(|p| p.timestamp).collect();
        let lens: Vec<u64> = p.trace.packets().iter().map(|p| p.length).collect();
        assert_eq!(ts, [0.0, 0.5, 1.0]);
        assert_eq!(lens, [1500, 1500, 400]);
        assert_eq!(p.trace.duration(), 1.0);
    }

    #[test]
    fn truncated_needs_lenient() {
        let mut b = header_le(1);
        record_le(&mut b, 1, 0, &[0; 8], 60);
        record_le(&mut b, 2, 0, &[0; 8], 60);
        b.truncate(b.len() - 3);
        match parse_pcap(&b, &PcapOptions::new("v", "s")) {
            Err(Error::PcapTruncated { complete_records: 1, offset: 48 }) => {}
            other => panic!("{other:?}"),
        }
        let mut opts = PcapOptions::new("v", "s");
        opts.lenient = true;
        let p = parse_pcap(&b, &opts).unwrap();
        assert_eq!(p.trace.packets().len(), 1);
        assert_eq!(p.truncated_at, Some(48));
    }

    #[test]
    fn client_ip_classifier() {
        let client: IpAddr = "10.0.0.2".parse().unwrap();
        let mut frame = vec![0u8; 14];
        frame[12] = 0x08;
        let mut ip = vec![0x45u8; 1];
        ip.extend_from_slice(&[0; 11]);
        ip.extend_from_slice(&[10, 0, 0, 2, 8, 8, 8, 8]);
        frame.extend_from_slice(&ip);
        let c = Classifier::ClientIp(client);
        assert_eq!(c.classify(LINKTYPE_ETHERNET, &frame), Direction::Upstream);
        frame[14 + 12..14 + 20].copy_from_slice(&[8, 8, 8, 8, 10, 0, 0, 2]);
        assert_eq!(c.classify(LINKTYPE_ETHERNET, &frame), Direction::Downstream);
        assert_eq!(Classifier::AllDownstream.classify(LINKTYPE_ETHERNET, &frame), Direction::Downstream);
    }
}
