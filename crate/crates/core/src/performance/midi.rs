//! Standard MIDI File reader (formats 0 and 1), note-on events only.

use super::PerformanceNote;
use crate::error::MidiError;

const DEFAULT_TEMPO_US: u32 = 500_000;

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    end: usize,
}

impl<'a> Cursor<'a> {
    fn new(bytes: &'a [u8], pos: usize, end: usize) -> Self {
        Cursor { bytes, pos, end }
    }

    fn remaining(&self) -> usize {
        self.end - self.pos
    }

    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8], MidiError> {
        if self.remaining() < n {
            return Err(MidiError::at(
                self.pos,
                format!(
                    "truncated {what}: need {n} bytes, {} left",
                    self.remaining()
                ),
            ));
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u8(&mut self, what: &str) -> Result<u8, MidiError> {
        Ok(self.take(1, what)?[0])
    }

    fn u16(&mut self, what: &str) -> Result<u16, MidiError> {
        let b = self.take(2, what)?;
        Ok(u16::from_be_bytes([b[0], b[1]]))
    }

    fn u32(&mut self, what: &str) -> Result<u32, MidiError> {
        let b = self.take(4, what)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn peek(&self) -> Option<u8> {
        (self.pos < self.end).then(|| self.bytes[self.pos])
    }

    /// Variable-length quantity, at most four bytes.
    fn vlq(&mut self, what: &str) -> Result<u32, MidiError> {
        let start = self.pos;
        let mut value = 0u32;
        for _ in 0..4 {
            let b = self.u8(what)?;
            value = (value << 7) | u32::from(b & 0x7f);
            if b & 0x80 == 0 {
                return Ok(value);
            }
        }
        Err(MidiError::at(
            start,
            format!("{what} longer than four bytes"),
        ))
    }
}

#[derive(Debug, Clone, Copy)]
enum Timing {
    TicksPerQuarter(u16),
    /// Frames per second times ticks per frame.
    TicksPerSecond(f64),
}

struct RawNote {
    tick: u64,
    track: usize,
    order: usize,
    pitch: u8,
}

/// Reads every note-on with non-zero velocity, merged over tracks and
/// channels, with onset times in seconds from the file's tempo map.
///
/// Notes come back ordered by tick, then track, then position in the track.
pub fn load_midi(bytes: &[u8]) -> Result<Vec<PerformanceNote>, MidiError> {
    let mut header = Cursor::new(bytes, 0, bytes.len());
    if header.take(4, "header id")? != b"MThd" {
        return Err(MidiError::at(0, "missing MThd header"));
    }
    let header_len = header.u32("header length")? as usize;
    if header_len < 6 {
        return Err(MidiError::at(4, format!("header length {header_len} < 6")));
    }
    let body_start = header.pos;
    let format = header.u16("format")?;
    let _declared_tracks = header.u16("track count")?;
    let division = header.u16("division")?;
    if format > 1 {
        return Err(MidiError::UnsupportedFormat(format));
    }
    let timing = if division & 0x8000 == 0 {
        if division == 0 {
            return Err(MidiError::at(12, "division of zero ticks per quarter"));
        }
        Timing::TicksPerQuarter(division)
    } else {
        let fps = match (division >> 8) as u8 as i8 {
            -24 => 24.0,
            -25 => 25.0,
            -29 => 29.97,
            -30 => 30.0,
            other => return Err(MidiError::at(12, format!("unknown SMPTE rate {other}"))),
        };
        let per_frame = f64::from(division & 0xff);
        if per_frame == 0.0 {
            return Err(MidiError::at(13, "zero ticks per SMPTE frame"));
        }
        Timing::TicksPerSecond(fps * per_frame)
    };
    header.take(header_len - 6, "header")?;
    debug_assert_eq!(header.pos, body_start + header_len);

    let mut notes = Vec::new();
    let mut tempos: Vec<(u64, u32)> = Vec::new();
    let mut track = 0;
    let mut chunks = Cursor::new(bytes, header.pos, bytes.len());
    while chunks.remaining() > 0 {
        let id_at = chunks.pos;
        let id = chunks.take(4, "chunk id")?;
        let len = chunks.u32("chunk length")? as usize;
        if chunks.remaining() < len {
            return Err(MidiError::at(
                id_at,
                format!(
                    "chunk length {len} exceeds the {} bytes left",
                    chunks.remaining()
                ),
            ));
        }
        if id == b"MTrk" {
            let mut events = Cursor::new(bytes, chunks.pos, chunks.pos + len);
            read_track(&mut events, track, &mut notes, &mut tempos)?;
            track += 1;
        }
        chunks.pos += len;
    }

    notes.sort_by_key(|n| (n.tick, n.track, n.order));
    tempos.sort_by_key(|&(tick, _)| tick);
    let clock = TempoMap::new(timing, &tempos);
    Ok(notes
        .into_iter()
        .map(|n| PerformanceNote {
            onset_time: clock.seconds(n.tick),
            pitch: n.pitch,
        })
        .collect())
}

fn read_track(
    events: &mut Cursor<'_>,
    track: usize,
    notes: &mut Vec<RawNote>,
    tempos: &mut Vec<(u64, u32)>,
) -> Result<(), MidiError> {
    let mut tick = 0u64;
    let mut running: Option<u8> = None;
    let mut order = 0;
    while events.remaining() > 0 {
        tick += u64::from(events.vlq("delta time")?);
        let status_at = events.pos;
        let status = match events.peek() {
            Some(b) if b & 0x80 != 0 => {
                events.pos += 1;
                b
            }
            Some(_) => running
                .ok_or_else(|| MidiError::at(status_at, "data byte without running status"))?,
            None => return Err(MidiError::at(status_at, "delta time without event")),
        };
        match status {
            0x80..=0xef => {
                running = Some(status);
                let data_len = if matches!(status & 0xf0, 0xc0 | 0xd0) {
                    1
                } else {
                    2
                };
                let data = events.take(data_len, "channel message")?;
                if data.iter().any(|b| b & 0x80 != 0) {
                    return Err(MidiError::at(
                        status_at,
                        "status byte inside channel message data",
                    ));
                }
                if status & 0xf0 == 0x90 && data[1] > 0 {
                    notes.push(RawNote {
                        tick,
                        track,
                        order,
                        pitch: data[0],
                    });
                    order += 1;
                }
            }
            0xff => {
                running = None;
                let kind = events.u8("meta type")?;
                let len = events.vlq("meta length")? as usize;
                let data = events.take(len, "meta data")?;
                match kind {
                    0x51 if len == 3 => {
                        let us = u32::from_be_bytes([0, data[0], data[1], data[2]]);
                        tempos.push((tick, us));
                    }
                    0x51 => {
                        return Err(MidiError::at(
                            status_at,
                            "set-tempo meta event must be 3 bytes",
                        ))
                    }
                    0x2f => return Ok(()),
                    _ => {}
                }
            }
            0xf0 | 0xf7 => {
                running = None;
                let len = events.vlq("sysex length")? as usize;
                events.take(len, "sysex data")?;
            }
            other => {
                return Err(MidiError::at(
                    status_at,
                    format!("unexpected status byte {other:#04x} in track"),
                ))
            }
        }
    }
    Ok(())
}

struct TempoMap {
    timing: Timing,
    /// (tick, seconds at tick, microseconds per quarter from tick on)
    points: Vec<(u64, f64, u32)>,
}

impl TempoMap {
    fn new(timing: Timing, tempos: &[(u64, u32)]) -> Self {
        let mut points = vec![(0u64, 0.0f64, DEFAULT_TEMPO_US)];
        if let Timing::TicksPerQuarter(tpq) = timing {
            for &(tick, us) in tempos {
                let &(last_tick, last_secs, last_us) = points.last().expect("non-empty");
                let secs = last_secs + ticks_to_seconds(tick - last_tick, last_us, tpq);
                if tick == last_tick {
                    points.pop();
                }
                points.push((tick, secs, us));
            }
        }
        TempoMap { timing, points }
    }

    fn seconds(&self, tick: u64) -> f64 {
        match self.timing {
            Timing::TicksPerSecond(rate) => tick as f64 / rate,
            Timing::TicksPerQuarter(tpq) => {
                let i = self.points.partition_point(|&(t, _, _)| t <= tick) - 1;
                let (t, secs, us) = self.points[i];
                secs + ticks_to_seconds(tick - t, us, tpq)
            }
        }
    }
}

fn ticks_to_seconds(ticks: u64, us_per_quarter: u32, tpq: u16) -> f64 {
    ticks as f64 * f64::from(us_per_quarter) / (1e6 * f64::from(tpq))
}
