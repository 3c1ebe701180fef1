#!/usr/bin/env python3
"""Write the synthetic pipeline fixture set.

Captures are written record by record with `struct` straight from the
classic pcap layout, independent of the Rust reader. Output is fully
determined by SEED.

    python3 scripts/gen_fixtures.py crates/satqoe/tests/fixtures/pipeline
"""

import json
import math
import random
import struct
import sys
from pathlib import Path

SEED = 20240611
SOURCES = 8
VIDEOS_PER_SOURCE = 3
SUBJECTS = 6
FPS = 60
CLIENT = bytes([10, 0, 0, 2])
SERVER = bytes([93, 184, 216, 34])
SNAPLEN = 34  # ethernet + IPv4 header only

# (magic as written, byte order, nanosecond timestamps)
FORMATS = [
    (0xA1B2C3D4, "<", False),
    (0xA1B2C3D4, ">", False),
    (0xA1B23C4D, "<", True),
    (0xA1B23C4D, ">", True),
]


def frame(src, dst, orig_len):
    eth = bytes(6) + bytes([0x02, 0, 0, 0, 0, 1]) + b"\x08\x00"
    ip_len = orig_len - 14
    ip = struct.pack(">BBHHHBBH4s4s", 0x45, 0, ip_len, 0, 0x4000, 64, 6, 0, src, dst)
    return eth + ip


def write_pcap(path, fmt, packets, epoch):
    magic, order, nanos = fmt
    out = bytearray(struct.pack(order + "IHHiIII", magic, 2, 4, 0, 0, 65535, 1))
    for t, orig_len, upstream in packets:
        ts = epoch + t
        sec = int(math.floor(ts))
        frac = int(round((ts - sec) * (1e9 if nanos else 1e6)))
        limit = 1_000_000_000 if nanos else 1_000_000
        if frac >= limit:
            sec, frac = sec + 1, frac - limit
        src, dst = (CLIENT, SERVER) if upstream else (SERVER, CLIENT)
        data = frame(src, dst, orig_len)[:SNAPLEN]
        out += struct.pack(order + "IIII", sec, frac, len(data), orig_len)
        out += data
    path.write_bytes(bytes(out))


def session(rng, duration, level):
    """Packets, stalls and bitrate samples for one playback."""
    rate = 4000 + 16000 * level  # mean downstream bytes per second
    stalls = []
    t = 4.0 + rng.random() * 4
    while t < duration - 6:
        if rng.random() < (1.0 - level) * 0.55:
            length = round(0.8 + rng.random() * 5.5 * (1.0 - level) + 0.4, 2)
            if t + length < duration - 1:
                stalls.append((round(t, 2), length))
                t += length
        t += 6 + rng.random() * 8
    packets = []
    for sec in range(int(math.ceil(duration))):
        in_stall = any(s <= sec + 0.5 < s + l for s, l in stalls)
        if in_stall and rng.random() < 0.85:
            continue
        budget = rate * (0.6 + 0.8 * rng.random())
        n = max(1, int(budget / 1500))
        for _ in range(n):
            ts = sec + rng.random()
            if ts >= duration:
                continue
            size = 1514 if rng.random() < 0.9 else rng.randint(200, 1500)
            packets.append((ts, size, False))
            if rng.random() < 0.25:
                packets.append((min(ts + 0.0004, duration - 1e-3), 66, True))
    packets.sort(key=lambda p: p[0])
    kbps = [round(200 + 2600 * level * (0.8 + 0.4 * rng.random())) for _ in range(0, int(duration), 4)]
    return packets, stalls, kbps


def quality(level, stalls, duration):
    stall_ratio = sum(l for _, l in stalls) / duration
    return 18 + 68 * level ** 0.8 - 140 * stall_ratio - 3 * len(stalls)


def waveform(rng, q, duration, invert):
    frames = int(round(duration * FPS))
    out = []
    drift = 0.0
    for k in range(frames):
        t = k / FPS
        drift += rng.gauss(0, 0.05)
        drift *= 0.995
        # slow dip after the start, more movement for low quality
        v = q + 6 * math.sin(2 * math.pi * t / (duration * 0.9)) * (1.2 - q / 100) + drift
        if invert:
            v = 100 - v
        out.append(min(100, max(0, int(round(v)))))
    return out


def main(dest):
    rng = random.Random(SEED)
    dest = Path(dest)
    for sub in ("pcap", "playback", "study"):
        (dest / sub).mkdir(parents=True, exist_ok=True)

    videos = []
    for s in range(SOURCES):
        content = rng.random() * 0.2
        for v in range(VIDEOS_PER_SOURCE):
            vid = f"src{s:02d}_v{v}"
            duration = round(30 + rng.random() * 6, 2)
            level = min(1.0, max(0.05, rng.random() * 0.9 + 0.1))
            packets, stalls, kbps = session(rng, duration, level)
            q = min(95, max(5, quality(level, stalls, duration) - 25 * content))
            videos.append(dict(id=vid, source=f"src{s:02d}", duration=duration, q=q,
                               packets=packets, stalls=stalls, kbps=kbps))

    with open(dest / "videos.csv", "w") as f:
        f.write("video_id,source_id,duration_s,client_ip\n")
        for v in videos:
            f.write(f"{v['id']},{v['source']},{v['duration']},10.0.0.2\n")

    for i, v in enumerate(videos):
        write_pcap(dest / "pcap" / f"{v['id']}.pcap", FORMATS[i % len(FORMATS)], v["packets"],
                   1_700_000_000 + 1000 * i + 0.123456)
        heights = [1080 if v["q"] > 70 else 720 if v["q"] > 45 else 480]
        res = [{"t_s": 0.0, "height": heights[0]}]
        if v["stalls"]:
            res.append({"t_s": v["stalls"][0][0], "height": 360})
        log = {
            "duration_s": v["duration"],
            "stalls": [{"start_s": s, "len_s": l} for s, l in v["stalls"]],
            "resolutions": res,
            "bitrates": [{"t_s": 4.0 * k, "kbps": float(b)} for k, b in enumerate(v["kbps"])],
        }
        (dest / "playback" / f"{v['id']}.json").write_text(json.dumps(log, indent=1) + "\n")

    bias = [rng.gauss(0, 6) for _ in range(SUBJECTS)]
    noise = [1.5 + 4 * rng.random() for _ in range(SUBJECTS)]
    with open(dest / "study" / "endpoint.csv", "w") as f:
        f.write("subject,session,video,score\n")
        for i, v in enumerate(videos):
            session_id = "A" if i % 2 == 0 else "B"
            for s in range(SUBJECTS):
                score = min(100, max(0, v["q"] + bias[s] + rng.gauss(0, noise[s])))
                f.write(f"s{s + 1:02d},{session_id},{v['id']},{score:.1f}\n")

    # continuous ratings for the session-A half; the last subject rates upside down
    with open(dest / "study" / "waveforms.csv", "w") as f:
        f.write("subject,session,video\n")
        for i, v in enumerate(videos):
            if i % 2:
                continue
            for s in range(SUBJECTS):
                w = waveform(rng, min(100, max(0, v["q"] + bias[s] * 0.5)), v["duration"], s == SUBJECTS - 1)
                f.write(f"s{s + 1:02d},A,{v['id']}," + ",".join(map(str, w)) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "crates/satqoe/tests/fixtures/pipeline")
