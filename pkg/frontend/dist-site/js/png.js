/** Minimal 8-bit grayscale PNG writer.
 *
 * The mask export must be byte-deterministic (the undo round trip is compared
 * byte for byte), which rules out canvas.toBlob: encoders differ across
 * browsers. Writing the format directly costs little because only one shape
 * is ever needed: bit depth 8, color type 0, no interlace, and deflate
 * "stored" blocks, which every inflater accepts.
 */
const SIGNATURE = [0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a];
// max payload of one stored deflate block
const STORED_BLOCK_MAX = 0xffff;
const CRC_TABLE = buildCrcTable();
function buildCrcTable() {
    const table = new Uint32Array(256);
    for (let n = 0; n < 256; n++) {
        let c = n;
        for (let k = 0; k < 8; k++) {
            c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
        }
        table[n] = c >>> 0;
    }
    return table;
}
export function crc32(data) {
    let c = 0xffffffff;
    for (let i = 0; i < data.length; i++) {
        c = CRC_TABLE[(c ^ data[i]) & 0xff] ^ (c >>> 8);
    }
    return (c ^ 0xffffffff) >>> 0;
}
export function adler32(data) {
    // mod 65521, folded lazily to stay inside float-exact integer range
    let a = 1;
    let b = 0;
    for (let i = 0; i < data.length; i++) {
        a += data[i];
        b += a;
        if (b >= 0x7fffffff - 0xffff) {
            a %= 65521;
            b %= 65521;
        }
    }
    return (((b % 65521) << 16) | a % 65521) >>> 0;
}
function u32be(value) {
    return new Uint8Array([(value >>> 24) & 0xff, (value >>> 16) & 0xff, (value >>> 8) & 0xff, value & 0xff]);
}
function chunk(type, data) {
    const typeBytes = new Uint8Array(4);
    for (let i = 0; i < 4; i++)
        typeBytes[i] = type.charCodeAt(i);
    const body = new Uint8Array(typeBytes.length + data.length);
    body.set(typeBytes, 0);
    body.set(data, 4);
    const out = new Uint8Array(4 + body.length + 4);
    out.set(u32be(data.length), 0);
    out.set(body, 4);
    out.set(u32be(crc32(body)), 4 + body.length);
    return out;
}
/** Wrap raw bytes in a zlib stream of uncompressed deflate blocks. */
function zlibStored(raw) {
    const blocks = Math.max(1, Math.ceil(raw.length / STORED_BLOCK_MAX));
    const out = new Uint8Array(2 + blocks * 5 + raw.length + 4);
    out[0] = 0x78; // CMF: deflate, 32k window
    out[1] = 0x01; // FLG: no dict, check bits make CMF*256+FLG divisible by 31
    let pos = 2;
    for (let i = 0; i < blocks; i++) {
        const start = i * STORED_BLOCK_MAX;
        const len = Math.min(STORED_BLOCK_MAX, raw.length - start);
        out[pos++] = i === blocks - 1 ? 1 : 0; // BFINAL, BTYPE=00
        out[pos++] = len & 0xff;
        out[pos++] = (len >>> 8) & 0xff;
        out[pos++] = ~len & 0xff;
        out[pos++] = (~len >>> 8) & 0xff;
        out.set(raw.subarray(start, start + len), pos);
        pos += len;
    }
    out.set(u32be(adler32(raw)), pos);
    return out;
}
/**
 * Encode one grayscale plane (row-major, length width*height) as a PNG.
 *
 * Deterministic: equal inputs produce identical bytes.
 */
export function encodeGrayPng(width, height, samples) {
    if (!Number.isInteger(width) || !Number.isInteger(height) || width < 1 || height < 1) {
        throw new RangeError(`invalid dimensions ${width}x${height}`);
    }
    if (samples.length !== width * height) {
        throw new RangeError(`expected ${width * height} samples, got ${samples.length}`);
    }
    const ihdr = new Uint8Array(13);
    ihdr.set(u32be(width), 0);
    ihdr.set(u32be(height), 4);
    ihdr[8] = 8; // bit depth
    ihdr[9] = 0; // color type: grayscale
    // compression 0, filter 0, interlace 0 already zeroed
    // each scanline carries a leading filter-type byte (0 = None)
    const raw = new Uint8Array(height * (width + 1));
    for (let y = 0; y < height; y++) {
        raw.set(samples.subarray(y * width, (y + 1) * width), y * (width + 1) + 1);
    }
    const parts = [
        new Uint8Array(SIGNATURE),
        chunk("IHDR", ihdr),
        chunk("IDAT", zlibStored(raw)),
        chunk("IEND", new Uint8Array(0)),
    ];
    const total = parts.reduce((n, p) => n + p.length, 0);
    const png = new Uint8Array(total);
    let pos = 0;
    for (const p of parts) {
        png.set(p, pos);
        pos += p.length;
    }
    return png;
}
