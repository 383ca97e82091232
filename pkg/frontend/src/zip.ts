/**
 * Just enough zip for `.mar` packages: a writer that reproduces the
 * repository's canonical archives bit for bit (stored entries, zeroed
 * timestamps, fixed attributes) and a reader for stored entries.
 */

const LOCAL_SIG = 0x04034b50;
const CENTRAL_SIG = 0x02014b50;
const EOCD_SIG = 0x06054b50;
const VERSION = 20;
const DOS_EPOCH_DATE = 33; // 1980-01-01
const EXTERNAL_ATTR = 0o600 << 16;

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[n] = c >>> 0;
  }
  return table;
})();

export function crc32(data: Uint8Array): number {
  let crc = 0xffffffff;
  for (let i = 0; i < data.length; i++) {
    crc = CRC_TABLE[(crc ^ data[i]) & 0xff] ^ (crc >>> 8);
  }
  return (crc ^ 0xffffffff) >>> 0;
}

class ByteWriter {
  private chunks: Uint8Array[] = [];
  length = 0;

  u16(value: number): void {
    this.bytes(new Uint8Array([value & 0xff, (value >>> 8) & 0xff]));
  }

  u32(value: number): void {
    this.bytes(
      new Uint8Array([value & 0xff, (value >>> 8) & 0xff, (value >>> 16) & 0xff, (value >>> 24) & 0xff])
    );
  }

  bytes(data: Uint8Array): void {
    this.chunks.push(data);
    this.length += data.length;
  }

  result(): Uint8Array {
    const out = new Uint8Array(this.length);
    let offset = 0;
    for (const chunk of this.chunks) {
      out.set(chunk, offset);
      offset += chunk.length;
    }
    return out;
  }
}

export interface ZipEntry {
  name: string;
  data: Uint8Array;
}

export function writeStoredZip(entries: ZipEntry[]): Uint8Array {
  const writer = new ByteWriter();
  const encoder = new TextEncoder();
  const records: { name: Uint8Array; crc: number; size: number; offset: number }[] = [];

  for (const entry of entries) {
    const name = encoder.encode(entry.name);
    records.push({ name, crc: crc32(entry.data), size: entry.data.length, offset: writer.length });
    writer.u32(LOCAL_SIG);
    writer.u16(VERSION);
    writer.u16(0); // flags
    writer.u16(0); // method: stored
    writer.u16(0); // time
    writer.u16(DOS_EPOCH_DATE);
    writer.u32(records[records.length - 1].crc);
    writer.u32(entry.data.length);
    writer.u32(entry.data.length);
    writer.u16(name.length);
    writer.u16(0); // extra
    writer.bytes(name);
    writer.bytes(entry.data);
  }

  const centralStart = writer.length;
  for (const record of records) {
    writer.u32(CENTRAL_SIG);
    writer.u16(VERSION); // made by: version 20, system 0
    writer.u16(VERSION);
    writer.u16(0); // flags
    writer.u16(0); // method
    writer.u16(0); // time
    writer.u16(DOS_EPOCH_DATE);
    writer.u32(record.crc);
    writer.u32(record.size);
    writer.u32(record.size);
    writer.u16(record.name.length);
    writer.u16(0); // extra
    writer.u16(0); // comment
    writer.u16(0); // disk
    writer.u16(0); // internal attrs
    writer.u32(EXTERNAL_ATTR);
    writer.u32(record.offset);
    writer.bytes(record.name);
  }
  const centralSize = writer.length - centralStart;

  writer.u32(EOCD_SIG);
  writer.u16(0);
  writer.u16(0);
  writer.u16(records.length);
  writer.u16(records.length);
  writer.u32(centralSize);
  writer.u32(centralStart);
  writer.u16(0);
  return writer.result();
}

export function readZip(data: Uint8Array): Map<string, Uint8Array> {
  const view = new DataView(data.buffer, data.byteOffset, data.byteLength);
  let eocd = -1;
  for (let i = data.length - 22; i >= 0; i--) {
    if (view.getUint32(i, true) === EOCD_SIG) {
      eocd = i;
      break;
    }
  }
  if (eocd < 0) throw new Error("not a zip archive: no end-of-central-directory record");
  const count = view.getUint16(eocd + 10, true);
  let offset = view.getUint32(eocd + 16, true);

  const decoder = new TextDecoder();
  const entries = new Map<string, Uint8Array>();
  for (let i = 0; i < count; i++) {
    if (view.getUint32(offset, true) !== CENTRAL_SIG) {
      throw new Error("corrupt zip: bad central directory entry");
    }
    const method = view.getUint16(offset + 10, true);
    const size = view.getUint32(offset + 24, true);
    const nameLength = view.getUint16(offset + 28, true);
    const extraLength = view.getUint16(offset + 30, true);
    const commentLength = view.getUint16(offset + 32, true);
    const localOffset = view.getUint32(offset + 42, true);
    const name = decoder.decode(data.subarray(offset + 46, offset + 46 + nameLength));
    if (method !== 0) {
      throw new Error(`unsupported compression method ${method} for ${name}; expected stored`);
    }
    // local header sizes can trail the central values; trust central + local name/extra lengths
    const localNameLength = view.getUint16(localOffset + 26, true);
    const localExtraLength = view.getUint16(localOffset + 28, true);
    const start = localOffset + 30 + localNameLength + localExtraLength;
    entries.set(name, data.subarray(start, start + size));
    offset += 46 + nameLength + extraLength + commentLength;
  }
  return entries;
}
