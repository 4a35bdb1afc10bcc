#include "sdaccel/io.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace sdaccel::io {

void BitWriter::put(uint64_t value, uint32_t bits) {
    if (bits > 57)
        throw std::invalid_argument("BitWriter: at most 57 bits per put");
    if (bits < 64 && (value >> bits) != 0)
        throw std::invalid_argument("BitWriter: value does not fit field width");
    for (uint32_t done = 0; done < bits;) {
        if (bit_pos_ == 0) bytes_.push_back(0);
        const uint32_t room = 8 - bit_pos_;
        const uint32_t take = std::min(room, bits - done);
        bytes_.back() |= static_cast<uint8_t>(((value >> done) & ((1u << take) - 1)) << bit_pos_);
        bit_pos_ = (bit_pos_ + take) & 7;
        done += take;
    }
    bit_count_ += bits;
}

std::vector<uint8_t> BitWriter::finish() {
    bit_pos_ = 0;
    return std::move(bytes_);
}

uint64_t BitReader::get(uint32_t bits) {
    if (bits > 57)
        throw std::invalid_argument("BitReader: at most 57 bits per get");
    if (pos_ + bits > uint64_t(bytes_.size()) * 8)
        throw std::runtime_error("BitReader: stream exhausted");
    uint64_t value = 0;
    for (uint32_t done = 0; done < bits;) {
        const uint64_t byte = pos_ >> 3;
        const uint32_t off = pos_ & 7;
        const uint32_t take = std::min(8 - off, bits - done);
        value |= (uint64_t(bytes_[byte] >> off) & ((1u << take) - 1)) << done;
        pos_ += take;
        done += take;
    }
    return value;
}

uint64_t BitReader::bits_left() const { return uint64_t(bytes_.size()) * 8 - pos_; }

namespace {

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v));
    out.push_back(static_cast<uint8_t>(v >> 8));
}

void put_i32(std::vector<uint8_t>& out, int32_t v) {
    put_u32(out, static_cast<uint32_t>(v));
}

void put_f64(std::vector<uint8_t>& out, double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(bits >> (8 * i)));
}

class ByteReader {
public:
    explicit ByteReader(std::vector<uint8_t> bytes) : bytes_(std::move(bytes)) {}

    uint8_t u8() {
        need(1);
        return bytes_[pos_++];
    }
    uint16_t u16() {
        need(2);
        uint16_t v = static_cast<uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
        pos_ += 2;
        return v;
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= uint32_t(bytes_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }
    int32_t i32() { return static_cast<int32_t>(u32()); }
    double f64() {
        need(8);
        uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= uint64_t(bytes_[pos_ + i]) << (8 * i);
        pos_ += 8;
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    void magic(const char* m, size_t len) {
        need(len);
        if (std::memcmp(bytes_.data() + pos_, m, len) != 0)
            throw std::runtime_error(std::string("bad magic, expected ") + m);
        pos_ += len;
    }
    std::vector<uint8_t> rest() {
        return std::vector<uint8_t>(bytes_.begin() + static_cast<ptrdiff_t>(pos_), bytes_.end());
    }
    size_t remaining() const { return bytes_.size() - pos_; }

private:
    void need(size_t n) const {
        if (pos_ + n > bytes_.size()) throw std::runtime_error("truncated file");
    }
    std::vector<uint8_t> bytes_;
    size_t pos_ = 0;
};

std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                                std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::vector<uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace

void save_qtf(const std::string& path, const QTensor& t) {
    t.validate();
    std::vector<uint8_t> out;
    out.insert(out.end(), {'Q', 'T', 'F', '1'});
    put_u32(out, static_cast<uint32_t>(t.shape.size()));
    for (uint32_t d : t.shape) put_u32(out, d);
    out.push_back(static_cast<uint8_t>(t.format.bits));
    out.push_back(t.format.is_signed ? 1 : 0);
    put_f64(out, t.scale);
    for (int32_t v : t.data) put_i32(out, v);
    write_file(path, out);
}

QTensor load_qtf(const std::string& path) {
    ByteReader r(read_file(path));
    r.magic("QTF1", 4);
    QTensor t;
    const uint32_t rank = r.u32();
    if (rank == 0 || rank > 8) throw std::runtime_error("QTF1: bad rank");
    t.shape.resize(rank);
    size_t n = 1;
    for (uint32_t i = 0; i < rank; ++i) {
        t.shape[i] = r.u32();
        n *= t.shape[i];
    }
    t.format.bits = r.u8();
    t.format.is_signed = r.u8() != 0;
    t.scale = r.f64();
    if (r.remaining() != n * 4) throw std::runtime_error("QTF1: element count mismatch");
    t.data.resize(n);
    for (size_t i = 0; i < n; ++i) t.data[i] = r.i32();
    t.validate();
    return t;
}

void save_pssa(const std::string& path, const pssa::CompressedSAS& c) {
    write_file(path, pssa_to_bytes(c));
}

pssa::CompressedSAS load_pssa(const std::string& path) {
    return pssa_from_bytes(read_file(path));
}

std::vector<uint8_t> pssa_to_bytes(const pssa::CompressedSAS& c) {
    std::vector<uint8_t> out;
    out.insert(out.end(), {'P', 'S', 'S', 'A', '1'});
    put_u32(out, c.rows);
    put_u32(out, c.cols);
    out.push_back(static_cast<uint8_t>(c.mode.size));
    out.push_back(c.value_bits);
    put_u16(out, c.threshold);

    BitWriter bw;
    const uint32_t rp_bits = c.mode.rowptr_bits();
    const uint32_t ci_bits = c.mode.col_bits();
    for (const pssa::PatchCsr& p : c.patches) {
        for (uint32_t v : p.row_ptr) bw.put(v, rp_bits);
        for (uint32_t v : p.col_idx) bw.put(v, ci_bits);
    }
    for (uint16_t v : c.values) bw.put(v, c.value_bits);
    std::vector<uint8_t> payload = bw.finish();
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

pssa::CompressedSAS pssa_from_bytes(const std::vector<uint8_t>& bytes) {
    ByteReader r(bytes);
    r.magic("PSSA1", 5);
    pssa::CompressedSAS c;
    c.rows = r.u32();
    c.cols = r.u32();
    c.mode = pssa::PatchMode(r.u8());
    c.value_bits = r.u8();
    c.threshold = r.u16();
    if (c.rows == 0 || c.cols == 0) throw std::runtime_error("PSSA1: empty dimensions");
    if (c.value_bits != 12) throw std::runtime_error("PSSA1: unsupported value width");

    // ByteReader validated the 17-byte header; the rest is one bitstream.
    std::vector<uint8_t> payload = r.rest();
    BitReader bits(payload);

    const uint32_t s = c.mode.size;
    const uint32_t rp_bits = c.mode.rowptr_bits();
    const uint32_t ci_bits = c.mode.col_bits();
    const uint64_t n_patches = uint64_t(c.bands()) * c.patches_per_band();
    c.patches.reserve(n_patches);
    for (uint64_t i = 0; i < n_patches; ++i) {
        pssa::PatchCsr p;
        p.row_ptr.resize(s + 1);
        for (uint32_t j = 0; j <= s; ++j)
            p.row_ptr[j] = static_cast<uint32_t>(bits.get(rp_bits));
        if (p.row_ptr.back() > uint64_t(s) * s)
            throw std::runtime_error("PSSA1: row_ptr overflow");
        p.col_idx.resize(p.row_ptr.back());
        for (uint32_t j = 0; j < p.row_ptr.back(); ++j)
            p.col_idx[j] = static_cast<uint32_t>(bits.get(ci_bits));
        c.patches.push_back(std::move(p));
    }
    // Value count comes from the restored bitmap, so parse values greedily:
    // whatever full value_bits fields remain belong to the value stream.
    const uint64_t n_values = bits.bits_left() / c.value_bits;
    c.values.reserve(n_values);
    for (uint64_t i = 0; i < n_values; ++i)
        c.values.push_back(static_cast<uint16_t>(bits.get(c.value_bits)));
    return c;
}

void save_mask(const std::string& path, const tips::SpotMask& mask) {
    std::vector<uint8_t> out;
    out.insert(out.end(), {'M', 'A', 'S', 'K', '1'});
    put_u32(out, static_cast<uint32_t>(mask.important.size()));
    BitWriter bw;
    for (uint8_t b : mask.important) bw.put(b ? 1 : 0, 1);
    std::vector<uint8_t> payload = bw.finish();
    out.insert(out.end(), payload.begin(), payload.end());
    write_file(path, out);
}

tips::SpotMask load_mask(const std::string& path) {
    ByteReader r(read_file(path));
    r.magic("MASK1", 5);
    const uint32_t n = r.u32();
    std::vector<uint8_t> payload = r.rest();
    if (payload.size() != (size_t(n) + 7) / 8)
        throw std::runtime_error("MASK1: payload length mismatch");
    BitReader bits(payload);
    tips::SpotMask mask;
    mask.important.resize(n);
    for (uint32_t i = 0; i < n; ++i)
        mask.important[i] = static_cast<uint8_t>(bits.get(1));
    return mask;
}

} // namespace sdaccel::io
