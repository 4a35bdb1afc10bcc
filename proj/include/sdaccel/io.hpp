#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdaccel/fixedpoint.hpp"
#include "sdaccel/pssa.hpp"
#include "sdaccel/tips.hpp"

namespace sdaccel::io {

// LSB-first bit packing into a byte vector.
class BitWriter {
public:
    void put(uint64_t value, uint32_t bits);
    // Flushes the partial byte (zero padded) and returns the buffer.
    std::vector<uint8_t> finish();
    uint64_t bit_count() const { return bit_count_; }

private:
    std::vector<uint8_t> bytes_;
    uint32_t bit_pos_ = 0;  // bits used in the last byte
    uint64_t bit_count_ = 0;
};

class BitReader {
public:
    explicit BitReader(const std::vector<uint8_t>& bytes) : bytes_(bytes) {}
    // Throws std::runtime_error past the end of the stream.
    uint64_t get(uint32_t bits);
    uint64_t bits_left() const;

private:
    const std::vector<uint8_t>& bytes_;
    uint64_t pos_ = 0;  // bit cursor
};

// QTF1 tensor file: "QTF1", u32 rank, u32 dims[rank], u8 bits, u8 signed,
// f64 scale, then raw little-endian i32 elements.
void save_qtf(const std::string& path, const QTensor& t);
QTensor load_qtf(const std::string& path);

// PSSA1 compressed-SAS file: "PSSA1", u32 rows, u32 cols, u8 patch size,
// u8 value_bits, u16 threshold, then one LSB-first bitstream holding each
// band's patches (row_ptr entries then col_idx entries, fixed widths from
// the patch mode) followed by the value stream, zero-padded to a byte.
void save_pssa(const std::string& path, const pssa::CompressedSAS& c);
pssa::CompressedSAS load_pssa(const std::string& path);

// MASK1 spot-mask file: "MASK1", u32 n_pixels, LSB-first packed bits.
void save_mask(const std::string& path, const tips::SpotMask& mask);
tips::SpotMask load_mask(const std::string& path);

// In-memory PSSA1 payload, byte-identical to the file contents.
std::vector<uint8_t> pssa_to_bytes(const pssa::CompressedSAS& c);
pssa::CompressedSAS pssa_from_bytes(const std::vector<uint8_t>& bytes);

} // namespace sdaccel::io
