#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sdaccel {

// Integer number format: bit width (1..32) plus signedness.
struct IntFormat {
    int bits = 8;
    bool is_signed = false;

    constexpr IntFormat() = default;
    constexpr IntFormat(int b, bool s) : bits(b), is_signed(s) {}

    int64_t min_value() const {
        return is_signed ? -(int64_t(1) << (bits - 1)) : 0;
    }
    int64_t max_value() const {
        return is_signed ? (int64_t(1) << (bits - 1)) - 1
                         : (int64_t(1) << bits) - 1;
    }
    bool contains(int64_t v) const {
        return v >= min_value() && v <= max_value();
    }
    bool operator==(const IntFormat&) const = default;

    static constexpr IntFormat u6() { return {6, false}; }
    static constexpr IntFormat u12() { return {12, false}; }
    static constexpr IntFormat s8() { return {8, true}; }
    static constexpr IntFormat s32() { return {32, true}; }
};

// Throws std::invalid_argument if bits are out of range or the format's
// range does not fit the 32-bit element storage (i.e. unsigned width > 31).
void validate_format(const IntFormat& f);

// Integer-quantized tensor. Elements are stored row-major as int32 regardless
// of the logical format; `value = data[i] * scale`.
struct QTensor {
    std::vector<uint32_t> shape;
    std::vector<int32_t> data;
    IntFormat format;
    double scale = 1.0;

    size_t size() const;
    // 2-D accessors; throw unless rank is exactly 2.
    uint32_t rows() const;
    uint32_t cols() const;
    int32_t at(uint32_t r, uint32_t c) const { return data[size_t(r) * shape[1] + c]; }
    int32_t& at(uint32_t r, uint32_t c) { return data[size_t(r) * shape[1] + c]; }

    // Checks shape/data consistency, scale > 0 and element ranges.
    void validate() const;
};

// hi/lo halves of an unsigned 12-bit value, carried in signed 7-bit
// containers (sign bit always clear) so they feed the INT7xINT8 multiplier.
struct SlicePair {
    int8_t hi = 0;
    int8_t lo = 0;
    bool operator==(const SlicePair&) const = default;
};

// Round-half-away-from-zero quantization: clamp(round(v / scale)) into the
// format range. Throws on non-finite inputs or scale <= 0.
QTensor quantize(std::span<const double> values, const IntFormat& format, double scale);
QTensor quantize(std::span<const double> values, std::vector<uint32_t> shape,
                 const IntFormat& format, double scale);

std::vector<double> dequantize(const QTensor& t);

// x in [0, 4095] -> (hi = x >> 6, lo = x & 63); 64*hi + lo == x.
SlicePair bit_slice_u12(int x);

// Element-wise GELU, computed on dequantized values and requantized to the
// input's format and scale. lut_bits == 0 evaluates 0.5*v*(1+erf(v/sqrt(2)))
// exactly; lut_bits > 0 samples that curve into a 2^lut_bits-entry uniform
// table spanning [-8*scale, 8*scale], with inputs below the table treated as
// 0 and inputs above it passed through unchanged.
QTensor gelu(const QTensor& t, int lut_bits = 0);

// Group normalization over the leading (channel) dimension: channels are
// split into `groups` contiguous groups, each normalized to zero mean / unit
// variance across its channels and inner elements, then scaled by gamma and
// shifted by beta per channel. Output keeps the input's format and scale.
QTensor group_norm(const QTensor& t, int groups, double eps,
                   std::span<const double> gamma, std::span<const double> beta);

} // namespace sdaccel
