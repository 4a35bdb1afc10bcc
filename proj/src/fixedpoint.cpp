#include "sdaccel/fixedpoint.hpp"

#include <cmath>
#include <stdexcept>

namespace sdaccel {

void validate_format(const IntFormat& f) {
    if (f.bits < 1 || f.bits > 32)
        throw std::invalid_argument("IntFormat: bits must be in 1..32");
    if (!f.is_signed && f.bits > 31)
        throw std::invalid_argument("IntFormat: unsigned width exceeds 32-bit element storage");
}

size_t QTensor::size() const {
    size_t n = 1;
    for (uint32_t d : shape) n *= d;
    return shape.empty() ? 0 : n;
}

uint32_t QTensor::rows() const {
    if (shape.size() != 2) throw std::invalid_argument("QTensor: rank-2 tensor required");
    return shape[0];
}

uint32_t QTensor::cols() const {
    if (shape.size() != 2) throw std::invalid_argument("QTensor: rank-2 tensor required");
    return shape[1];
}

void QTensor::validate() const {
    validate_format(format);
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw std::invalid_argument("QTensor: scale must be positive and finite");
    if (data.size() != size())
        throw std::invalid_argument("QTensor: data length does not match shape");
    for (int32_t v : data)
        if (!format.contains(v))
            throw std::invalid_argument("QTensor: element outside format range");
}

namespace {

int32_t quantize_one(double v, const IntFormat& f, double scale) {
    if (!std::isfinite(v))
        throw std::invalid_argument("quantize: non-finite input value");
    double q = std::round(v / scale);  // round halves away from zero
    double lo = static_cast<double>(f.min_value());
    double hi = static_cast<double>(f.max_value());
    if (q < lo) q = lo;
    if (q > hi) q = hi;
    return static_cast<int32_t>(q);
}

double gelu_exact(double v) { return 0.5 * v * (1.0 + std::erf(v / std::sqrt(2.0))); }

} // namespace

QTensor quantize(std::span<const double> values, std::vector<uint32_t> shape,
                 const IntFormat& format, double scale) {
    validate_format(format);
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw std::invalid_argument("quantize: scale must be positive");
    QTensor t;
    t.shape = std::move(shape);
    t.format = format;
    t.scale = scale;
    size_t n = 1;
    for (uint32_t d : t.shape) n *= d;
    if (t.shape.empty() || n != values.size())
        throw std::invalid_argument("quantize: shape does not match value count");
    t.data.reserve(values.size());
    for (double v : values) t.data.push_back(quantize_one(v, format, scale));
    return t;
}

QTensor quantize(std::span<const double> values, const IntFormat& format, double scale) {
    return quantize(values, {static_cast<uint32_t>(values.size())}, format, scale);
}

std::vector<double> dequantize(const QTensor& t) {
    t.validate();
    std::vector<double> out;
    out.reserve(t.data.size());
    for (int32_t v : t.data) out.push_back(v * t.scale);
    return out;
}

SlicePair bit_slice_u12(int x) {
    if (x < 0 || x > 4095)
        throw std::invalid_argument("bit_slice_u12: input outside [0, 4095]");
    return {static_cast<int8_t>(x >> 6), static_cast<int8_t>(x & 63)};
}

QTensor gelu(const QTensor& t, int lut_bits) {
    t.validate();
    if (lut_bits < 0 || lut_bits > 20)
        throw std::invalid_argument("gelu: lut_bits must be in 0..20");

    QTensor out = t;
    if (lut_bits == 0) {
        for (size_t i = 0; i < t.data.size(); ++i)
            out.data[i] = quantize_one(gelu_exact(t.data[i] * t.scale), t.format, t.scale);
        return out;
    }

    // Table mode: 2^lut_bits midpoint samples over [-8*scale, 8*scale].
    // Below the table GELU has saturated to 0, above it to the identity.
    const size_t entries = size_t(1) << lut_bits;
    const double lo = -8.0 * t.scale;
    const double hi = 8.0 * t.scale;
    const double step = (hi - lo) / static_cast<double>(entries);
    std::vector<double> table(entries);
    for (size_t i = 0; i < entries; ++i)
        table[i] = gelu_exact(lo + (static_cast<double>(i) + 0.5) * step);

    for (size_t i = 0; i < t.data.size(); ++i) {
        double v = t.data[i] * t.scale;
        double g;
        if (v < lo) {
            g = 0.0;
        } else if (v >= hi) {
            g = v;
        } else {
            size_t idx = static_cast<size_t>((v - lo) / step);
            if (idx >= entries) idx = entries - 1;
            g = table[idx];
        }
        out.data[i] = quantize_one(g, t.format, t.scale);
    }
    return out;
}

QTensor group_norm(const QTensor& t, int groups, double eps,
                   std::span<const double> gamma, std::span<const double> beta) {
    t.validate();
    if (t.shape.empty())
        throw std::invalid_argument("group_norm: empty tensor");
    if (!(eps > 0.0))
        throw std::invalid_argument("group_norm: eps must be positive");
    const uint32_t channels = t.shape[0];
    if (groups < 1 || channels % static_cast<uint32_t>(groups) != 0)
        throw std::invalid_argument("group_norm: channel count not divisible by groups");
    if (gamma.size() != channels || beta.size() != channels)
        throw std::invalid_argument("group_norm: gamma/beta length must equal channel count");

    const size_t inner = t.size() / channels;  // elements per channel
    const uint32_t per_group = channels / static_cast<uint32_t>(groups);

    std::vector<double> vals = dequantize(t);
    QTensor out = t;
    for (int g = 0; g < groups; ++g) {
        const size_t first = size_t(g) * per_group * inner;
        const size_t count = size_t(per_group) * inner;
        double mean = 0.0;
        for (size_t i = 0; i < count; ++i) mean += vals[first + i];
        mean /= static_cast<double>(count);
        double var = 0.0;
        for (size_t i = 0; i < count; ++i) {
            double d = vals[first + i] - mean;
            var += d * d;
        }
        var /= static_cast<double>(count);
        const double inv_std = 1.0 / std::sqrt(var + eps);
        for (size_t i = 0; i < count; ++i) {
            const uint32_t c = static_cast<uint32_t>(g) * per_group +
                               static_cast<uint32_t>(i / inner);
            double y = (vals[first + i] - mean) * inv_std * gamma[c] + beta[c];
            out.data[first + i] = quantize_one(y, t.format, t.scale);
        }
    }
    return out;
}

} // namespace sdaccel
