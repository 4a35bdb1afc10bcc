#include "sdaccel/tips.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sdaccel::tips {

uint64_t SpotMask::count() const {
    uint64_t n = 0;
    for (uint8_t b : important) n += b ? 1 : 0;
    return n;
}

std::vector<uint32_t> SpotMask::indices() const {
    std::vector<uint32_t> out;
    for (uint32_t i = 0; i < important.size(); ++i)
        if (important[i]) out.push_back(i);
    return out;
}

AttentionScores cross_attention_probs(const QTensor& q, const QTensor& k,
                                      bool inv_sqrt_d_scaling) {
    q.validate();
    k.validate();
    if (q.shape.size() != 2 || k.shape.size() != 2)
        throw std::invalid_argument("cross_attention_probs: 2-D tensors required");
    if (q.cols() != k.cols())
        throw std::invalid_argument("cross_attention_probs: inner dimensions differ");
    if (k.rows() < 2)
        throw std::invalid_argument("cross_attention_probs: need CLS plus at least one text token");

    const uint32_t n = q.rows();
    const uint32_t t = k.rows();
    const uint32_t d = q.cols();
    const double scaling = inv_sqrt_d_scaling ? 1.0 / std::sqrt(double(d)) : 1.0;

    AttentionScores s;
    s.n_pixels = n;
    s.n_text = t;
    s.probs.resize(size_t(n) * t);

    std::vector<double> logits(t);
    for (uint32_t i = 0; i < n; ++i) {
        double row_max = -std::numeric_limits<double>::infinity();
        for (uint32_t j = 0; j < t; ++j) {
            double dot = 0.0;
            for (uint32_t x = 0; x < d; ++x)
                dot += (q.at(i, x) * q.scale) * (k.at(j, x) * k.scale);
            logits[j] = dot * scaling;
            row_max = std::max(row_max, logits[j]);
        }
        double denom = 0.0;
        for (uint32_t j = 0; j < t; ++j) {
            logits[j] = std::exp(logits[j] - row_max);
            denom += logits[j];
        }
        for (uint32_t j = 0; j < t; ++j)
            s.probs[size_t(i) * t + j] = logits[j] / denom;
    }
    return s;
}

std::vector<double> extract_cas(const AttentionScores& s) {
    std::vector<double> cas(s.n_pixels);
    for (uint32_t i = 0; i < s.n_pixels; ++i) cas[i] = s.at(i, 0);
    return cas;
}

double min_cas(std::span<const double> cas) {
    if (cas.empty()) throw std::invalid_argument("min_cas: empty sequence");
    return *std::min_element(cas.begin(), cas.end());
}

SpotMask spot(std::span<const double> cas, double m, double delta) {
    if (delta < 0.0) throw std::invalid_argument("spot: delta must be non-negative");
    if (std::abs(m - min_cas(cas)) > 1e-12)
        throw std::invalid_argument("spot: m does not equal min(cas)");
    const double threshold = m * (1.0 + delta);
    SpotMask mask;
    mask.important.resize(cas.size());
    for (size_t i = 0; i < cas.size(); ++i)
        mask.important[i] = cas[i] <= threshold ? 1 : 0;
    return mask;
}

SpotMask spot(std::span<const double> cas, double delta) {
    return spot(cas, min_cas(cas), delta);
}

SpotMask spot_abs(std::span<const double> cas, double t_abs) {
    SpotMask mask;
    mask.important.resize(cas.size());
    for (size_t i = 0; i < cas.size(); ++i)
        mask.important[i] = cas[i] <= t_abs ? 1 : 0;
    return mask;
}

PrecisionPlan build_precision_plan(const SpotMask& mask, int iteration,
                                   int total_iterations, int tips_iterations) {
    if (tips_iterations > total_iterations)
        throw std::invalid_argument("build_precision_plan: tips_iterations exceeds total");
    if (iteration < 0 || iteration >= total_iterations)
        throw std::invalid_argument("build_precision_plan: iteration outside schedule");

    PrecisionPlan plan;
    plan.apply_iteration_limit = tips_iterations;
    plan.mask = mask;
    if (iteration >= tips_iterations)
        std::fill(plan.mask.important.begin(), plan.mask.important.end(), uint8_t(1));
    return plan;
}

MixedTensor apply_mixed_quantization(std::span<const double> ffn_activation,
                                     uint32_t rows, uint32_t cols,
                                     const PrecisionPlan& plan,
                                     double scale_hi, double scale_lo) {
    if (!(scale_hi > 0.0) || !(scale_lo > 0.0))
        throw std::invalid_argument("apply_mixed_quantization: scales must be positive");
    if (ffn_activation.size() != size_t(rows) * cols)
        throw std::invalid_argument("apply_mixed_quantization: activation size mismatch");
    if (plan.mask.size() != rows)
        throw std::invalid_argument("apply_mixed_quantization: mask length does not match rows");

    MixedTensor out;
    out.rows = rows;
    out.cols = cols;
    out.high_format = plan.high_format;
    out.low_format = plan.low_format;
    out.scale_hi = scale_hi;
    out.scale_lo = scale_lo;
    out.row_high.assign(plan.mask.important.begin(), plan.mask.important.end());
    out.data.resize(size_t(rows) * cols);

    for (uint32_t r = 0; r < rows; ++r) {
        const bool high = plan.mask.important[r] != 0;
        const IntFormat& f = high ? plan.high_format : plan.low_format;
        const double s = high ? scale_hi : scale_lo;
        for (uint32_t c = 0; c < cols; ++c) {
            double v = ffn_activation[size_t(r) * cols + c];
            if (!std::isfinite(v))
                throw std::invalid_argument("apply_mixed_quantization: non-finite activation");
            double q = std::round(v / s);
            double lo = static_cast<double>(f.min_value());
            double hi = static_cast<double>(f.max_value());
            if (q < lo) q = lo;
            if (q > hi) q = hi;
            out.data[size_t(r) * cols + c] = static_cast<int32_t>(q);
        }
    }
    return out;
}

double low_precision_ratio(const PrecisionPlan& plan) {
    const size_t n = plan.mask.size();
    if (n == 0) return 0.0;
    return 1.0 - static_cast<double>(plan.mask.count()) / static_cast<double>(n);
}

} // namespace sdaccel::tips
