#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sdaccel/fixedpoint.hpp"

namespace sdaccel::tips {

// Post-softmax cross-attention probabilities, n_pixels x n_text row-major.
// Column 0 is the CLS column; every row sums to 1.
struct AttentionScores {
    uint32_t n_pixels = 0;
    uint32_t n_text = 0;
    std::vector<double> probs;

    double at(uint32_t pixel, uint32_t token) const {
        return probs[size_t(pixel) * n_text + token];
    }
};

// Per-pixel importance flags; 1 = important (keeps high precision).
struct SpotMask {
    std::vector<uint8_t> important;

    size_t size() const { return important.size(); }
    uint64_t count() const;
    std::vector<uint32_t> indices() const;
};

// INT12/INT6 assignment derived from a spot mask. The mask stored here is
// the effective one: past apply_iteration_limit it is all ones.
struct PrecisionPlan {
    SpotMask mask;
    IntFormat high_format = IntFormat::u12();
    IntFormat low_format = IntFormat::u6();
    int apply_iteration_limit = 20;
};

// FFN activation matrix whose rows carry an individual precision tag.
// High rows hold high_format codes at scale_hi, low rows low_format codes
// at scale_lo.
struct MixedTensor {
    uint32_t rows = 0;
    uint32_t cols = 0;
    std::vector<int32_t> data;
    std::vector<uint8_t> row_high;
    IntFormat high_format = IntFormat::u12();
    IntFormat low_format = IntFormat::u6();
    double scale_hi = 1.0;
    double scale_lo = 1.0;

    int32_t at(uint32_t r, uint32_t c) const { return data[size_t(r) * cols + c]; }
};

// Row-softmax of dequant(q) * dequant(k)^T, optionally scaled by 1/sqrt(d),
// stabilized by per-row max subtraction. q is n_pixels x d, k is n_text x d
// with n_text >= 2 (CLS plus at least one text token).
AttentionScores cross_attention_probs(const QTensor& q, const QTensor& k,
                                      bool inv_sqrt_d_scaling = true);

// Column 0 of the probabilities.
std::vector<double> extract_cas(const AttentionScores& s);

// Minimum of a non-empty sequence.
double min_cas(std::span<const double> cas);

// Min-relative spotting: important[i] = cas[i] <= m * (1 + delta). The
// argmin pixel is always spotted. `m` must equal min(cas) to within 1e-12.
SpotMask spot(std::span<const double> cas, double m, double delta);
SpotMask spot(std::span<const double> cas, double delta);

// Absolute-threshold variant: important[i] = cas[i] <= t_abs.
SpotMask spot_abs(std::span<const double> cas, double t_abs);

// Wraps a mask into a plan for one denoising iteration. Iterations at or
// past tips_iterations mark every pixel high precision. Defaults: 25 total
// iterations, TIPS active for the first 20.
PrecisionPlan build_precision_plan(const SpotMask& mask, int iteration,
                                   int total_iterations = 25,
                                   int tips_iterations = 20);

// Quantizes each activation row at its planned precision: spotted rows to
// high_format at scale_hi, the rest to low_format at scale_lo.
MixedTensor apply_mixed_quantization(std::span<const double> ffn_activation,
                                     uint32_t rows, uint32_t cols,
                                     const PrecisionPlan& plan,
                                     double scale_hi, double scale_lo);

// Fraction of pixels quantized at low precision; 0 for an empty mask.
double low_precision_ratio(const PrecisionPlan& plan);

} // namespace sdaccel::tips
