#pragma once

#include <cstdint>

#include "sdaccel/fixedpoint.hpp"
#include "sdaccel/pssa.hpp"

namespace sdaccel::synth {

// Synthetic SAS generator with controllable patch-to-patch similarity.
// Each band's first patch is sampled i.i.d. with set probability
// 1 - target_sparsity; every following patch copies its left neighbor and
// flips each bit independently with probability adjacent_flip_rate. Set
// positions get uniform values in (threshold, 4095], cleared positions
// uniform values in [0, threshold].
struct SynthSpec {
    uint32_t rows = 64;
    uint32_t cols = 64;
    pssa::PatchMode mode{64};
    double target_sparsity = 0.5;
    double adjacent_flip_rate = 0.0;
    uint64_t seed = 0;
    uint16_t threshold = 0;
};

// Deterministic for a fixed spec. Dimensions must be patch multiples,
// rates must lie in [0, 1] and threshold below 4095.
QTensor synth_sas(const SynthSpec& spec);

} // namespace sdaccel::synth
