#include "sdaccel/synth.hpp"

#include <stdexcept>

#include "sdaccel/bitmatrix.hpp"
#include "sdaccel/rng.hpp"

namespace sdaccel::synth {

QTensor synth_sas(const SynthSpec& spec) {
    if (spec.rows == 0 || spec.cols == 0)
        throw std::invalid_argument("synth_sas: empty dimensions");
    if (spec.rows % spec.mode.size != 0 || spec.cols % spec.mode.size != 0)
        throw std::invalid_argument("synth_sas: dimensions not divisible by patch size");
    if (spec.target_sparsity < 0.0 || spec.target_sparsity > 1.0 ||
        spec.adjacent_flip_rate < 0.0 || spec.adjacent_flip_rate > 1.0)
        throw std::invalid_argument("synth_sas: rates outside [0, 1]");
    if (spec.threshold >= 4095)
        throw std::invalid_argument("synth_sas: threshold leaves no room for survivors");

    Rng rng(spec.seed);
    const uint32_t s = spec.mode.size;

    // Bitmap first: bands top to bottom, patches left to right, row-major
    // within a patch. Patch 0 is i.i.d.; the rest perturb their left
    // neighbor bit by bit.
    BitMatrix bitmap(spec.rows, spec.cols);
    const double set_p = 1.0 - spec.target_sparsity;
    for (uint32_t band = 0; band < spec.rows / s; ++band) {
        for (uint32_t p = 0; p < spec.cols / s; ++p) {
            for (uint32_t r = 0; r < s; ++r) {
                for (uint32_t c = 0; c < s; ++c) {
                    const uint32_t gr = band * s + r;
                    const uint32_t gc = p * s + c;
                    bool bit;
                    if (p == 0) {
                        bit = rng.bernoulli(set_p);
                    } else {
                        bit = bitmap.get(gr, gc - s);
                        if (rng.bernoulli(spec.adjacent_flip_rate)) bit = !bit;
                    }
                    bitmap.set(gr, gc, bit);
                }
            }
        }
    }

    // Values second, row-major over the matrix: survivors above the
    // threshold, pruned positions at or below it.
    QTensor t;
    t.shape = {spec.rows, spec.cols};
    t.format = IntFormat::u12();
    t.scale = 1.0;
    t.data.resize(size_t(spec.rows) * spec.cols);
    const uint32_t live_span = 4095 - spec.threshold;  // values threshold+1 .. 4095
    for (uint32_t r = 0; r < spec.rows; ++r) {
        for (uint32_t c = 0; c < spec.cols; ++c) {
            int32_t v;
            if (bitmap.get(r, c))
                v = static_cast<int32_t>(spec.threshold + 1 + rng.next_below(live_span));
            else
                v = static_cast<int32_t>(rng.next_below(uint32_t(spec.threshold) + 1));
            t.data[size_t(r) * spec.cols + c] = v;
        }
    }
    return t;
}

} // namespace sdaccel::synth
