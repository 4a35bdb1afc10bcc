#include "sdaccel/pssa.hpp"

#include <stdexcept>

namespace sdaccel::pssa {

PatchMode::PatchMode(uint32_t s) : size(s) {
    if (s != 16 && s != 32 && s != 64)
        throw std::invalid_argument("PatchMode: size must be 16, 32 or 64");
}

PrunedSAS prune_sas(const QTensor& sas, int threshold) {
    sas.validate();
    if (sas.shape.size() != 2)
        throw std::invalid_argument("prune_sas: 2-D tensor required");
    if (sas.format != IntFormat::u12())
        throw std::invalid_argument("prune_sas: unsigned 12-bit tensor required");
    if (threshold < 0 || threshold > 4095)
        throw std::invalid_argument("prune_sas: threshold outside [0, 4095]");

    PrunedSAS out;
    out.rows = sas.rows();
    out.cols = sas.cols();
    out.bitmap = BitMatrix(out.rows, out.cols);
    for (uint32_t r = 0; r < out.rows; ++r) {
        for (uint32_t c = 0; c < out.cols; ++c) {
            int32_t v = sas.at(r, c);
            if (v > threshold) {
                out.bitmap.set(r, c, true);
                out.values.push_back(static_cast<uint16_t>(v));
            }
        }
    }
    return out;
}

namespace {

void require_patch_dims(const BitMatrix& b, PatchMode mode, const char* who) {
    if (b.rows() % mode.size != 0 || b.cols() % mode.size != 0)
        throw std::invalid_argument(std::string(who) +
                                    ": dimensions not divisible by patch size");
}

} // namespace

BitMatrix xor_augment(const BitMatrix& bitmap, PatchMode mode) {
    require_patch_dims(bitmap, mode, "xor_augment");
    BitMatrix out = bitmap;
    const uint32_t s = mode.size;
    for (uint32_t band = 0; band < bitmap.rows() / s; ++band) {
        for (uint32_t p = bitmap.cols() / s; p-- > 1;) {
            // Rightmost first so each patch diffs against the original left
            // neighbor, never an already-emitted diff.
            const uint32_t r0 = band * s;
            const uint32_t c0 = p * s;
            for (uint32_t r = 0; r < s; ++r)
                for (uint32_t c = 0; c < s; ++c)
                    out.set(r0 + r, c0 + c,
                            bitmap.get(r0 + r, c0 + c) ^ bitmap.get(r0 + r, c0 - s + c));
        }
    }
    return out;
}

BitMatrix xor_restore(const BitMatrix& diff, PatchMode mode) {
    require_patch_dims(diff, mode, "xor_restore");
    BitMatrix out = diff;
    const uint32_t s = mode.size;
    for (uint32_t band = 0; band < diff.rows() / s; ++band) {
        for (uint32_t p = 1; p < diff.cols() / s; ++p) {
            const uint32_t r0 = band * s;
            const uint32_t c0 = p * s;
            for (uint32_t r = 0; r < s; ++r)
                for (uint32_t c = 0; c < s; ++c)
                    out.set(r0 + r, c0 + c,
                            diff.get(r0 + r, c0 + c) ^ out.get(r0 + r, c0 - s + c));
        }
    }
    return out;
}

PatchCsr csr_encode_patch(const BitMatrix& patch) {
    if (patch.rows() != patch.cols())
        throw std::invalid_argument("csr_encode_patch: square patch required");
    PatchCsr csr;
    csr.row_ptr.reserve(patch.rows() + 1);
    csr.row_ptr.push_back(0);
    for (uint32_t r = 0; r < patch.rows(); ++r) {
        for (uint32_t c = 0; c < patch.cols(); ++c)
            if (patch.get(r, c)) csr.col_idx.push_back(c);
        csr.row_ptr.push_back(static_cast<uint32_t>(csr.col_idx.size()));
    }
    return csr;
}

CompressedSAS encode(const QTensor& sas, int threshold, PatchMode mode,
                     const EncodeOptions& opts) {
    PrunedSAS pruned = prune_sas(sas, threshold);
    if ((pruned.rows % mode.size != 0 || pruned.cols % mode.size != 0) && !opts.allow_padding)
        throw std::invalid_argument("encode: dimensions not divisible by patch size "
                                    "(enable padding to round up)");

    CompressedSAS c;
    c.rows = pruned.rows;
    c.cols = pruned.cols;
    c.mode = mode;
    c.value_bits = 12;
    c.threshold = static_cast<uint16_t>(threshold);
    c.values = std::move(pruned.values);

    BitMatrix bitmap = (c.padded_rows() != c.rows || c.padded_cols() != c.cols)
                           ? pruned.bitmap.padded(c.padded_rows(), c.padded_cols())
                           : pruned.bitmap;
    BitMatrix diff = xor_augment(bitmap, mode);

    const uint32_t s = mode.size;
    c.patches.reserve(size_t(c.bands()) * c.patches_per_band());
    for (uint32_t band = 0; band < c.bands(); ++band)
        for (uint32_t p = 0; p < c.patches_per_band(); ++p)
            c.patches.push_back(csr_encode_patch(diff.sub(band * s, p * s, s, s)));
    return c;
}

PrunedSAS decode(const CompressedSAS& c) {
    const uint32_t s = c.mode.size;
    const uint64_t expected_patches = uint64_t(c.bands()) * c.patches_per_band();
    if (c.patches.size() != expected_patches)
        throw std::runtime_error("decode: patch count does not match header dimensions");
    if (c.value_bits != 12)
        throw std::runtime_error("decode: unsupported value width");

    BitMatrix diff(c.padded_rows(), c.padded_cols());
    size_t pi = 0;
    for (uint32_t band = 0; band < c.bands(); ++band) {
        for (uint32_t p = 0; p < c.patches_per_band(); ++p, ++pi) {
            const PatchCsr& csr = c.patches[pi];
            if (csr.row_ptr.size() != s + 1 || csr.row_ptr.front() != 0)
                throw std::runtime_error("decode: malformed row_ptr");
            for (size_t i = 1; i < csr.row_ptr.size(); ++i)
                if (csr.row_ptr[i] < csr.row_ptr[i - 1])
                    throw std::runtime_error("decode: row_ptr not non-decreasing");
            if (csr.row_ptr.back() != csr.col_idx.size() ||
                csr.col_idx.size() > size_t(s) * s)
                throw std::runtime_error("decode: row_ptr/col_idx length mismatch");
            for (uint32_t r = 0; r < s; ++r) {
                uint32_t prev_col = 0;
                for (uint32_t i = csr.row_ptr[r]; i < csr.row_ptr[r + 1]; ++i) {
                    uint32_t col = csr.col_idx[i];
                    if (col >= s)
                        throw std::runtime_error("decode: col_idx outside patch");
                    if (i > csr.row_ptr[r] && col <= prev_col)
                        throw std::runtime_error("decode: col_idx not ascending");
                    prev_col = col;
                    diff.set(band * s + r, p * s + col, true);
                }
            }
        }
    }

    BitMatrix restored = xor_restore(diff, c.mode);
    PrunedSAS out;
    out.rows = c.rows;
    out.cols = c.cols;
    out.bitmap = (restored.rows() != c.rows || restored.cols() != c.cols)
                     ? restored.sub(0, 0, c.rows, c.cols)
                     : restored;
    if (out.bitmap.popcount() != c.values.size())
        throw std::runtime_error("decode: value stream length mismatch with restored bitmap");
    // Padding must restore to zero bits; anything else is a corrupt stream.
    if (restored.popcount() != out.bitmap.popcount())
        throw std::runtime_error("decode: nonzero bits in padding region");
    out.values = c.values;
    return out;
}

uint64_t index_bits(const CompressedSAS& c) {
    uint64_t bits = 0;
    for (const PatchCsr& p : c.patches)
        bits += uint64_t(p.col_idx.size()) * c.mode.col_bits() +
                uint64_t(p.row_ptr.size()) * c.mode.rowptr_bits();
    return bits;
}

uint64_t baseline_local_csr_bits(const BitMatrix& bitmap, PatchMode mode) {
    require_patch_dims(bitmap, mode, "baseline_local_csr_bits");
    const uint32_t s = mode.size;
    uint64_t bits = 0;
    for (uint32_t band = 0; band < bitmap.rows() / s; ++band) {
        for (uint32_t p = 0; p < bitmap.cols() / s; ++p) {
            uint64_t nnz = 0;
            for (uint32_t r = 0; r < s; ++r)
                for (uint32_t c = 0; c < s; ++c)
                    if (bitmap.get(band * s + r, p * s + c)) ++nnz;
            bits += nnz * mode.col_bits() + uint64_t(s + 1) * mode.rowptr_bits();
        }
    }
    return bits;
}

uint64_t baseline_rle_bits(const BitMatrix& bitmap, int run_bits) {
    if (run_bits < 1 || run_bits > 32)
        throw std::invalid_argument("baseline_rle_bits: run_bits must be in 1..32");
    const uint64_t total = uint64_t(bitmap.rows()) * bitmap.cols();
    if (total == 0) return 0;

    const uint64_t max_run = (uint64_t(1) << run_bits) - 1;
    uint64_t tokens = 0;
    bool symbol = false;  // runs alternate starting with a zero run
    uint64_t run = 0;
    auto flush = [&](uint64_t len) {
        while (len >= max_run) {
            ++tokens;  // saturated token, same symbol continues
            len -= max_run;
        }
        ++tokens;  // remainder token, possibly zero length
    };
    for (uint64_t i = 0; i < total; ++i) {
        bool bit = bitmap.get(static_cast<uint32_t>(i / bitmap.cols()),
                              static_cast<uint32_t>(i % bitmap.cols()));
        if (bit == symbol) {
            ++run;
        } else {
            flush(run);
            symbol = bit;
            run = 1;
        }
    }
    flush(run);
    return tokens * static_cast<uint64_t>(run_bits);
}

uint64_t baseline_global_csr_bits(const BitMatrix& bitmap) {
    const uint64_t nnz = bitmap.popcount();
    const uint64_t nnz_max = uint64_t(bitmap.rows()) * bitmap.cols();
    const uint32_t col_w = bitmap.cols() > 1 ? std::bit_width(bitmap.cols() - 1) : 0;
    const uint32_t rowptr_w = nnz_max > 0 ? std::bit_width(nnz_max) : 0;
    return nnz * col_w + uint64_t(bitmap.rows() + 1) * rowptr_w;
}

} // namespace sdaccel::pssa
