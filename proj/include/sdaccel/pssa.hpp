#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "sdaccel/bitmatrix.hpp"
#include "sdaccel/fixedpoint.hpp"

namespace sdaccel::pssa {

// Square patch side length; only 16, 32 and 64 are legal.
struct PatchMode {
    uint32_t size = 64;

    PatchMode() = default;
    explicit PatchMode(uint32_t s);

    // Width of one col_idx entry: 4/5/6 bits for size 16/32/64.
    uint32_t col_bits() const { return std::bit_width(size - 1); }
    // Width of one row_ptr entry; row_ptr values range over [0, size^2].
    uint32_t rowptr_bits() const { return std::bit_width(size * size); }

    bool operator==(const PatchMode&) const = default;
};

// Thresholded attention-score matrix: occupancy bitmap plus the surviving
// 12-bit values in row-major set-bit order.
struct PrunedSAS {
    uint32_t rows = 0;
    uint32_t cols = 0;
    BitMatrix bitmap;
    std::vector<uint16_t> values;
};

// CSR indices of one patch: row_ptr has size+1 entries, col_idx holds the
// in-patch column of every set bit, ascending within each row.
struct PatchCsr {
    std::vector<uint32_t> row_ptr;
    std::vector<uint32_t> col_idx;
};

// Encoded stream. Patches are stored band-major (a band is `size` consecutive
// rows), left to right, and describe the XOR-augmented bitmap. The value
// stream keeps the pruned values themselves, row-major over the original
// matrix; the XOR step only ever touches index information.
struct CompressedSAS {
    uint32_t rows = 0;       // original dimensions (pre-padding)
    uint32_t cols = 0;
    PatchMode mode;
    uint8_t value_bits = 12;
    uint16_t threshold = 0;
    std::vector<PatchCsr> patches;
    std::vector<uint16_t> values;

    uint32_t padded_rows() const { return (rows + mode.size - 1) / mode.size * mode.size; }
    uint32_t padded_cols() const { return (cols + mode.size - 1) / mode.size * mode.size; }
    uint32_t bands() const { return padded_rows() / mode.size; }
    uint32_t patches_per_band() const { return padded_cols() / mode.size; }
};

struct EncodeOptions {
    // Zero-pad non-divisible dimensions up to the next patch multiple.
    // Off by default: non-divisible input is an error.
    bool allow_padding = false;
};

// bitmap[i][j] = 1 iff sas[i][j] > threshold; surviving values collected
// row-major. Input must be 2-D unsigned 12-bit; threshold in [0, 4095].
PrunedSAS prune_sas(const QTensor& sas, int threshold);

// Horizontal sparsity augmentation: within each band of size x size patches,
// patch 0 passes through and patch k (k >= 1) is replaced by
// patch_k XOR patch_{k-1}, always against the original left neighbor.
BitMatrix xor_augment(const BitMatrix& bitmap, PatchMode mode);

// Inverse of xor_augment: running XOR left-to-right per band.
BitMatrix xor_restore(const BitMatrix& diff, PatchMode mode);

// Standard CSR of a square patch's set bits.
PatchCsr csr_encode_patch(const BitMatrix& patch);

// prune -> xor_augment -> per-patch CSR.
CompressedSAS encode(const QTensor& sas, int threshold, PatchMode mode,
                     const EncodeOptions& opts = {});

// Exact inverse of encode: rebuilds the diff bitmap from CSR, restores the
// pruned bitmap, re-attaches values. Throws std::runtime_error on malformed
// row_ptr/col_idx or a value stream whose length disagrees with the restored
// popcount.
PrunedSAS decode(const CompressedSAS& c);

// Total index bits: sum over patches of |col_idx| * col_bits plus
// (size+1) * rowptr_bits. Value bits and the fixed header are excluded.
uint64_t index_bits(const CompressedSAS& c);

// Baselines for comparison, all on the pruned bitmap.

// Patch-local CSR without the XOR step; same patch grid and field widths
// as encode(). Dimensions must be patch multiples.
uint64_t baseline_local_csr_bits(const BitMatrix& bitmap, PatchMode mode);

// Run-length encoding of the row-major bit sequence. Runs alternate starting
// with a zero run; each token is run_bits wide, a saturated token (2^run_bits
// - 1) continues the same symbol, and the remainder token after saturation
// may be zero length.
uint64_t baseline_rle_bits(const BitMatrix& bitmap, int run_bits);

// One CSR over the whole matrix: col_idx entries ceil(log2(cols)) bits,
// row_ptr entries wide enough for nnz_max = rows*cols.
uint64_t baseline_global_csr_bits(const BitMatrix& bitmap);

} // namespace sdaccel::pssa
