#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sdaccel/fixedpoint.hpp"
#include "sdaccel/pssa.hpp"
#include "sdaccel/tips.hpp"

namespace sdaccel::dbsc {

// Core geometry and per-core memory capacities, in bytes.
struct ArrayGeometry {
    uint32_t pe_rows = 16;
    uint32_t pe_cols = 16;
    uint32_t clusters = 4;
    uint32_t cores_per_cluster = 4;
    uint32_t imem_bytes = 6144;    // 6 KB input memory
    uint32_t wmem_bytes = 2304;    // 2.25 KB weight memory
    uint32_t omem_bytes = 12288;   // 12 KB output memory
    uint32_t gmem_bytes = 196608;  // 192 KB global memory
};

enum class StationaryMode {
    InputStationary,   // CNN layers: pin input tiles, stream weights
    WeightStationary,  // transformer layers: pin weight tiles, stream inputs
};

// On-chip access and MAC counters for one simulated layer. All counts are
// element-granular (one counter tick per value moved, whatever its width).
//
//   mac_count   logical multiply-accumulates performed (layer dims minus
//               mac_skipped; unaffected by precision)
//   mac_cycles  PE slots occupied: a high-precision MAC takes one slot, a
//               low-precision pair of adjacent channels shares one slot
//   mac_padding zero-operand slots spent on edge-tile padding
//   mac_skipped MACs avoided entirely by CSR input skipping
struct AccessStats {
    uint64_t imem_reads = 0;
    uint64_t imem_writes = 0;
    uint64_t wmem_reads = 0;
    uint64_t wmem_writes = 0;
    uint64_t omem_reads = 0;
    uint64_t omem_writes = 0;
    uint64_t gmem_reads = 0;
    uint64_t gmem_writes = 0;
    uint64_t mac_count = 0;
    uint64_t mac_cycles = 0;
    uint64_t mac_padding = 0;
    uint64_t mac_skipped = 0;

    AccessStats& operator+=(const AccessStats& o);
    bool operator==(const AccessStats&) const = default;
};

// Plain 32-bit integer matrix, row-major.
struct Mat32 {
    uint32_t rows = 0;
    uint32_t cols = 0;
    std::vector<int32_t> data;

    Mat32() = default;
    Mat32(uint32_t r, uint32_t c) : rows(r), cols(c), data(size_t(r) * c, 0) {}
    int32_t at(uint32_t r, uint32_t c) const { return data[size_t(r) * cols + c]; }
    int32_t& at(uint32_t r, uint32_t c) { return data[size_t(r) * cols + c]; }
    bool operator==(const Mat32&) const = default;
};

// acc + input_slice * weight in exact integer arithmetic. input_slice is a
// signed 7-bit operand, weight signed 8-bit. Overflowing the 32-bit
// accumulator throws std::overflow_error instead of wrapping.
int32_t bspe_mac(int input_slice, int weight, int32_t acc);

// Combines the two adder-tree outputs of a PE column: high precision shifts
// the hi-slice tree left by 6 before adding, low precision adds directly
// (the two trees then hold same-scale partial sums of adjacent channels).
int32_t pe_column_combine(int32_t left_sum, int32_t right_sum, bool high_precision);

// Bit-exact integer GEMM of an unsigned 12-bit activation matrix (M x K)
// against a signed 8-bit weight matrix (K x N), evaluated through the
// bit-sliced datapath: per 16x16 tile, hi and lo slice products accumulate
// in separate trees and combine with a shift. Equals the direct wide-integer
// product exactly.
Mat32 gemm_high(const QTensor& a, const QTensor& w);

// Mixed-precision GEMM: high-tagged rows run the sliced high path; low rows
// pack two adjacent channels (k, k+1) per PE, one per BSPE, and combine the
// trees directly. Bit-exact against the per-row reference product.
Mat32 gemm_mixed(const tips::MixedTensor& a, const QTensor& w);

// Deterministic tile-loop access counting for an M x K x N GEMM layer.
// low_ratio is the fraction of the M rows carrying low-precision (paired)
// activations: low_rows = round(low_ratio * M), assigned to the first rows.
//
// Weight stationary walks (n-tile, k-tile) and streams all M rows per tile:
//   per tile: wmem_writes += 256, wmem_reads += 256 (full padded tile),
//             gmem_reads  += kw * nw (real weight elements)
//   per row:  imem_writes/imem_reads/gmem_reads += kw; one imem read is
//             broadcast across the tile's PE columns
//   per row:  omem_writes += nw; omem_reads += nw when accumulating (kt > 0);
//             gmem_writes += nw after the last k-tile
// Input stationary mirrors this, walking (m-tile, k-tile) with imem/wmem
// roles swapped and N streamed. kw/mw/nw are the tile's real extents; edge
// tiles are zero-padded, and padded slots land in mac_padding only.
AccessStats simulate_dataflow(uint32_t m, uint32_t k, uint32_t n,
                              StationaryMode mode,
                              const ArrayGeometry& geom = {},
                              double low_ratio = 0.0);

// (pruned SAS) * V touching only set-bit positions; the CSR decoder walk.
// v must be cols x d. The result equals the dense product of decode(c)
// against v; mac_skipped counts the (rows*cols - nnz) * d avoided MACs.
std::pair<Mat32, AccessStats> csr_skip_av(const pssa::CompressedSAS& c, const QTensor& v);

// Element-wise sum of equally shaped partial matrices (the aggregation core
// combines the 4 DBSC partials of a cluster). Checked 32-bit addition.
Mat32 aggregate_partials(std::span<const Mat32> partials);

} // namespace sdaccel::dbsc
