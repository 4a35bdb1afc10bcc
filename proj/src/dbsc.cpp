#include "sdaccel/dbsc.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sdaccel::dbsc {

AccessStats& AccessStats::operator+=(const AccessStats& o) {
    imem_reads += o.imem_reads;
    imem_writes += o.imem_writes;
    wmem_reads += o.wmem_reads;
    wmem_writes += o.wmem_writes;
    omem_reads += o.omem_reads;
    omem_writes += o.omem_writes;
    gmem_reads += o.gmem_reads;
    gmem_writes += o.gmem_writes;
    mac_count += o.mac_count;
    mac_cycles += o.mac_cycles;
    mac_padding += o.mac_padding;
    mac_skipped += o.mac_skipped;
    return *this;
}

namespace {

int32_t checked_add(int64_t a, int64_t b, const char* who) {
    int64_t r = a + b;
    if (r < std::numeric_limits<int32_t>::min() || r > std::numeric_limits<int32_t>::max())
        throw std::overflow_error(std::string(who) + ": 32-bit accumulator overflow");
    return static_cast<int32_t>(r);
}

} // namespace

int32_t bspe_mac(int input_slice, int weight, int32_t acc) {
    if (input_slice < -64 || input_slice > 63)
        throw std::invalid_argument("bspe_mac: input slice outside signed 7-bit range");
    if (weight < -128 || weight > 127)
        throw std::invalid_argument("bspe_mac: weight outside signed 8-bit range");
    return checked_add(acc, int64_t(input_slice) * weight, "bspe_mac");
}

int32_t pe_column_combine(int32_t left_sum, int32_t right_sum, bool high_precision) {
    if (!high_precision) return checked_add(left_sum, right_sum, "pe_column_combine");
    return checked_add(int64_t(left_sum) << 6, right_sum, "pe_column_combine");
}

namespace {

constexpr uint32_t kTile = 16;

void require_s8_weights(const QTensor& w) {
    w.validate();
    if (w.shape.size() != 2 || w.format != IntFormat::s8())
        throw std::invalid_argument("gemm: weights must be a 2-D signed 8-bit tensor");
}

// One output element's walk over a k-tile in high precision: hi and lo
// slice products accumulate in their own trees, then shift-combine.
int32_t high_tile_partial(const int32_t* a_row, const int32_t* w_col, uint32_t w_stride,
                          uint32_t k0, uint32_t kw) {
    int32_t hi_tree = 0;
    int32_t lo_tree = 0;
    for (uint32_t k = 0; k < kw; ++k) {
        SlicePair s = bit_slice_u12(a_row[k0 + k]);
        int wv = w_col[size_t(k0 + k) * w_stride];
        hi_tree = bspe_mac(s.hi, wv, hi_tree);
        lo_tree = bspe_mac(s.lo, wv, lo_tree);
    }
    return pe_column_combine(hi_tree, lo_tree, true);
}

// Low precision packs channels (k, k+1) onto one PE: left BSPEs take the
// even channel, right BSPEs the odd one, and the trees add directly.
int32_t low_tile_partial(const int32_t* a_row, const int32_t* w_col, uint32_t w_stride,
                         uint32_t k0, uint32_t kw) {
    int32_t left_tree = 0;
    int32_t right_tree = 0;
    for (uint32_t k = 0; k < kw; k += 2) {
        left_tree = bspe_mac(a_row[k0 + k], w_col[size_t(k0 + k) * w_stride], left_tree);
        if (k + 1 < kw)
            right_tree = bspe_mac(a_row[k0 + k + 1],
                                  w_col[size_t(k0 + k + 1) * w_stride], right_tree);
    }
    return pe_column_combine(left_tree, right_tree, false);
}

} // namespace

Mat32 gemm_high(const QTensor& a, const QTensor& w) {
    a.validate();
    require_s8_weights(w);
    if (a.shape.size() != 2 || a.format != IntFormat::u12())
        throw std::invalid_argument("gemm_high: activations must be a 2-D unsigned 12-bit tensor");
    if (a.cols() != w.rows())
        throw std::invalid_argument("gemm_high: dimension mismatch");

    const uint32_t m = a.rows(), k = a.cols(), n = w.cols();
    Mat32 out(m, n);
    for (uint32_t i = 0; i < m; ++i) {
        const int32_t* a_row = a.data.data() + size_t(i) * k;
        for (uint32_t nt = 0; nt < n; nt += kTile) {
            const uint32_t nw = std::min(kTile, n - nt);
            for (uint32_t kt = 0; kt < k; kt += kTile) {
                const uint32_t kw = std::min(kTile, k - kt);
                for (uint32_t j = 0; j < nw; ++j) {
                    int32_t partial = high_tile_partial(
                        a_row, w.data.data() + nt + j, n, kt, kw);
                    out.at(i, nt + j) = checked_add(out.at(i, nt + j), partial, "gemm_high");
                }
            }
        }
    }
    return out;
}

Mat32 gemm_mixed(const tips::MixedTensor& a, const QTensor& w) {
    require_s8_weights(w);
    if (a.row_high.size() != a.rows)
        throw std::invalid_argument("gemm_mixed: row tag length does not match rows");
    if (a.data.size() != size_t(a.rows) * a.cols)
        throw std::invalid_argument("gemm_mixed: data size mismatch");
    if (a.cols != w.rows())
        throw std::invalid_argument("gemm_mixed: dimension mismatch");
    if (a.high_format != IntFormat::u12() || a.low_format != IntFormat::u6())
        throw std::invalid_argument("gemm_mixed: expected U12 high / U6 low row formats");

    const uint32_t m = a.rows, k = a.cols, n = w.cols();
    for (uint32_t i = 0; i < m; ++i) {
        const IntFormat& f = a.row_high[i] ? a.high_format : a.low_format;
        for (uint32_t x = 0; x < k; ++x)
            if (!f.contains(a.at(i, x)))
                throw std::invalid_argument("gemm_mixed: element outside its row format");
    }

    Mat32 out(m, n);
    for (uint32_t i = 0; i < m; ++i) {
        const int32_t* a_row = a.data.data() + size_t(i) * k;
        const bool high = a.row_high[i] != 0;
        for (uint32_t nt = 0; nt < n; nt += kTile) {
            const uint32_t nw = std::min(kTile, n - nt);
            for (uint32_t kt = 0; kt < k; kt += kTile) {
                const uint32_t kw = std::min(kTile, k - kt);
                for (uint32_t j = 0; j < nw; ++j) {
                    const int32_t* w_col = w.data.data() + nt + j;
                    int32_t partial = high ? high_tile_partial(a_row, w_col, n, kt, kw)
                                           : low_tile_partial(a_row, w_col, n, kt, kw);
                    out.at(i, nt + j) = checked_add(out.at(i, nt + j), partial, "gemm_mixed");
                }
            }
        }
    }
    return out;
}

AccessStats simulate_dataflow(uint32_t m, uint32_t k, uint32_t n,
                              StationaryMode mode, const ArrayGeometry& geom,
                              double low_ratio) {
    if (low_ratio < 0.0 || low_ratio > 1.0)
        throw std::invalid_argument("simulate_dataflow: low_ratio outside [0, 1]");
    AccessStats st;
    if (m == 0 || k == 0 || n == 0) return st;

    const uint32_t tr = geom.pe_rows;
    const uint32_t tc = geom.pe_cols;
    const uint64_t tile_elems = uint64_t(tr) * tc;
    const uint64_t low_rows = static_cast<uint64_t>(std::llround(low_ratio * m));

    // Row r is low-precision iff r < low_rows. PE slots per row and k-extent:
    auto row_slots = [&](uint64_t row, uint64_t kw) {
        return row < low_rows ? (kw + 1) / 2 : kw;
    };

    if (mode == StationaryMode::WeightStationary) {
        for (uint32_t n0 = 0; n0 < n; n0 += tc) {
            const uint64_t nw = std::min<uint64_t>(tc, n - n0);
            for (uint32_t k0 = 0; k0 < k; k0 += tr) {
                const uint64_t kw = std::min<uint64_t>(tr, k - k0);
                const bool last_ktile = k0 + tr >= k;
                st.wmem_writes += tile_elems;           // full padded tile
                st.wmem_reads += tile_elems;            // into PE registers
                st.gmem_reads += kw * nw;               // real weight elements
                for (uint64_t row = 0; row < m; ++row) {
                    st.gmem_reads += kw;
                    st.imem_writes += kw;
                    st.imem_reads += kw;                // broadcast across nw columns
                    st.mac_count += kw * nw;
                    st.mac_cycles += row_slots(row, kw) * nw;
                    st.mac_padding += (tile_elems - kw * nw);
                    st.omem_writes += nw;
                    if (k0 > 0) st.omem_reads += nw;    // accumulate partials
                    if (last_ktile) st.gmem_writes += nw;
                }
            }
        }
    } else {
        for (uint32_t m0 = 0; m0 < m; m0 += tr) {
            const uint64_t mw = std::min<uint64_t>(tr, m - m0);
            for (uint32_t k0 = 0; k0 < k; k0 += tc) {
                const uint64_t kw = std::min<uint64_t>(tc, k - k0);
                const bool last_ktile = k0 + tc >= k;
                st.imem_writes += tile_elems;
                st.imem_reads += tile_elems;
                st.gmem_reads += mw * kw;               // real input elements
                for (uint64_t col = 0; col < n; ++col) {
                    st.gmem_reads += kw;
                    st.wmem_writes += kw;
                    st.wmem_reads += kw;
                    uint64_t slots = 0;
                    for (uint64_t row = m0; row < m0 + mw; ++row)
                        slots += row_slots(row, kw);
                    st.mac_count += mw * kw;
                    st.mac_cycles += slots;
                    st.mac_padding += (tile_elems - mw * kw);
                    st.omem_writes += mw;
                    if (k0 > 0) st.omem_reads += mw;
                    if (last_ktile) st.gmem_writes += mw;
                }
            }
        }
    }
    return st;
}

std::pair<Mat32, AccessStats> csr_skip_av(const pssa::CompressedSAS& c, const QTensor& v) {
    v.validate();
    if (v.shape.size() != 2)
        throw std::invalid_argument("csr_skip_av: v must be 2-D");
    if (v.rows() != c.cols)
        throw std::invalid_argument("csr_skip_av: SAS cols must equal v rows");

    pssa::PrunedSAS pruned = pssa::decode(c);
    const uint32_t rows = pruned.rows;
    const uint32_t cols = pruned.cols;
    const uint32_t d = v.cols();

    Mat32 out(rows, d);
    AccessStats st;
    size_t vi = 0;
    for (uint32_t r = 0; r < rows; ++r) {
        for (uint32_t j = 0; j < cols; ++j) {
            if (!pruned.bitmap.get(r, j)) continue;
            const int64_t s = pruned.values[vi++];
            for (uint32_t t = 0; t < d; ++t)
                out.at(r, t) = checked_add(out.at(r, t), s * v.at(j, t), "csr_skip_av");
            st.imem_reads += d;   // one V row slice per surviving score
            st.gmem_reads += 1;   // the score itself
        }
    }
    const uint64_t nnz = pruned.bitmap.popcount();
    st.mac_count = nnz * d;
    st.mac_cycles = nnz * d;
    st.mac_skipped = (uint64_t(rows) * cols - nnz) * d;
    st.omem_writes = uint64_t(rows) * d;
    return {std::move(out), st};
}

Mat32 aggregate_partials(std::span<const Mat32> partials) {
    if (partials.empty())
        throw std::invalid_argument("aggregate_partials: no partials");
    const Mat32& first = partials.front();
    Mat32 out(first.rows, first.cols);
    for (const Mat32& p : partials) {
        if (p.rows != first.rows || p.cols != first.cols)
            throw std::invalid_argument("aggregate_partials: shape mismatch");
        for (size_t i = 0; i < out.data.size(); ++i)
            out.data[i] = checked_add(out.data[i], p.data[i], "aggregate_partials");
    }
    return out;
}

} // namespace sdaccel::dbsc
