#include "doctest.h"

#include <limits>
#include <vector>

#include "oracles.hpp"
#include "sdaccel/dbsc.hpp"
#include "sdaccel/rng.hpp"
#include "sdaccel/synth.hpp"

using namespace sdaccel;
using namespace sdaccel::dbsc;

namespace {

QTensor u12_tensor(uint32_t rows, uint32_t cols, Rng& rng) {
    QTensor t{{rows, cols}, std::vector<int32_t>(size_t(rows) * cols), IntFormat::u12(), 1.0};
    for (auto& v : t.data) v = int32_t(rng.next_below(4096));
    return t;
}

QTensor s8_tensor(uint32_t rows, uint32_t cols, Rng& rng) {
    QTensor t{{rows, cols}, std::vector<int32_t>(size_t(rows) * cols), IntFormat::s8(), 1.0};
    for (auto& v : t.data) v = int32_t(rng.next_below(256)) - 128;
    return t;
}

} // namespace

TEST_SUITE("dbsc") {

TEST_CASE("geometry defaults") {
    ArrayGeometry g;
    CHECK(g.pe_rows == 16);
    CHECK(g.pe_cols == 16);
    CHECK(g.clusters == 4);
    CHECK(g.cores_per_cluster == 4);
    CHECK(g.imem_bytes == 6144);
    CHECK(g.wmem_bytes == 2304);
    CHECK(g.omem_bytes == 12288);
    CHECK(g.gmem_bytes == 196608);
}

TEST_CASE("bspe_mac basics") {
    CHECK(bspe_mac(0, -77, 123456) == 123456);
    CHECK(bspe_mac(63, -128, 0) == -8064);
    CHECK(bspe_mac(-64, -128, 0) == 8192);

    Rng rng(41);
    for (int it = 0; it < 2000; ++it) {
        int s = int(rng.next_below(128)) - 64;
        int w = int(rng.next_below(256)) - 128;
        int32_t acc = int32_t(rng.next_below(1 << 20)) - (1 << 19);
        CHECK(bspe_mac(s, w, acc) == acc + int64_t(s) * w);
    }

    CHECK_THROWS_AS(bspe_mac(64, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(bspe_mac(-65, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(bspe_mac(0, 128, 0), std::invalid_argument);
    CHECK_THROWS_AS(bspe_mac(63, 127, std::numeric_limits<int32_t>::max()),
                    std::overflow_error);
}

TEST_CASE("pe_column_combine") {
    CHECK(pe_column_combine(10, 5, true) == 645);
    CHECK(pe_column_combine(10, 5, false) == 15);
    CHECK(pe_column_combine(0, 42, true) == 42);
    CHECK(pe_column_combine(0, 42, false) == 42);
    CHECK_THROWS_AS(pe_column_combine(1 << 26, 0, true), std::overflow_error);
}

TEST_CASE("sliced multiply with shift-combine equals direct product (sampled)") {
    Rng rng(42);
    for (int it = 0; it < 4096; ++it) {
        int x = int(rng.next_below(4096));
        int w = int(rng.next_below(256)) - 128;
        SlicePair s = bit_slice_u12(x);
        int32_t hi = bspe_mac(s.hi, w, 0);
        int32_t lo = bspe_mac(s.lo, w, 0);
        CHECK(pe_column_combine(hi, lo, true) == x * w);
    }
}

TEST_CASE("gemm_high identity weights") {
    Rng rng(43);
    QTensor a = u12_tensor(5, 8, rng);
    QTensor w{{8, 8}, std::vector<int32_t>(64, 0), IntFormat::s8(), 1.0};
    for (uint32_t i = 0; i < 8; ++i) w.at(i, i) = 1;
    Mat32 out = gemm_high(a, w);
    for (uint32_t r = 0; r < 5; ++r)
        for (uint32_t c = 0; c < 8; ++c) CHECK(out.at(r, c) == a.at(r, c));
}

TEST_CASE("gemm_high single element") {
    QTensor a{{1, 1}, {4095}, IntFormat::u12(), 1.0};
    QTensor w{{1, 1}, {-128}, IntFormat::s8(), 1.0};
    CHECK(gemm_high(a, w).at(0, 0) == -524160);
}

TEST_CASE("gemm_high equals the wide-integer reference") {
    Rng rng(44);
    // includes the non-multiple-of-16 case from the contract
    const std::vector<std::array<uint32_t, 3>> shapes = {
        {33, 20, 17}, {16, 16, 16}, {1, 1, 5}, {7, 48, 3}, {40, 33, 64}};
    for (auto [m, k, n] : shapes) {
        QTensor a = u12_tensor(m, k, rng);
        QTensor w = s8_tensor(k, n, rng);
        Mat32 got = gemm_high(a, w);
        auto want = oracle::gemm_ref(a.data, w.data, m, k, n);
        for (size_t i = 0; i < want.size(); ++i) CHECK(got.data[i] == want[i]);
    }
}

TEST_CASE("gemm_high rejects bad inputs") {
    Rng rng(45);
    QTensor a = u12_tensor(4, 4, rng);
    QTensor w = s8_tensor(5, 4, rng);
    CHECK_THROWS_AS(gemm_high(a, w), std::invalid_argument);
    QTensor a8 = s8_tensor(4, 4, rng);
    QTensor w4 = s8_tensor(4, 4, rng);
    CHECK_THROWS_AS(gemm_high(a8, w4), std::invalid_argument);
}

TEST_CASE("gemm_mixed matches per-row references") {
    Rng rng(46);
    const uint32_t m = 9, k = 20, n = 13;
    QTensor w = s8_tensor(k, n, rng);

    tips::MixedTensor a;
    a.rows = m;
    a.cols = k;
    a.data.resize(size_t(m) * k);
    a.row_high.resize(m);
    for (uint32_t r = 0; r < m; ++r) {
        a.row_high[r] = rng.bernoulli(0.5) ? 1 : 0;
        for (uint32_t c = 0; c < k; ++c)
            a.data[size_t(r) * k + c] =
                int32_t(rng.next_below(a.row_high[r] ? 4096 : 64));
    }

    Mat32 got = gemm_mixed(a, w);
    auto want = oracle::gemm_ref(a.data, w.data, m, k, n);
    for (size_t i = 0; i < want.size(); ++i) CHECK(got.data[i] == want[i]);

    SUBCASE("all-high tags equal gemm_high") {
        tips::MixedTensor hi = a;
        std::fill(hi.row_high.begin(), hi.row_high.end(), uint8_t(1));
        for (auto& v : hi.data) v = int32_t(rng.next_below(4096));
        QTensor dense{{m, k}, hi.data, IntFormat::u12(), 1.0};
        CHECK(gemm_mixed(hi, w) == gemm_high(dense, w));
    }
    SUBCASE("all-low tags equal the direct 6-bit product") {
        tips::MixedTensor lo = a;
        std::fill(lo.row_high.begin(), lo.row_high.end(), uint8_t(0));
        for (auto& v : lo.data) v = int32_t(rng.next_below(64));
        Mat32 out = gemm_mixed(lo, w);
        auto ref = oracle::gemm_ref(lo.data, w.data, m, k, n);
        for (size_t i = 0; i < ref.size(); ++i) CHECK(out.data[i] == ref[i]);
    }
    SUBCASE("tag and range validation") {
        tips::MixedTensor bad = a;
        bad.row_high.pop_back();
        CHECK_THROWS_AS(gemm_mixed(bad, w), std::invalid_argument);
        tips::MixedTensor oor = a;
        std::fill(oor.row_high.begin(), oor.row_high.end(), uint8_t(0));
        oor.data[0] = 64;  // outside U6
        CHECK_THROWS_AS(gemm_mixed(oor, w), std::invalid_argument);
    }
}

TEST_CASE("simulate_dataflow worked examples") {
    AccessStats ws = simulate_dataflow(16, 16, 16, StationaryMode::WeightStationary);
    CHECK(ws.wmem_writes == 256);
    CHECK(ws.mac_count == 4096);
    AccessStats is = simulate_dataflow(16, 16, 16, StationaryMode::InputStationary);
    CHECK(is.wmem_writes == 256);
    CHECK(is.mac_count == 4096);

    AccessStats big = simulate_dataflow(1024, 16, 16, StationaryMode::WeightStationary);
    CHECK(big.wmem_writes == 256);  // single weight tile, written once
    CHECK(big.imem_reads == 1024 * 16);

    AccessStats zero = simulate_dataflow(0, 16, 16, StationaryMode::WeightStationary);
    CHECK(zero == AccessStats{});
}

TEST_CASE("simulate_dataflow matches the closed-form oracle") {
    Rng rng(47);
    for (auto mode : {StationaryMode::WeightStationary, StationaryMode::InputStationary}) {
        for (int it = 0; it < 20; ++it) {
            uint32_t m = 1 + rng.next_below(100);
            uint32_t k = 1 + rng.next_below(100);
            uint32_t n = 1 + rng.next_below(100);
            double ratio = rng.next_double();
            AccessStats got = simulate_dataflow(m, k, n, mode, {}, ratio);
            AccessStats want = oracle::dataflow_ref(m, k, n, mode, ratio);
            CHECK(got == want);
        }
    }
}

TEST_CASE("all-low workload halves the MAC cycles") {
    for (auto mode : {StationaryMode::WeightStationary, StationaryMode::InputStationary}) {
        AccessStats hi = simulate_dataflow(40, 64, 24, mode, {}, 0.0);
        AccessStats lo = simulate_dataflow(40, 64, 24, mode, {}, 1.0);
        CHECK(lo.mac_cycles * 2 == hi.mac_cycles);
        CHECK(lo.mac_count == hi.mac_count);  // logical MACs unchanged
    }
}

TEST_CASE("access conservation") {
    Rng rng(48);
    for (int it = 0; it < 10; ++it) {
        uint32_t m = 1 + rng.next_below(64);
        uint32_t k = 1 + rng.next_below(64);
        uint32_t n = 1 + rng.next_below(64);
        AccessStats ws = simulate_dataflow(m, k, n, StationaryMode::WeightStationary);
        // each imem read feeds at most pe_cols MACs
        CHECK(ws.imem_reads * 16 >= ws.mac_count);
        AccessStats is = simulate_dataflow(m, k, n, StationaryMode::InputStationary);
        // each pinned input element is reused across the streamed N columns
        CHECK(is.imem_reads * n >= is.mac_count);
        CHECK(ws.mac_count == uint64_t(m) * k * n);
        CHECK(is.mac_count == uint64_t(m) * k * n);
    }
}

TEST_CASE("csr_skip_av empty and dense streams") {
    using namespace sdaccel::pssa;
    Rng rng(49);

    QTensor zeros{{16, 16}, std::vector<int32_t>(256, 0), IntFormat::u12(), 1.0};
    CompressedSAS empty = encode(zeros, 0, PatchMode(16));
    QTensor v = s8_tensor(16, 5, rng);
    auto [zout, zstats] = csr_skip_av(empty, v);
    CHECK(zstats.mac_count == 0);
    CHECK(zstats.mac_skipped == 256 * 5);
    for (int32_t x : zout.data) CHECK(x == 0);

    QTensor dense{{16, 16}, std::vector<int32_t>(256), IntFormat::u12(), 1.0};
    for (auto& x : dense.data) x = int32_t(1 + rng.next_below(4095));
    CompressedSAS full = encode(dense, 0, PatchMode(16));
    auto [fout, fstats] = csr_skip_av(full, v);
    CHECK(fstats.mac_skipped == 0);
    CHECK(fstats.mac_count == 256 * 5);
    auto want = oracle::gemm_ref(dense.data, v.data, 16, 16, 5);
    for (size_t i = 0; i < want.size(); ++i) CHECK(fout.data[i] == want[i]);
}

TEST_CASE("csr_skip_av equals the dense product of the decoded SAS") {
    using namespace sdaccel::pssa;
    Rng rng(50);
    for (int it = 0; it < 5; ++it) {
        synth::SynthSpec spec;
        spec.rows = 64;
        spec.cols = 64;
        spec.mode = PatchMode(32);
        spec.target_sparsity = 0.7;
        spec.adjacent_flip_rate = 0.1;
        spec.seed = 500 + uint64_t(it);
        QTensor sas = synth::synth_sas(spec);
        CompressedSAS c = encode(sas, 0, spec.mode);
        QTensor v = s8_tensor(64, 9, rng);

        auto [got, stats] = csr_skip_av(c, v);

        PrunedSAS pruned = pssa::decode(c);
        std::vector<int32_t> densified(size_t(64) * 64, 0);
        size_t vi = 0;
        for (uint32_t r = 0; r < 64; ++r)
            for (uint32_t j = 0; j < 64; ++j)
                if (pruned.bitmap.get(r, j)) densified[size_t(r) * 64 + j] = pruned.values[vi++];
        auto want = oracle::gemm_ref(densified, v.data, 64, 64, 9);
        for (size_t i = 0; i < want.size(); ++i) CHECK(got.data[i] == want[i]);

        uint64_t nnz = pruned.bitmap.popcount();
        CHECK(stats.mac_count == nnz * 9);
        CHECK(stats.mac_skipped == (uint64_t(64) * 64 - nnz) * 9);
    }
}

TEST_CASE("csr_skip_av result does not depend on the encode-time patch mode") {
    using namespace sdaccel::pssa;
    Rng rng(51);
    synth::SynthSpec spec;
    spec.rows = 64;
    spec.cols = 64;
    spec.mode = PatchMode(64);
    spec.target_sparsity = 0.5;
    spec.adjacent_flip_rate = 0.3;
    spec.seed = 321;
    QTensor sas = synth::synth_sas(spec);
    QTensor v = s8_tensor(64, 7, rng);

    Mat32 first;
    bool have = false;
    for (uint32_t size : {16u, 32u, 64u}) {
        auto [out, stats] = csr_skip_av(encode(sas, 0, PatchMode(size)), v);
        if (!have) {
            first = out;
            have = true;
        } else {
            CHECK(out == first);
        }
    }
}

TEST_CASE("csr_skip_av dimension mismatch") {
    using namespace sdaccel::pssa;
    Rng rng(52);
    QTensor sas{{16, 16}, std::vector<int32_t>(256, 1), IntFormat::u12(), 1.0};
    CompressedSAS c = encode(sas, 0, PatchMode(16));
    QTensor v = s8_tensor(8, 3, rng);
    CHECK_THROWS_AS(csr_skip_av(c, v), std::invalid_argument);
}

TEST_CASE("aggregate_partials") {
    std::vector<Mat32> zeros(4, Mat32(3, 3));
    Mat32 out = aggregate_partials(zeros);
    for (int32_t v : out.data) CHECK(v == 0);

    Rng rng(53);
    std::vector<Mat32> parts(4, Mat32(4, 6));
    for (auto& p : parts)
        for (auto& v : p.data) v = int32_t(rng.next_below(1000)) - 500;

    Mat32 sum = aggregate_partials(parts);
    for (size_t i = 0; i < sum.data.size(); ++i) {
        int64_t want = 0;
        for (const auto& p : parts) want += p.data[i];
        CHECK(sum.data[i] == want);
    }

    std::vector<Mat32> single{parts[2]};
    CHECK(aggregate_partials(single) == parts[2]);

    std::vector<Mat32> bad{Mat32(2, 2), Mat32(2, 3)};
    CHECK_THROWS_AS(aggregate_partials(bad), std::invalid_argument);
    CHECK_THROWS_AS(aggregate_partials(std::vector<Mat32>{}), std::invalid_argument);
}

} // TEST_SUITE
