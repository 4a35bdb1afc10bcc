#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>
#include <utility>
#include <vector>

#include "sdaccel/io.hpp"
#include "sdaccel/pssa.hpp"
#include "sdaccel/rng.hpp"
#include "sdaccel/synth.hpp"

using namespace sdaccel;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("sdaccel_test_" + std::to_string(Rng(uint64_t(::getpid())).next_u64() % 1000000));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const char* name) const { return (path / name).string(); }
};

} // namespace

TEST_SUITE("synth") {

TEST_CASE("same seed reproduces the tensor") {
    synth::SynthSpec spec;
    spec.rows = 64;
    spec.cols = 128;
    spec.mode = pssa::PatchMode(32);
    spec.target_sparsity = 0.6;
    spec.adjacent_flip_rate = 0.2;
    spec.seed = 42;
    QTensor a = synth::synth_sas(spec);
    QTensor b = synth::synth_sas(spec);
    CHECK(a.data == b.data);
    spec.seed = 43;
    CHECK(synth::synth_sas(spec).data != a.data);
}

TEST_CASE("zero flip rate copies patches across each band") {
    synth::SynthSpec spec;
    spec.rows = 32;
    spec.cols = 128;
    spec.mode = pssa::PatchMode(32);
    spec.target_sparsity = 0.5;
    spec.adjacent_flip_rate = 0.0;
    spec.seed = 7;
    QTensor sas = synth::synth_sas(spec);
    pssa::PrunedSAS pruned = pssa::prune_sas(sas, 0);
    BitMatrix diff = pssa::xor_augment(pruned.bitmap, spec.mode);
    // all non-leading patches cancel entirely
    uint64_t first_patch = diff.sub(0, 0, 32, 32).popcount();
    CHECK(diff.popcount() == first_patch);
}

TEST_CASE("flip rate 0.5 makes diff patches half dense (3 sigma)") {
    synth::SynthSpec spec;
    spec.rows = 64;
    spec.cols = 256;
    spec.mode = pssa::PatchMode(64);
    spec.target_sparsity = 0.5;
    spec.adjacent_flip_rate = 0.5;
    spec.seed = 11;
    QTensor sas = synth::synth_sas(spec);
    pssa::PrunedSAS pruned = pssa::prune_sas(sas, 0);
    BitMatrix diff = pssa::xor_augment(pruned.bitmap, spec.mode);
    uint64_t diff_bits = diff.popcount() - diff.sub(0, 0, 64, 64).popcount();
    double n = 3.0 * 64 * 64;  // three diff patches
    double sigma = std::sqrt(n * 0.25);
    CHECK(std::abs(double(diff_bits) - 0.5 * n) <= 3.0 * sigma);
}

TEST_CASE("sparsity target is honored (3 sigma)") {
    synth::SynthSpec spec;
    spec.rows = 64;
    spec.cols = 64;
    spec.mode = pssa::PatchMode(64);
    spec.target_sparsity = 0.7;
    spec.seed = 13;
    QTensor sas = synth::synth_sas(spec);
    uint64_t nnz = pssa::prune_sas(sas, 0).bitmap.popcount();
    double n = 64.0 * 64.0;
    double sigma = std::sqrt(n * 0.3 * 0.7);
    CHECK(std::abs(double(nnz) - 0.3 * n) <= 3.0 * sigma);
}

TEST_CASE("values respect the threshold split") {
    synth::SynthSpec spec;
    spec.rows = 32;
    spec.cols = 32;
    spec.mode = pssa::PatchMode(16);
    spec.target_sparsity = 0.4;
    spec.threshold = 600;
    spec.seed = 17;
    QTensor sas = synth::synth_sas(spec);
    pssa::PrunedSAS pruned = pssa::prune_sas(sas, 600);
    for (uint32_t r = 0; r < 32; ++r)
        for (uint32_t c = 0; c < 32; ++c) {
            if (pruned.bitmap.get(r, c))
                CHECK(sas.at(r, c) > 600);
            else
                CHECK(sas.at(r, c) <= 600);
        }

    synth::SynthSpec bad = spec;
    bad.threshold = 4095;
    CHECK_THROWS_AS(synth::synth_sas(bad), std::invalid_argument);
    bad = spec;
    bad.cols = 40;
    CHECK_THROWS_AS(synth::synth_sas(bad), std::invalid_argument);
}

} // TEST_SUITE

TEST_SUITE("io") {

TEST_CASE("bit writer/reader round trip") {
    Rng rng(61);
    for (int it = 0; it < 50; ++it) {
        io::BitWriter bw;
        std::vector<std::pair<uint64_t, uint32_t>> fields;
        for (int i = 0; i < 200; ++i) {
            uint32_t bits = 1 + rng.next_below(33);
            uint64_t value = rng.next_u64() & ((uint64_t(1) << bits) - 1);
            fields.emplace_back(value, bits);
            bw.put(value, bits);
        }
        std::vector<uint8_t> bytes = bw.finish();
        io::BitReader br(bytes);
        for (auto [value, bits] : fields) CHECK(br.get(bits) == value);
    }
}

TEST_CASE("bit reader rejects reads past the end") {
    io::BitWriter bw;
    bw.put(0x5, 3);
    std::vector<uint8_t> bytes = bw.finish();
    io::BitReader br(bytes);
    CHECK(br.get(3) == 0x5);
    CHECK_THROWS_AS(br.get(8), std::runtime_error);
}

TEST_CASE("QTF1 round trip") {
    TempDir dir;
    Rng rng(62);
    QTensor t{{3, 5}, std::vector<int32_t>(15), IntFormat::s8(), 0.03125};
    for (auto& v : t.data) v = int32_t(rng.next_below(256)) - 128;
    io::save_qtf(dir.file("t.qtf"), t);
    QTensor back = io::load_qtf(dir.file("t.qtf"));
    CHECK(back.shape == t.shape);
    CHECK(back.data == t.data);
    CHECK(back.format == t.format);
    CHECK(back.scale == t.scale);
}

TEST_CASE("QTF1 rejects corrupt files") {
    TempDir dir;
    QTensor t{{2, 2}, {1, 2, 3, 4}, IntFormat::u12(), 1.0};
    io::save_qtf(dir.file("t.qtf"), t);

    SUBCASE("bad magic") {
        auto path = dir.file("bad.qtf");
        std::filesystem::copy_file(dir.file("t.qtf"), path);
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(0);
        f.put('X');
        f.close();
        CHECK_THROWS_AS(io::load_qtf(path), std::runtime_error);
    }
    SUBCASE("truncated") {
        auto bytes = [&] {
            std::ifstream in(dir.file("t.qtf"), std::ios::binary);
            return std::vector<char>(std::istreambuf_iterator<char>(in),
                                     std::istreambuf_iterator<char>());
        }();
        std::ofstream out(dir.file("trunc.qtf"), std::ios::binary);
        out.write(bytes.data(), std::streamsize(bytes.size() - 3));
        out.close();
        CHECK_THROWS_AS(io::load_qtf(dir.file("trunc.qtf")), std::runtime_error);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(io::load_qtf(dir.file("nope.qtf")), std::runtime_error);
    }
}

TEST_CASE("PSSA1 round trip preserves the decoded stream") {
    TempDir dir;
    for (uint32_t size : {16u, 32u, 64u}) {
        synth::SynthSpec spec;
        spec.rows = size * 2;
        spec.cols = size * 2;
        spec.mode = pssa::PatchMode(size);
        spec.target_sparsity = 0.6;
        spec.adjacent_flip_rate = 0.15;
        spec.seed = 100 + size;
        QTensor sas = synth::synth_sas(spec);
        pssa::CompressedSAS c = pssa::encode(sas, 0, spec.mode);

        io::save_pssa(dir.file("c.pssa1"), c);
        pssa::CompressedSAS back = io::load_pssa(dir.file("c.pssa1"));
        CHECK(back.rows == c.rows);
        CHECK(back.cols == c.cols);
        CHECK(back.threshold == c.threshold);
        CHECK(back.values == c.values);
        REQUIRE(back.patches.size() == c.patches.size());
        for (size_t i = 0; i < c.patches.size(); ++i) {
            CHECK(back.patches[i].row_ptr == c.patches[i].row_ptr);
            CHECK(back.patches[i].col_idx == c.patches[i].col_idx);
        }

        pssa::PrunedSAS a = pssa::decode(c);
        pssa::PrunedSAS b = pssa::decode(back);
        CHECK(a.bitmap == b.bitmap);
        CHECK(a.values == b.values);
    }
}

TEST_CASE("PSSA1 in-memory bytes equal the file contents") {
    TempDir dir;
    QTensor sas{{16, 16}, std::vector<int32_t>(256, 9), IntFormat::u12(), 1.0};
    pssa::CompressedSAS c = pssa::encode(sas, 3, pssa::PatchMode(16));
    io::save_pssa(dir.file("c.pssa1"), c);
    std::ifstream in(dir.file("c.pssa1"), std::ios::binary);
    std::vector<uint8_t> from_file((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    CHECK(io::pssa_to_bytes(c) == from_file);
}

TEST_CASE("tampered PSSA1 row_ptr fails to decode") {
    synth::SynthSpec spec;
    spec.rows = 16;
    spec.cols = 16;
    spec.mode = pssa::PatchMode(16);
    spec.target_sparsity = 0.3;
    spec.seed = 5;
    QTensor sas = synth::synth_sas(spec);
    pssa::CompressedSAS c = pssa::encode(sas, 0, spec.mode);
    REQUIRE(c.patches[0].row_ptr[2] >= 1);

    std::vector<uint8_t> bytes = io::pssa_to_bytes(c);
    // header is 17 bytes; row_ptr[0] and [1] live in the first payload bytes.
    // Force row_ptr[1] high so the sequence decreases afterwards.
    bytes[18] = 0xff;
    bytes[19] = 0xff;
    pssa::CompressedSAS bad = io::pssa_from_bytes(bytes);
    CHECK_THROWS_AS(pssa::decode(bad), std::runtime_error);
}

TEST_CASE("MASK1 round trip") {
    TempDir dir;
    Rng rng(63);
    tips::SpotMask mask;
    mask.important.resize(77);
    for (auto& b : mask.important) b = rng.bernoulli(0.4) ? 1 : 0;
    io::save_mask(dir.file("m.mask1"), mask);
    tips::SpotMask back = io::load_mask(dir.file("m.mask1"));
    CHECK(back.important == mask.important);
}

} // TEST_SUITE
