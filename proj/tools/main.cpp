// sdaccel - synthetic SAS generation, PSSA encode/decode, TIPS spotting,
// bit-slice GEMM and EMA/compression benchmarks.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "sdaccel/dbsc.hpp"
#include "sdaccel/ema.hpp"
#include "sdaccel/fixedpoint.hpp"
#include "sdaccel/io.hpp"
#include "sdaccel/pssa.hpp"
#include "sdaccel/synth.hpp"
#include "sdaccel/tips.hpp"

using nlohmann::json;
using namespace sdaccel;

namespace {

constexpr const char* kSchema = "sdaccel-report/1";

double round1(double pct) { return std::round(pct * 10.0) / 10.0; }

struct SchemeBits {
    uint64_t raw_bytes = 0;
    uint64_t csr_bits = 0;   // patch-local CSR without XOR
    uint64_t rle_bits = 0;
    uint64_t pssa_bits = 0;
    uint64_t nnz = 0;
};

SchemeBits scheme_bits(const QTensor& sas, int threshold, pssa::PatchMode mode,
                       int run_bits) {
    SchemeBits out;
    pssa::PrunedSAS pruned = pssa::prune_sas(sas, threshold);
    out.nnz = pruned.values.size();
    out.raw_bytes = (uint64_t(sas.rows()) * sas.cols() * 12 + 7) / 8;
    out.csr_bits = pssa::baseline_local_csr_bits(pruned.bitmap, mode);
    out.rle_bits = pssa::baseline_rle_bits(pruned.bitmap, run_bits);
    out.pssa_bits = pssa::index_bits(pssa::encode(sas, threshold, mode));
    return out;
}

uint64_t payload_bytes(uint64_t nnz, uint64_t idx_bits) {
    return (nnz * 12 + idx_bits + 7) / 8;
}

int cmd_synth(const synth::SynthSpec& spec, const std::string& out) {
    QTensor sas = synth::synth_sas(spec);
    io::save_qtf(out, sas);
    std::printf("wrote %s (%u x %u, sparsity target %.2f, flip rate %.2f, seed %llu)\n",
                out.c_str(), spec.rows, spec.cols, spec.target_sparsity,
                spec.adjacent_flip_rate, static_cast<unsigned long long>(spec.seed));
    return 0;
}

int cmd_encode(const std::string& in, const std::string& out, int threshold,
               uint32_t patch, bool pad, int run_bits) {
    QTensor sas = io::load_qtf(in);
    pssa::PatchMode mode(patch);
    pssa::EncodeOptions opts;
    opts.allow_padding = pad;
    pssa::CompressedSAS c = pssa::encode(sas, threshold, mode, opts);
    io::save_pssa(out, c);

    SchemeBits s = scheme_bits(sas, threshold, mode, run_bits);
    std::printf("%-6s index_bits %10llu  bytes %10llu\n", "pssa",
                static_cast<unsigned long long>(s.pssa_bits),
                static_cast<unsigned long long>(payload_bytes(s.nnz, s.pssa_bits)));
    std::printf("%-6s index_bits %10llu  bytes %10llu\n", "csr",
                static_cast<unsigned long long>(s.csr_bits),
                static_cast<unsigned long long>(payload_bytes(s.nnz, s.csr_bits)));
    std::printf("%-6s index_bits %10llu  bytes %10llu\n", "rle",
                static_cast<unsigned long long>(s.rle_bits),
                static_cast<unsigned long long>(payload_bytes(s.nnz, s.rle_bits)));
    std::printf("%-6s index_bits %10u  bytes %10llu\n", "raw", 0u,
                static_cast<unsigned long long>(s.raw_bytes));
    return 0;
}

int cmd_decode(const std::string& in, const std::string& out) {
    pssa::CompressedSAS c = io::load_pssa(in);
    pssa::PrunedSAS pruned = pssa::decode(c);
    QTensor dense{{pruned.rows, pruned.cols},
                  std::vector<int32_t>(size_t(pruned.rows) * pruned.cols, 0),
                  IntFormat::u12(),
                  1.0};
    size_t vi = 0;
    for (uint32_t r = 0; r < pruned.rows; ++r)
        for (uint32_t col = 0; col < pruned.cols; ++col)
            if (pruned.bitmap.get(r, col)) dense.at(r, col) = pruned.values[vi++];
    io::save_qtf(out, dense);
    std::printf("wrote %s (%u x %u, %zu surviving values)\n", out.c_str(), pruned.rows,
                pruned.cols, pruned.values.size());
    return 0;
}

bool verify_pair(const QTensor& sas, int threshold, pssa::PatchMode mode) {
    pssa::PrunedSAS want = pssa::prune_sas(sas, threshold);
    pssa::CompressedSAS c = pssa::encode(sas, threshold, mode);
    // round-trip through the wire format as well
    pssa::CompressedSAS wire = io::pssa_from_bytes(io::pssa_to_bytes(c));
    pssa::PrunedSAS got = pssa::decode(wire);
    if (!(got.bitmap == want.bitmap) || got.values != want.values) return false;

    // index accounting must match the closed form
    uint64_t bits = 0;
    for (const auto& p : wire.patches)
        bits += p.col_idx.size() * mode.col_bits() + p.row_ptr.size() * mode.rowptr_bits();
    return bits == pssa::index_bits(wire);
}

int cmd_verify(const std::string& input, const std::string& compressed, int threshold,
               int cases, uint64_t seed) {
    if (!input.empty()) {
        QTensor sas = io::load_qtf(input);
        pssa::CompressedSAS c = io::load_pssa(compressed);
        pssa::PrunedSAS want = pssa::prune_sas(sas, c.threshold);
        pssa::PrunedSAS got = pssa::decode(c);
        if (!(got.bitmap == want.bitmap) || got.values != want.values) {
            std::fprintf(stderr, "verify: decoded stream does not match prune(%s)\n",
                         input.c_str());
            return 1;
        }
        std::printf("verify OK: %s matches prune of %s (%zu values)\n", compressed.c_str(),
                    input.c_str(), got.values.size());
        return 0;
    }

    const uint32_t sizes[] = {16, 32, 64};
    const double sparsities[] = {0.3, 0.5, 0.7, 0.9};
    const double flips[] = {0.0, 0.1, 0.3, 0.5};
    int failed = 0;
    for (int i = 0; i < cases; ++i) {
        synth::SynthSpec spec;
        spec.mode = pssa::PatchMode(sizes[size_t(i) % 3]);
        spec.rows = spec.mode.size * 2;
        spec.cols = spec.mode.size * 2;
        spec.target_sparsity = sparsities[(size_t(i) / 3) % 4];
        spec.adjacent_flip_rate = flips[(size_t(i) / 12) % 4];
        spec.threshold = static_cast<uint16_t>(threshold);
        spec.seed = seed + uint64_t(i);
        QTensor sas = synth::synth_sas(spec);
        if (!verify_pair(sas, threshold, spec.mode)) {
            std::fprintf(stderr, "verify: case %d failed (seed %llu)\n", i,
                         static_cast<unsigned long long>(spec.seed));
            ++failed;
        }
    }
    if (failed) {
        std::fprintf(stderr, "verify: %d of %d cases failed\n", failed, cases);
        return 1;
    }
    std::printf("verify OK: %d cases round-tripped losslessly\n", cases);
    return 0;
}

int cmd_tips(const std::string& query, const std::string& key, double delta,
             bool has_abs, double abs_threshold, bool no_scaling,
             const std::string& out) {
    QTensor q = io::load_qtf(query);
    QTensor k = io::load_qtf(key);
    tips::AttentionScores s = tips::cross_attention_probs(q, k, !no_scaling);
    std::vector<double> cas = tips::extract_cas(s);
    tips::SpotMask mask =
        has_abs ? tips::spot_abs(cas, abs_threshold) : tips::spot(cas, delta);
    if (!out.empty()) io::save_mask(out, mask);

    tips::PrecisionPlan plan = tips::build_precision_plan(mask, 0);
    std::printf("pixels %u  spotted %llu  min_cas %.6g  low_precision_ratio %.4f\n",
                s.n_pixels, static_cast<unsigned long long>(mask.count()),
                tips::min_cas(cas), tips::low_precision_ratio(plan));
    return 0;
}

int cmd_gemm(const std::string& a_path, const std::string& w_path,
             const std::string& mode_str, double low_ratio, const std::string& out) {
    QTensor a = io::load_qtf(a_path);
    QTensor w = io::load_qtf(w_path);
    dbsc::StationaryMode mode = mode_str == "is" ? dbsc::StationaryMode::InputStationary
                                                 : dbsc::StationaryMode::WeightStationary;
    dbsc::Mat32 result = dbsc::gemm_high(a, w);
    dbsc::AccessStats stats =
        dbsc::simulate_dataflow(a.rows(), a.cols(), w.cols(), mode, {}, low_ratio);

    if (!out.empty()) {
        QTensor rt{{result.rows, result.cols}, result.data, IntFormat::s32(),
                   a.scale * w.scale};
        io::save_qtf(out, rt);
    }

    json j;
    j["schema"] = kSchema;
    j["kind"] = "gemm";
    j["m"] = a.rows();
    j["k"] = a.cols();
    j["n"] = w.cols();
    j["mode"] = mode_str;
    j["stats"] = {{"imem_reads", stats.imem_reads},   {"imem_writes", stats.imem_writes},
                  {"wmem_reads", stats.wmem_reads},   {"wmem_writes", stats.wmem_writes},
                  {"omem_reads", stats.omem_reads},   {"omem_writes", stats.omem_writes},
                  {"gmem_reads", stats.gmem_reads},   {"gmem_writes", stats.gmem_writes},
                  {"mac_count", stats.mac_count},     {"mac_cycles", stats.mac_cycles},
                  {"mac_padding", stats.mac_padding}, {"mac_skipped", stats.mac_skipped}};
    std::cout << j.dump(2) << "\n";
    return 0;
}

struct BenchRow {
    double flip_rate;
    double sparsity;
    uint32_t patch_mode;
    uint64_t raw_bytes;
    uint64_t csr_bits;
    uint64_t rle_bits;
    uint64_t pssa_bits;
    double reduction_vs_csr_pct;
};

int cmd_bench(uint32_t rows, uint32_t cols, uint32_t patch, int threshold,
              uint64_t seed, int run_bits, std::vector<double> flips,
              std::vector<double> sparsities, const std::string& format,
              const std::string& out) {
    pssa::PatchMode mode(patch);
    std::sort(flips.begin(), flips.end());
    std::sort(sparsities.begin(), sparsities.end());

    std::vector<BenchRow> rows_out;
    uint64_t case_seed = seed;
    for (double flip : flips) {
        for (double sparsity : sparsities) {
            synth::SynthSpec spec;
            spec.rows = rows;
            spec.cols = cols;
            spec.mode = mode;
            spec.target_sparsity = sparsity;
            spec.adjacent_flip_rate = flip;
            spec.threshold = static_cast<uint16_t>(threshold);
            spec.seed = case_seed++;
            QTensor sas = synth::synth_sas(spec);
            SchemeBits s = scheme_bits(sas, threshold, mode, run_bits);
            BenchRow row;
            row.flip_rate = flip;
            row.sparsity = sparsity;
            row.patch_mode = patch;
            row.raw_bytes = s.raw_bytes;
            row.csr_bits = s.csr_bits;
            row.rle_bits = s.rle_bits;
            row.pssa_bits = s.pssa_bits;
            row.reduction_vs_csr_pct =
                s.csr_bits ? round1(100.0 * (1.0 - double(s.pssa_bits) / double(s.csr_bits)))
                           : 0.0;
            rows_out.push_back(row);
        }
    }

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out.empty()) {
        file.open(out);
        if (!file) throw std::runtime_error("cannot open " + out + " for writing");
        os = &file;
    }

    if (format == "csv") {
        *os << "flip_rate,sparsity,patch_mode,raw_bytes,csr_bits,rle_bits,pssa_bits,"
               "reduction_vs_csr_pct\n";
        char buf[256];
        for (const BenchRow& r : rows_out) {
            std::snprintf(buf, sizeof buf, "%.3f,%.3f,%u,%llu,%llu,%llu,%llu,%.1f\n",
                          r.flip_rate, r.sparsity, r.patch_mode,
                          static_cast<unsigned long long>(r.raw_bytes),
                          static_cast<unsigned long long>(r.csr_bits),
                          static_cast<unsigned long long>(r.rle_bits),
                          static_cast<unsigned long long>(r.pssa_bits),
                          r.reduction_vs_csr_pct);
            *os << buf;
        }
    } else {
        json j;
        j["schema"] = kSchema;
        j["kind"] = "bench";
        j["rows"] = json::array();
        for (const BenchRow& r : rows_out)
            j["rows"].push_back({{"flip_rate", r.flip_rate},
                                 {"sparsity", r.sparsity},
                                 {"patch_mode", r.patch_mode},
                                 {"raw_bytes", r.raw_bytes},
                                 {"csr_bits", r.csr_bits},
                                 {"rle_bits", r.rle_bits},
                                 {"pssa_bits", r.pssa_bits},
                                 {"reduction_vs_csr_pct", r.reduction_vs_csr_pct}});
        *os << j.dump(2) << "\n";
    }
    return 0;
}

int cmd_report(const std::string& in) {
    std::ifstream f(in);
    if (!f) throw std::runtime_error("cannot open " + in);
    json j = json::parse(f);
    if (j.value("schema", "") != kSchema)
        throw std::runtime_error("unknown report schema in " + in);

    const std::string kind = j.value("kind", "");
    if (kind == "bench") {
        std::printf("%9s %9s %6s %11s %11s %11s %11s %8s\n", "flip", "sparsity", "patch",
                    "raw_bytes", "csr_bits", "rle_bits", "pssa_bits", "vs_csr%");
        for (const auto& r : j["rows"])
            std::printf("%9.3f %9.3f %6u %11llu %11llu %11llu %11llu %8.1f\n",
                        r["flip_rate"].get<double>(), r["sparsity"].get<double>(),
                        r["patch_mode"].get<uint32_t>(),
                        static_cast<unsigned long long>(r["raw_bytes"].get<uint64_t>()),
                        static_cast<unsigned long long>(r["csr_bits"].get<uint64_t>()),
                        static_cast<unsigned long long>(r["rle_bits"].get<uint64_t>()),
                        static_cast<unsigned long long>(r["pssa_bits"].get<uint64_t>()),
                        r["reduction_vs_csr_pct"].get<double>());
    } else if (kind == "gemm") {
        std::printf("gemm %llu x %llu x %llu (%s)\n",
                    static_cast<unsigned long long>(j["m"].get<uint64_t>()),
                    static_cast<unsigned long long>(j["k"].get<uint64_t>()),
                    static_cast<unsigned long long>(j["n"].get<uint64_t>()),
                    j["mode"].get<std::string>().c_str());
        for (const auto& [key, value] : j["stats"].items())
            std::printf("%-12s %llu\n", key.c_str(),
                        static_cast<unsigned long long>(value.get<uint64_t>()));
    } else if (kind == "ema") {
        std::printf("%-12s %-16s %-12s %12s %12s %12s %12s\n", "layer", "kind", "stage",
                    "weight_B", "act_B", "sas_B", "total_B");
        for (const auto& l : j["layers"])
            std::printf("%-12s %-16s %-12s %12llu %12llu %12llu %12llu\n",
                        l["name"].get<std::string>().c_str(),
                        l["kind"].get<std::string>().c_str(),
                        l["stage"].get<std::string>().c_str(),
                        static_cast<unsigned long long>(l["weight_bytes"].get<uint64_t>()),
                        static_cast<unsigned long long>(l["act_bytes"].get<uint64_t>()),
                        static_cast<unsigned long long>(l["sas_bytes"].get<uint64_t>()),
                        static_cast<unsigned long long>(l["total_bytes"].get<uint64_t>()));
        std::printf("total %llu B, transformer %.1f%%, sas %.1f%%\n",
                    static_cast<unsigned long long>(j["total_bytes"].get<uint64_t>()),
                    j["transformer_share_pct"].get<double>(),
                    j["sas_share_pct"].get<double>());
        if (j.contains("sas_schemes")) {
            const auto& s = j["sas_schemes"];
            std::printf("sas schemes: raw %llu B, csr %llu B, rle %llu B, pssa %llu B "
                        "(vs raw %.1f%%, vs csr %.1f%%, vs rle %.1f%%)\n",
                        static_cast<unsigned long long>(s["raw_bytes"].get<uint64_t>()),
                        static_cast<unsigned long long>(s["csr_bytes"].get<uint64_t>()),
                        static_cast<unsigned long long>(s["rle_bytes"].get<uint64_t>()),
                        static_cast<unsigned long long>(s["pssa_bytes"].get<uint64_t>()),
                        s["pssa_reduction_vs_raw_pct"].get<double>(),
                        s["pssa_reduction_vs_csr_pct"].get<double>(),
                        s["pssa_reduction_vs_rle_pct"].get<double>());
        }
    } else {
        throw std::runtime_error("unknown report kind '" + kind + "'");
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bit-exact SAS compression, mixed-precision and dataflow toolkit"};
    app.require_subcommand(1);

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic SAS tensor (QTF1)");
    synth::SynthSpec spec;
    uint32_t patch = 64;
    int threshold = 0;
    std::string out_path;
    synth_cmd->add_option("--rows", spec.rows, "SAS rows")->default_val(256);
    synth_cmd->add_option("--cols", spec.cols, "SAS cols")->default_val(256);
    synth_cmd->add_option("--patch", patch, "patch size")->check(CLI::IsMember({16, 32, 64}))
        ->default_val(64);
    synth_cmd->add_option("--sparsity", spec.target_sparsity, "target sparsity in [0,1]")
        ->default_val(0.7);
    synth_cmd->add_option("--flip-rate", spec.adjacent_flip_rate,
                          "adjacent-patch bit flip rate in [0,1]")->default_val(0.1);
    synth_cmd->add_option("--seed", spec.seed, "random seed")->default_val(1);
    synth_cmd->add_option("--threshold", threshold, "prune threshold the values straddle")
        ->default_val(0);
    synth_cmd->add_option("--out", out_path, "output QTF1 file")->required();

    // encode
    auto* encode_cmd = app.add_subcommand("encode", "Compress a SAS tensor (QTF1 -> PSSA1)");
    std::string in_path;
    bool pad = false;
    int run_bits = 6;
    encode_cmd->add_option("--in", in_path, "input QTF1 file")->required();
    encode_cmd->add_option("--out", out_path, "output PSSA1 file")->required();
    encode_cmd->add_option("--threshold", threshold, "prune threshold")->default_val(0);
    encode_cmd->add_option("--patch", patch, "patch size")
        ->check(CLI::IsMember({16, 32, 64}))->default_val(64);
    encode_cmd->add_flag("--pad", pad, "zero-pad non-divisible dimensions");
    encode_cmd->add_option("--run-bits", run_bits, "RLE baseline run width")->default_val(6);

    // decode
    auto* decode_cmd = app.add_subcommand("decode", "Decompress PSSA1 to a dense pruned QTF1");
    decode_cmd->add_option("--in", in_path, "input PSSA1 file")->required();
    decode_cmd->add_option("--out", out_path, "output QTF1 file")->required();

    // verify
    auto* verify_cmd =
        app.add_subcommand("verify", "Round-trip and accounting checks (exit 0/1)");
    std::string compressed_path;
    int cases = 100;
    uint64_t vseed = 1;
    verify_cmd->add_option("--input", in_path, "original QTF1 to check against");
    verify_cmd->add_option("--compressed", compressed_path, "PSSA1 stream to verify");
    verify_cmd->add_option("--threshold", threshold, "prune threshold")->default_val(0);
    verify_cmd->add_option("--cases", cases, "number of self-contained synth cases")
        ->default_val(100);
    verify_cmd->add_option("--seed", vseed, "base seed for self-contained cases")
        ->default_val(1);

    // tips
    auto* tips_cmd = app.add_subcommand("tips", "Spot important pixels from cross-attention");
    std::string query_path, key_path;
    double delta = 1.0;
    double abs_threshold = 0.0;
    bool no_scaling = false;
    tips_cmd->add_option("--query", query_path, "pixel query QTF1 (n_pixels x d)")->required();
    tips_cmd->add_option("--key", key_path, "text key QTF1 (n_text x d, CLS first)")->required();
    tips_cmd->add_option("--delta", delta, "min-relative spotting slack")->default_val(1.0);
    auto* abs_opt = tips_cmd->add_option("--abs-threshold", abs_threshold,
                                         "absolute CAS threshold (overrides --delta)");
    tips_cmd->add_flag("--no-scaling", no_scaling, "skip 1/sqrt(d) logit scaling");
    tips_cmd->add_option("--out", out_path, "output MASK1 file");

    // gemm
    auto* gemm_cmd = app.add_subcommand("gemm", "Bit-sliced GEMM with access statistics");
    std::string a_path, w_path, mode_str = "ws";
    double low_ratio = 0.0;
    gemm_cmd->add_option("a", a_path, "activation QTF1 (U12, M x K)")->required();
    gemm_cmd->add_option("w", w_path, "weight QTF1 (S8, K x N)")->required();
    gemm_cmd->add_option("--mode", mode_str, "dataflow: is|ws")
        ->check(CLI::IsMember({"is", "ws"}))->default_val("ws");
    gemm_cmd->add_option("--low-ratio", low_ratio, "fraction of low-precision rows (stats)")
        ->default_val(0.0);
    gemm_cmd->add_option("--out", out_path, "result QTF1 (S32)");

    // bench
    auto* bench_cmd =
        app.add_subcommand("bench", "Sweep flip rate x sparsity, report scheme bits");
    std::vector<double> flips{0.0, 0.1, 0.3, 0.5};
    std::vector<double> sparsities{0.3, 0.5, 0.7, 0.9};
    std::string format = "csv";
    uint32_t rows = 256, cols = 256;
    uint64_t bseed = 1;
    bench_cmd->add_option("--rows", rows, "SAS rows")->default_val(256);
    bench_cmd->add_option("--cols", cols, "SAS cols")->default_val(256);
    bench_cmd->add_option("--patch", patch, "patch size")
        ->check(CLI::IsMember({16, 32, 64}))->default_val(64);
    bench_cmd->add_option("--threshold", threshold, "prune threshold")->default_val(0);
    bench_cmd->add_option("--seed", bseed, "base seed")->default_val(1);
    bench_cmd->add_option("--run-bits", run_bits, "RLE baseline run width")->default_val(6);
    bench_cmd->add_option("--flip-rates", flips, "flip rates to sweep");
    bench_cmd->add_option("--sparsities", sparsities, "sparsities to sweep");
    bench_cmd->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))->default_val("csv");
    bench_cmd->add_option("--out", out_path, "output file (default stdout)");

    // report
    auto* report_cmd = app.add_subcommand("report", "Render a JSON report as a table");
    report_cmd->add_option("file", in_path, "JSON report (bench/gemm/ema)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth_cmd->parsed()) {
            spec.mode = pssa::PatchMode(patch);
            spec.threshold = static_cast<uint16_t>(threshold);
            return cmd_synth(spec, out_path);
        }
        if (encode_cmd->parsed())
            return cmd_encode(in_path, out_path, threshold, patch, pad, run_bits);
        if (decode_cmd->parsed()) return cmd_decode(in_path, out_path);
        if (verify_cmd->parsed())
            return cmd_verify(in_path, compressed_path, threshold, cases, vseed);
        if (tips_cmd->parsed())
            return cmd_tips(query_path, key_path, delta, abs_opt->count() > 0, abs_threshold,
                            no_scaling, out_path);
        if (gemm_cmd->parsed()) return cmd_gemm(a_path, w_path, mode_str, low_ratio, out_path);
        if (bench_cmd->parsed())
            return cmd_bench(rows, cols, patch, threshold, bseed, run_bits, flips, sparsities,
                             format, out_path);
        if (report_cmd->parsed()) return cmd_report(in_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
