#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdaccel/fixedpoint.hpp"
#include "sdaccel/pssa.hpp"

namespace sdaccel::ema {

enum class LayerKind { Conv, SelfAttention, CrossAttention, Ffn };

// One layer of the denoising workload. Off-chip traffic is modeled per kind:
//
//   conv            weights = c_out*c_in*k^2, acts = h*w*(c_in + c_out)
//   self_attention  weights = 4*dim^2, acts = 4*tokens*dim,
//                   sas = 2*tokens*tokens (score write + read-back)
//   cross_attention weights = 4*dim^2, acts = 2*tokens*dim + 2*text*dim,
//                   sas = 2*tokens*text
//   ffn             weights = 2*dim*hidden, acts = tokens*(2*dim + hidden)
//
// element counts; bytes apply act_bits/weight_bits (activations and scores
// at act_bits, weights at weight_bits).
struct LayerSpec {
    LayerKind kind = LayerKind::SelfAttention;
    std::string name;
    // attention / ffn dims
    uint32_t tokens = 0;
    uint32_t text_tokens = 0;
    uint32_t dim = 0;
    uint32_t hidden = 0;
    // conv dims
    uint32_t height = 0;
    uint32_t width = 0;
    uint32_t in_channels = 0;
    uint32_t out_channels = 0;
    uint32_t kernel = 0;

    int act_bits = 12;
    int weight_bits = 8;

    static LayerSpec conv(std::string name, uint32_t h, uint32_t w,
                          uint32_t c_in, uint32_t c_out, uint32_t kernel);
    static LayerSpec self_attention(std::string name, uint32_t tokens, uint32_t dim);
    static LayerSpec cross_attention(std::string name, uint32_t tokens,
                                     uint32_t text_tokens, uint32_t dim);
    static LayerSpec ffn(std::string name, uint32_t tokens, uint32_t dim, uint32_t hidden);

    void validate() const;
};

struct EnergyCoefficients {
    double ema_pj_per_byte = 20.0;
    double onchip_pj_per_byte = 1.0;
    double mac_pj_high = 1.0;
    double mac_pj_low = 0.5;

    void validate() const;  // all positive; ema expected to dominate onchip
};

enum class Scheme { Raw, Csr, Rle, Pssa };

// External-memory bytes of one SAS under a scheme. Raw is rows*cols at 12
// bits; the compressed schemes carry value_bits*nnz plus their index bits,
// rounded up to bytes. Csr is the conventional whole-matrix CSR baseline,
// Rle the run-length baseline (6-bit runs), Pssa the XOR-augmented
// patch-local CSR stream.
uint64_t sas_ema_bytes(Scheme scheme, const QTensor& sas, int threshold,
                       pssa::PatchMode mode);

struct FfnDims {
    uint32_t dim = 0;
    uint32_t hidden = 0;
};

struct FfnEnergy {
    double baseline_energy = 0.0;  // all rows INT12
    double mixed_energy = 0.0;     // low_ratio of rows INT6
    double efficiency_gain = 0.0;  // baseline/mixed - 1
};

// Energy of one FFN layer (2 matmuls: dim->hidden->dim) under mixed
// precision. Counts MAC energy plus activation traffic (EMA + on-chip) at
// the per-row bit width; weight traffic is precision-invariant and excluded.
FfnEnergy ffn_energy(uint32_t n_pixels, double low_ratio,
                     const EnergyCoefficients& coeff, FfnDims dims);

// Optional synthetic-SAS configuration for scheme comparisons inside
// unet_ema_breakdown. Applied to self-attention layers only (cross-attention
// token counts rarely align to a patch grid and their scores are marginal).
struct SchemesConfig {
    bool synthesize_sas = false;
    int threshold = 0;
    pssa::PatchMode mode{64};
    int run_bits = 6;
    double sparsity = 0.7;
    double flip_rate = 0.1;
    uint64_t seed = 1;
};

struct LayerReport {
    std::string name;
    LayerKind kind = LayerKind::SelfAttention;
    bool transformer_stage = false;
    uint64_t weight_bytes = 0;
    uint64_t act_bytes = 0;
    uint64_t sas_bytes = 0;
    uint64_t total_bytes = 0;
    // Populated when schemes are evaluated (self-attention layers only).
    uint64_t sas_csr_bytes = 0;
    uint64_t sas_rle_bytes = 0;
    uint64_t sas_pssa_bytes = 0;
};

struct EmaReport {
    std::vector<LayerReport> layers;
    uint64_t total_bytes = 0;
    uint64_t cnn_bytes = 0;
    uint64_t transformer_bytes = 0;
    uint64_t sas_bytes = 0;
    double transformer_share_pct = 0.0;  // one decimal
    double sas_share_pct = 0.0;
    // Scheme totals over the self-attention SAS traffic, when evaluated.
    uint64_t sas_raw_bytes = 0;
    uint64_t sas_csr_bytes = 0;
    uint64_t sas_rle_bytes = 0;
    uint64_t sas_pssa_bytes = 0;
    double pssa_reduction_vs_raw_pct = 0.0;
    double pssa_reduction_vs_csr_pct = 0.0;
    double pssa_reduction_vs_rle_pct = 0.0;

    std::string to_json_string(int indent = 2) const;
};

// Byte totals and percentage shares over a workload description; exact
// integer accounting (sum of parts equals every reported total).
EmaReport unet_ema_breakdown(const std::vector<LayerSpec>& layers,
                             const SchemesConfig& cfg = {});

} // namespace sdaccel::ema
