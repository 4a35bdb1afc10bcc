#include "sdaccel/ema.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"
#include "sdaccel/synth.hpp"

namespace sdaccel::ema {

namespace {

double round1(double pct) { return std::round(pct * 10.0) / 10.0; }

uint64_t bits_to_bytes(uint64_t bits) { return (bits + 7) / 8; }

const char* kind_name(LayerKind k) {
    switch (k) {
        case LayerKind::Conv: return "conv";
        case LayerKind::SelfAttention: return "self_attention";
        case LayerKind::CrossAttention: return "cross_attention";
        case LayerKind::Ffn: return "ffn";
    }
    return "?";
}

} // namespace

LayerSpec LayerSpec::conv(std::string name, uint32_t h, uint32_t w,
                          uint32_t c_in, uint32_t c_out, uint32_t kernel) {
    LayerSpec l;
    l.kind = LayerKind::Conv;
    l.name = std::move(name);
    l.height = h;
    l.width = w;
    l.in_channels = c_in;
    l.out_channels = c_out;
    l.kernel = kernel;
    return l;
}

LayerSpec LayerSpec::self_attention(std::string name, uint32_t tokens, uint32_t dim) {
    LayerSpec l;
    l.kind = LayerKind::SelfAttention;
    l.name = std::move(name);
    l.tokens = tokens;
    l.dim = dim;
    return l;
}

LayerSpec LayerSpec::cross_attention(std::string name, uint32_t tokens,
                                     uint32_t text_tokens, uint32_t dim) {
    LayerSpec l;
    l.kind = LayerKind::CrossAttention;
    l.name = std::move(name);
    l.tokens = tokens;
    l.text_tokens = text_tokens;
    l.dim = dim;
    return l;
}

LayerSpec LayerSpec::ffn(std::string name, uint32_t tokens, uint32_t dim, uint32_t hidden) {
    LayerSpec l;
    l.kind = LayerKind::Ffn;
    l.name = std::move(name);
    l.tokens = tokens;
    l.dim = dim;
    l.hidden = hidden;
    return l;
}

void LayerSpec::validate() const {
    if (act_bits < 1 || act_bits > 32 || weight_bits < 1 || weight_bits > 32)
        throw std::invalid_argument("LayerSpec: bit widths outside 1..32");
    switch (kind) {
        case LayerKind::Conv:
            if (!height || !width || !in_channels || !out_channels || !kernel)
                throw std::invalid_argument("LayerSpec: conv dims incomplete");
            break;
        case LayerKind::SelfAttention:
            if (!tokens || !dim)
                throw std::invalid_argument("LayerSpec: self_attention dims incomplete");
            break;
        case LayerKind::CrossAttention:
            if (!tokens || !text_tokens || !dim)
                throw std::invalid_argument("LayerSpec: cross_attention dims incomplete");
            break;
        case LayerKind::Ffn:
            if (!tokens || !dim || !hidden)
                throw std::invalid_argument("LayerSpec: ffn dims incomplete");
            break;
    }
}

void EnergyCoefficients::validate() const {
    if (!(ema_pj_per_byte > 0.0) || !(onchip_pj_per_byte > 0.0) ||
        !(mac_pj_high > 0.0) || !(mac_pj_low > 0.0))
        throw std::invalid_argument("EnergyCoefficients: all coefficients must be positive");
    if (ema_pj_per_byte <= onchip_pj_per_byte)
        std::fprintf(stderr,
                     "warning: ema_pj_per_byte (%g) does not dominate onchip_pj_per_byte "
                     "(%g); off-chip traffic is normally far more expensive\n",
                     ema_pj_per_byte, onchip_pj_per_byte);
}

uint64_t sas_ema_bytes(Scheme scheme, const QTensor& sas, int threshold,
                       pssa::PatchMode mode) {
    if (scheme == Scheme::Raw) {
        const uint64_t elems = uint64_t(sas.rows()) * sas.cols();
        return bits_to_bytes(elems * 12);
    }
    pssa::PrunedSAS pruned = pssa::prune_sas(sas, threshold);
    const uint64_t value_bits = 12 * uint64_t(pruned.values.size());
    uint64_t idx_bits = 0;
    switch (scheme) {
        case Scheme::Csr:
            idx_bits = pssa::baseline_global_csr_bits(pruned.bitmap);
            break;
        case Scheme::Rle:
            idx_bits = pssa::baseline_rle_bits(pruned.bitmap, 6);
            break;
        case Scheme::Pssa: {
            pssa::EncodeOptions opts;
            opts.allow_padding = true;
            idx_bits = pssa::index_bits(pssa::encode(sas, threshold, mode, opts));
            break;
        }
        case Scheme::Raw:
            break;
    }
    return bits_to_bytes(value_bits + idx_bits);
}

FfnEnergy ffn_energy(uint32_t n_pixels, double low_ratio,
                     const EnergyCoefficients& coeff, FfnDims dims) {
    if (low_ratio < 0.0 || low_ratio > 1.0)
        throw std::invalid_argument("ffn_energy: low_ratio outside [0, 1]");
    if (!dims.dim || !dims.hidden)
        throw std::invalid_argument("ffn_energy: dims incomplete");
    coeff.validate();

    // Two matmuls per pixel row (dim->hidden, hidden->dim); activation
    // traffic covers the input, hidden and output rows. Weight traffic is
    // the same in both precisions and stays out of the comparison.
    const double macs = double(n_pixels) * 2.0 * dims.dim * dims.hidden;
    const double act_elems = double(n_pixels) * (2.0 * dims.dim + dims.hidden);
    const double byte_pj = coeff.ema_pj_per_byte + coeff.onchip_pj_per_byte;

    FfnEnergy e;
    e.baseline_energy = macs * coeff.mac_pj_high + act_elems * (12.0 / 8.0) * byte_pj;
    e.mixed_energy =
        macs * ((1.0 - low_ratio) * coeff.mac_pj_high + low_ratio * coeff.mac_pj_low) +
        act_elems * ((1.0 - low_ratio) * 12.0 / 8.0 + low_ratio * 6.0 / 8.0) * byte_pj;
    e.efficiency_gain = e.baseline_energy / e.mixed_energy - 1.0;
    return e;
}

namespace {

// Element counts per layer kind; bytes come from the bit widths.
void layer_traffic(const LayerSpec& l, uint64_t& weight_elems, uint64_t& act_elems,
                   uint64_t& sas_elems) {
    switch (l.kind) {
        case LayerKind::Conv:
            weight_elems = uint64_t(l.out_channels) * l.in_channels * l.kernel * l.kernel;
            act_elems = uint64_t(l.height) * l.width * (uint64_t(l.in_channels) + l.out_channels);
            sas_elems = 0;
            break;
        case LayerKind::SelfAttention:
            weight_elems = 4ull * l.dim * l.dim;
            act_elems = 4ull * l.tokens * l.dim;
            sas_elems = 2ull * l.tokens * l.tokens;
            break;
        case LayerKind::CrossAttention:
            weight_elems = 4ull * l.dim * l.dim;
            act_elems = 2ull * l.tokens * l.dim + 2ull * l.text_tokens * l.dim;
            sas_elems = 2ull * l.tokens * l.text_tokens;
            break;
        case LayerKind::Ffn:
            weight_elems = 2ull * l.dim * l.hidden;
            act_elems = uint64_t(l.tokens) * (2ull * l.dim + l.hidden);
            sas_elems = 0;
            break;
    }
}

pssa::PatchMode pick_dividing_mode(uint32_t tokens, pssa::PatchMode preferred) {
    if (tokens % preferred.size == 0) return preferred;
    for (uint32_t s : {64u, 32u, 16u})
        if (tokens % s == 0) return pssa::PatchMode(s);
    throw std::invalid_argument("unet_ema_breakdown: token count fits no patch size");
}

} // namespace

EmaReport unet_ema_breakdown(const std::vector<LayerSpec>& layers,
                             const SchemesConfig& cfg) {
    if (layers.empty())
        throw std::invalid_argument("unet_ema_breakdown: empty layer list");

    EmaReport rep;
    uint64_t layer_seed = cfg.seed;
    for (const LayerSpec& l : layers) {
        l.validate();
        uint64_t we = 0, ae = 0, se = 0;
        layer_traffic(l, we, ae, se);

        LayerReport lr;
        lr.name = l.name;
        lr.kind = l.kind;
        lr.transformer_stage = l.kind != LayerKind::Conv;
        lr.weight_bytes = bits_to_bytes(we * l.weight_bits);
        lr.act_bytes = bits_to_bytes(ae * l.act_bits);
        lr.sas_bytes = bits_to_bytes(se * l.act_bits);
        lr.total_bytes = lr.weight_bytes + lr.act_bytes + lr.sas_bytes;

        if (cfg.synthesize_sas && l.kind == LayerKind::SelfAttention) {
            synth::SynthSpec ss;
            ss.rows = l.tokens;
            ss.cols = l.tokens;
            ss.mode = pick_dividing_mode(l.tokens, cfg.mode);
            ss.target_sparsity = cfg.sparsity;
            ss.adjacent_flip_rate = cfg.flip_rate;
            ss.seed = layer_seed++;
            ss.threshold = static_cast<uint16_t>(cfg.threshold);
            QTensor sas = synth::synth_sas(ss);
            // Both stream directions shrink, so scheme bytes keep the 2x
            // factor raw SAS traffic carries.
            lr.sas_csr_bytes = 2 * sas_ema_bytes(Scheme::Csr, sas, cfg.threshold, ss.mode);
            lr.sas_rle_bytes = 2 * sas_ema_bytes(Scheme::Rle, sas, cfg.threshold, ss.mode);
            lr.sas_pssa_bytes = 2 * sas_ema_bytes(Scheme::Pssa, sas, cfg.threshold, ss.mode);
            rep.sas_raw_bytes += lr.sas_bytes;
            rep.sas_csr_bytes += lr.sas_csr_bytes;
            rep.sas_rle_bytes += lr.sas_rle_bytes;
            rep.sas_pssa_bytes += lr.sas_pssa_bytes;
        }

        rep.total_bytes += lr.total_bytes;
        if (lr.transformer_stage)
            rep.transformer_bytes += lr.total_bytes;
        else
            rep.cnn_bytes += lr.total_bytes;
        rep.sas_bytes += lr.sas_bytes;
        rep.layers.push_back(std::move(lr));
    }

    if (rep.total_bytes > 0) {
        rep.transformer_share_pct =
            round1(100.0 * double(rep.transformer_bytes) / double(rep.total_bytes));
        rep.sas_share_pct = round1(100.0 * double(rep.sas_bytes) / double(rep.total_bytes));
    }
    if (rep.sas_raw_bytes > 0) {
        rep.pssa_reduction_vs_raw_pct =
            round1(100.0 * (1.0 - double(rep.sas_pssa_bytes) / double(rep.sas_raw_bytes)));
        rep.pssa_reduction_vs_csr_pct =
            round1(100.0 * (1.0 - double(rep.sas_pssa_bytes) / double(rep.sas_csr_bytes)));
        rep.pssa_reduction_vs_rle_pct =
            round1(100.0 * (1.0 - double(rep.sas_pssa_bytes) / double(rep.sas_rle_bytes)));
    }
    return rep;
}

std::string EmaReport::to_json_string(int indent) const {
    nlohmann::json j;
    j["schema"] = "sdaccel-report/1";
    j["kind"] = "ema";
    j["total_bytes"] = total_bytes;
    j["cnn_bytes"] = cnn_bytes;
    j["transformer_bytes"] = transformer_bytes;
    j["sas_bytes"] = sas_bytes;
    j["transformer_share_pct"] = transformer_share_pct;
    j["sas_share_pct"] = sas_share_pct;
    nlohmann::json jl = nlohmann::json::array();
    for (const LayerReport& l : layers) {
        nlohmann::json e;
        e["name"] = l.name;
        e["kind"] = kind_name(l.kind);
        e["stage"] = l.transformer_stage ? "transformer" : "cnn";
        e["weight_bytes"] = l.weight_bytes;
        e["act_bytes"] = l.act_bytes;
        e["sas_bytes"] = l.sas_bytes;
        e["total_bytes"] = l.total_bytes;
        if (l.sas_pssa_bytes > 0) {
            e["sas_csr_bytes"] = l.sas_csr_bytes;
            e["sas_rle_bytes"] = l.sas_rle_bytes;
            e["sas_pssa_bytes"] = l.sas_pssa_bytes;
        }
        jl.push_back(std::move(e));
    }
    j["layers"] = std::move(jl);
    if (sas_raw_bytes > 0) {
        j["sas_schemes"] = {
            {"raw_bytes", sas_raw_bytes},
            {"csr_bytes", sas_csr_bytes},
            {"rle_bytes", sas_rle_bytes},
            {"pssa_bytes", sas_pssa_bytes},
            {"pssa_reduction_vs_raw_pct", pssa_reduction_vs_raw_pct},
            {"pssa_reduction_vs_csr_pct", pssa_reduction_vs_csr_pct},
            {"pssa_reduction_vs_rle_pct", pssa_reduction_vs_rle_pct},
        };
    }
    return j.dump(indent);
}

} // namespace sdaccel::ema
