#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sdaccel/dbsc.hpp"
#include "sdaccel/ema.hpp"
#include "sdaccel/fixedpoint.hpp"
#include "sdaccel/io.hpp"
#include "sdaccel/pssa.hpp"
#include "sdaccel/synth.hpp"
#include "sdaccel/tips.hpp"

namespace py = pybind11;
using namespace sdaccel;

namespace {

std::vector<uint32_t> shape_of(const py::array& a) {
    std::vector<uint32_t> shape(size_t(a.ndim()));
    for (py::ssize_t i = 0; i < a.ndim(); ++i)
        shape[size_t(i)] = static_cast<uint32_t>(a.shape(i));
    return shape;
}

QTensor qtensor_from_numpy(const py::array_t<int32_t, py::array::c_style |
                                                          py::array::forcecast>& a,
                           const IntFormat& format, double scale) {
    QTensor t;
    t.shape = shape_of(a);
    t.data.assign(a.data(), a.data() + a.size());
    t.format = format;
    t.scale = scale;
    t.validate();
    return t;
}

py::array_t<int32_t> qtensor_to_numpy(const QTensor& t) {
    std::vector<py::ssize_t> shape(t.shape.begin(), t.shape.end());
    py::array_t<int32_t> out(shape);
    std::copy(t.data.begin(), t.data.end(), out.mutable_data());
    return out;
}

BitMatrix bitmap_from_numpy(const py::array_t<uint8_t, py::array::c_style |
                                                           py::array::forcecast>& a) {
    if (a.ndim() != 2) throw std::invalid_argument("bitmap must be 2-D");
    BitMatrix b(static_cast<uint32_t>(a.shape(0)), static_cast<uint32_t>(a.shape(1)));
    auto r = a.unchecked<2>();
    for (py::ssize_t i = 0; i < a.shape(0); ++i)
        for (py::ssize_t j = 0; j < a.shape(1); ++j)
            if (r(i, j)) b.set(uint32_t(i), uint32_t(j), true);
    return b;
}

py::array_t<uint8_t> bitmap_to_numpy(const BitMatrix& b) {
    py::array_t<uint8_t> out({py::ssize_t(b.rows()), py::ssize_t(b.cols())});
    auto w = out.mutable_unchecked<2>();
    for (uint32_t i = 0; i < b.rows(); ++i)
        for (uint32_t j = 0; j < b.cols(); ++j) w(i, j) = b.get(i, j) ? 1 : 0;
    return out;
}

py::array_t<int32_t> mat_to_numpy(const dbsc::Mat32& m) {
    py::array_t<int32_t> out({py::ssize_t(m.rows), py::ssize_t(m.cols)});
    std::copy(m.data.begin(), m.data.end(), out.mutable_data());
    return out;
}

dbsc::Mat32 mat_from_numpy(const py::array_t<int32_t, py::array::c_style |
                                                          py::array::forcecast>& a) {
    if (a.ndim() != 2) throw std::invalid_argument("matrix must be 2-D");
    dbsc::Mat32 m(static_cast<uint32_t>(a.shape(0)), static_cast<uint32_t>(a.shape(1)));
    std::copy(a.data(), a.data() + a.size(), m.data.begin());
    return m;
}

std::vector<double> doubles_from_numpy(
    const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    return std::vector<double>(a.data(), a.data() + a.size());
}

} // namespace

PYBIND11_MODULE(_sdaccel, m) {
    m.doc() = "Bit-exact SAS compression, mixed-precision and dataflow models";

    // ---- fixedpoint ----
    py::class_<IntFormat>(m, "IntFormat")
        .def(py::init<int, bool>(), py::arg("bits"), py::arg("is_signed"))
        .def_readonly("bits", &IntFormat::bits)
        .def_readonly("is_signed", &IntFormat::is_signed)
        .def("min_value", &IntFormat::min_value)
        .def("max_value", &IntFormat::max_value)
        .def_static("u6", &IntFormat::u6)
        .def_static("u12", &IntFormat::u12)
        .def_static("s8", &IntFormat::s8)
        .def_static("s32", &IntFormat::s32)
        .def("__eq__", [](const IntFormat& a, const IntFormat& b) { return a == b; })
        .def("__repr__", [](const IntFormat& f) {
            return "IntFormat(bits=" + std::to_string(f.bits) +
                   ", is_signed=" + (f.is_signed ? std::string("True") : "False") + ")";
        });

    py::class_<QTensor>(m, "QTensor")
        .def(py::init(&qtensor_from_numpy), py::arg("data"), py::arg("format"),
             py::arg("scale") = 1.0)
        .def_property_readonly("shape",
                               [](const QTensor& t) { return py::tuple(py::cast(t.shape)); })
        .def_readonly("format", &QTensor::format)
        .def_readonly("scale", &QTensor::scale)
        .def("numpy", &qtensor_to_numpy);

    m.def(
        "quantize",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& values,
           const IntFormat& format, double scale) {
            return quantize(doubles_from_numpy(values), shape_of(values), format, scale);
        },
        py::arg("values"), py::arg("format"), py::arg("scale"));
    m.def("dequantize", [](const QTensor& t) {
        std::vector<double> vals = dequantize(t);
        std::vector<py::ssize_t> shape(t.shape.begin(), t.shape.end());
        py::array_t<double> out(shape);
        std::copy(vals.begin(), vals.end(), out.mutable_data());
        return out;
    });
    m.def("bit_slice_u12", [](int x) {
        SlicePair s = bit_slice_u12(x);
        return py::make_tuple(int(s.hi), int(s.lo));
    });
    m.def("gelu", &gelu, py::arg("t"), py::arg("lut_bits") = 0);
    m.def(
        "group_norm",
        [](const QTensor& t, int groups, double eps,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& gamma,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& beta) {
            return group_norm(t, groups, eps, doubles_from_numpy(gamma),
                              doubles_from_numpy(beta));
        },
        py::arg("t"), py::arg("groups"), py::arg("eps"), py::arg("gamma"), py::arg("beta"));

    // ---- pssa ----
    py::class_<pssa::PatchMode>(m, "PatchMode")
        .def(py::init<uint32_t>(), py::arg("size"))
        .def_readonly("size", &pssa::PatchMode::size)
        .def("col_bits", &pssa::PatchMode::col_bits)
        .def("rowptr_bits", &pssa::PatchMode::rowptr_bits);

    py::class_<pssa::PrunedSAS>(m, "PrunedSAS")
        .def_readonly("rows", &pssa::PrunedSAS::rows)
        .def_readonly("cols", &pssa::PrunedSAS::cols)
        .def_property_readonly(
            "bitmap", [](const pssa::PrunedSAS& p) { return bitmap_to_numpy(p.bitmap); })
        .def_property_readonly("values", [](const pssa::PrunedSAS& p) {
            return py::array_t<uint16_t>({py::ssize_t(p.values.size())}, p.values.data());
        });

    py::class_<pssa::CompressedSAS>(m, "CompressedSAS")
        .def_readonly("rows", &pssa::CompressedSAS::rows)
        .def_readonly("cols", &pssa::CompressedSAS::cols)
        .def_readonly("threshold", &pssa::CompressedSAS::threshold)
        .def_readonly("value_bits", &pssa::CompressedSAS::value_bits)
        .def_property_readonly("patch_size",
                               [](const pssa::CompressedSAS& c) { return c.mode.size; })
        .def_property_readonly("n_patches",
                               [](const pssa::CompressedSAS& c) { return c.patches.size(); })
        .def("index_bits", [](const pssa::CompressedSAS& c) { return pssa::index_bits(c); })
        .def("to_bytes", [](const pssa::CompressedSAS& c) {
            std::vector<uint8_t> bytes = io::pssa_to_bytes(c);
            return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
        });

    m.def("prune_sas", &pssa::prune_sas, py::arg("sas"), py::arg("threshold") = 0);
    m.def(
        "xor_augment",
        [](const py::array_t<uint8_t, py::array::c_style | py::array::forcecast>& bitmap,
           const pssa::PatchMode& mode) {
            return bitmap_to_numpy(pssa::xor_augment(bitmap_from_numpy(bitmap), mode));
        },
        py::arg("bitmap"), py::arg("mode"));
    m.def(
        "xor_restore",
        [](const py::array_t<uint8_t, py::array::c_style | py::array::forcecast>& diff,
           const pssa::PatchMode& mode) {
            return bitmap_to_numpy(pssa::xor_restore(bitmap_from_numpy(diff), mode));
        },
        py::arg("diff"), py::arg("mode"));
    m.def(
        "encode",
        [](const QTensor& sas, int threshold, const pssa::PatchMode& mode, bool pad) {
            pssa::EncodeOptions opts;
            opts.allow_padding = pad;
            return pssa::encode(sas, threshold, mode, opts);
        },
        py::arg("sas"), py::arg("threshold"), py::arg("mode"), py::arg("pad") = false);
    m.def("decode", &pssa::decode, py::arg("compressed"));
    m.def("index_bits", &pssa::index_bits, py::arg("compressed"));
    m.def(
        "baseline_local_csr_bits",
        [](const py::array_t<uint8_t, py::array::c_style | py::array::forcecast>& bitmap,
           const pssa::PatchMode& mode) {
            return pssa::baseline_local_csr_bits(bitmap_from_numpy(bitmap), mode);
        },
        py::arg("bitmap"), py::arg("mode"));
    m.def(
        "baseline_rle_bits",
        [](const py::array_t<uint8_t, py::array::c_style | py::array::forcecast>& bitmap,
           int run_bits) { return pssa::baseline_rle_bits(bitmap_from_numpy(bitmap), run_bits); },
        py::arg("bitmap"), py::arg("run_bits") = 6);
    m.def(
        "baseline_global_csr_bits",
        [](const py::array_t<uint8_t, py::array::c_style | py::array::forcecast>& bitmap) {
            return pssa::baseline_global_csr_bits(bitmap_from_numpy(bitmap));
        },
        py::arg("bitmap"));
    m.def("pssa_from_bytes", [](const py::bytes& b) {
        std::string s = b;
        return io::pssa_from_bytes(std::vector<uint8_t>(s.begin(), s.end()));
    });

    // ---- tips ----
    py::class_<tips::AttentionScores>(m, "AttentionScores")
        .def_readonly("n_pixels", &tips::AttentionScores::n_pixels)
        .def_readonly("n_text", &tips::AttentionScores::n_text)
        .def_property_readonly("probs", [](const tips::AttentionScores& s) {
            py::array_t<double> out({py::ssize_t(s.n_pixels), py::ssize_t(s.n_text)});
            std::copy(s.probs.begin(), s.probs.end(), out.mutable_data());
            return out;
        });

    py::class_<tips::SpotMask>(m, "SpotMask")
        .def(py::init([](const py::array_t<uint8_t, py::array::c_style |
                                                        py::array::forcecast>& bits) {
                 tips::SpotMask mask;
                 mask.important.assign(bits.data(), bits.data() + bits.size());
                 for (auto& b : mask.important) b = b ? 1 : 0;
                 return mask;
             }),
             py::arg("important"))
        .def_property_readonly("important",
                               [](const tips::SpotMask& mask) {
                                   return py::array_t<uint8_t>({py::ssize_t(mask.size())},
                                                               mask.important.data());
                               })
        .def("count", &tips::SpotMask::count)
        .def("indices", &tips::SpotMask::indices);

    py::class_<tips::PrecisionPlan>(m, "PrecisionPlan")
        .def_readonly("mask", &tips::PrecisionPlan::mask)
        .def_readonly("high_format", &tips::PrecisionPlan::high_format)
        .def_readonly("low_format", &tips::PrecisionPlan::low_format)
        .def_readonly("apply_iteration_limit", &tips::PrecisionPlan::apply_iteration_limit);

    py::class_<tips::MixedTensor>(m, "MixedTensor")
        .def_readonly("rows", &tips::MixedTensor::rows)
        .def_readonly("cols", &tips::MixedTensor::cols)
        .def_readonly("scale_hi", &tips::MixedTensor::scale_hi)
        .def_readonly("scale_lo", &tips::MixedTensor::scale_lo)
        .def_property_readonly("row_high",
                               [](const tips::MixedTensor& t) {
                                   return py::array_t<uint8_t>({py::ssize_t(t.row_high.size())},
                                                               t.row_high.data());
                               })
        .def("numpy", [](const tips::MixedTensor& t) {
            py::array_t<int32_t> out({py::ssize_t(t.rows), py::ssize_t(t.cols)});
            std::copy(t.data.begin(), t.data.end(), out.mutable_data());
            return out;
        });

    m.def("cross_attention_probs", &tips::cross_attention_probs, py::arg("q"), py::arg("k"),
          py::arg("inv_sqrt_d_scaling") = true);
    m.def("extract_cas", &tips::extract_cas);
    m.def(
        "min_cas",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& cas) {
            return tips::min_cas(doubles_from_numpy(cas));
        },
        py::arg("cas"));
    m.def(
        "spot",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& cas,
           double delta) { return tips::spot(doubles_from_numpy(cas), delta); },
        py::arg("cas"), py::arg("delta"));
    m.def(
        "spot_abs",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& cas,
           double t_abs) { return tips::spot_abs(doubles_from_numpy(cas), t_abs); },
        py::arg("cas"), py::arg("t_abs"));
    m.def("build_precision_plan", &tips::build_precision_plan, py::arg("mask"),
          py::arg("iteration"), py::arg("total_iterations") = 25,
          py::arg("tips_iterations") = 20);
    m.def(
        "apply_mixed_quantization",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& act,
           const tips::PrecisionPlan& plan, double scale_hi, double scale_lo) {
            if (act.ndim() != 2) throw std::invalid_argument("activation must be 2-D");
            return tips::apply_mixed_quantization(
                doubles_from_numpy(act), static_cast<uint32_t>(act.shape(0)),
                static_cast<uint32_t>(act.shape(1)), plan, scale_hi, scale_lo);
        },
        py::arg("ffn_activation"), py::arg("plan"), py::arg("scale_hi"), py::arg("scale_lo"));
    m.def("low_precision_ratio", &tips::low_precision_ratio, py::arg("plan"));

    // ---- dbsc ----
    py::class_<dbsc::ArrayGeometry>(m, "ArrayGeometry")
        .def(py::init<>())
        .def_readonly("pe_rows", &dbsc::ArrayGeometry::pe_rows)
        .def_readonly("pe_cols", &dbsc::ArrayGeometry::pe_cols)
        .def_readonly("clusters", &dbsc::ArrayGeometry::clusters)
        .def_readonly("cores_per_cluster", &dbsc::ArrayGeometry::cores_per_cluster)
        .def_readonly("imem_bytes", &dbsc::ArrayGeometry::imem_bytes)
        .def_readonly("wmem_bytes", &dbsc::ArrayGeometry::wmem_bytes)
        .def_readonly("omem_bytes", &dbsc::ArrayGeometry::omem_bytes)
        .def_readonly("gmem_bytes", &dbsc::ArrayGeometry::gmem_bytes);

    py::enum_<dbsc::StationaryMode>(m, "StationaryMode")
        .value("InputStationary", dbsc::StationaryMode::InputStationary)
        .value("WeightStationary", dbsc::StationaryMode::WeightStationary);

    py::class_<dbsc::AccessStats>(m, "AccessStats")
        .def_readonly("imem_reads", &dbsc::AccessStats::imem_reads)
        .def_readonly("imem_writes", &dbsc::AccessStats::imem_writes)
        .def_readonly("wmem_reads", &dbsc::AccessStats::wmem_reads)
        .def_readonly("wmem_writes", &dbsc::AccessStats::wmem_writes)
        .def_readonly("omem_reads", &dbsc::AccessStats::omem_reads)
        .def_readonly("omem_writes", &dbsc::AccessStats::omem_writes)
        .def_readonly("gmem_reads", &dbsc::AccessStats::gmem_reads)
        .def_readonly("gmem_writes", &dbsc::AccessStats::gmem_writes)
        .def_readonly("mac_count", &dbsc::AccessStats::mac_count)
        .def_readonly("mac_cycles", &dbsc::AccessStats::mac_cycles)
        .def_readonly("mac_padding", &dbsc::AccessStats::mac_padding)
        .def_readonly("mac_skipped", &dbsc::AccessStats::mac_skipped);

    m.def("bspe_mac", &dbsc::bspe_mac, py::arg("input_slice"), py::arg("weight"),
          py::arg("acc") = 0);
    m.def("pe_column_combine", &dbsc::pe_column_combine, py::arg("left_sum"),
          py::arg("right_sum"), py::arg("high_precision"));
    m.def(
        "gemm_high",
        [](const QTensor& a, const QTensor& w) { return mat_to_numpy(dbsc::gemm_high(a, w)); },
        py::arg("a"), py::arg("w"));
    m.def(
        "gemm_mixed",
        [](const tips::MixedTensor& a, const QTensor& w) {
            return mat_to_numpy(dbsc::gemm_mixed(a, w));
        },
        py::arg("a"), py::arg("w"));
    m.def("simulate_dataflow", &dbsc::simulate_dataflow, py::arg("m"), py::arg("k"),
          py::arg("n"), py::arg("mode"), py::arg("geom") = dbsc::ArrayGeometry{},
          py::arg("low_ratio") = 0.0);
    m.def(
        "csr_skip_av",
        [](const pssa::CompressedSAS& c, const QTensor& v) {
            auto [out, stats] = dbsc::csr_skip_av(c, v);
            return py::make_tuple(mat_to_numpy(out), stats);
        },
        py::arg("compressed"), py::arg("v"));
    m.def(
        "aggregate_partials",
        [](const std::vector<py::array_t<int32_t, py::array::c_style |
                                                      py::array::forcecast>>& partials) {
            std::vector<dbsc::Mat32> ms;
            ms.reserve(partials.size());
            for (const auto& p : partials) ms.push_back(mat_from_numpy(p));
            return mat_to_numpy(dbsc::aggregate_partials(ms));
        },
        py::arg("partials"));

    // ---- ema ----
    py::enum_<ema::LayerKind>(m, "LayerKind")
        .value("Conv", ema::LayerKind::Conv)
        .value("SelfAttention", ema::LayerKind::SelfAttention)
        .value("CrossAttention", ema::LayerKind::CrossAttention)
        .value("Ffn", ema::LayerKind::Ffn);

    py::class_<ema::LayerSpec>(m, "LayerSpec")
        .def_static("conv", &ema::LayerSpec::conv, py::arg("name"), py::arg("height"),
                    py::arg("width"), py::arg("in_channels"), py::arg("out_channels"),
                    py::arg("kernel"))
        .def_static("self_attention", &ema::LayerSpec::self_attention, py::arg("name"),
                    py::arg("tokens"), py::arg("dim"))
        .def_static("cross_attention", &ema::LayerSpec::cross_attention, py::arg("name"),
                    py::arg("tokens"), py::arg("text_tokens"), py::arg("dim"))
        .def_static("ffn", &ema::LayerSpec::ffn, py::arg("name"), py::arg("tokens"),
                    py::arg("dim"), py::arg("hidden"));

    py::class_<ema::EnergyCoefficients>(m, "EnergyCoefficients")
        .def(py::init<>())
        .def_readwrite("ema_pj_per_byte", &ema::EnergyCoefficients::ema_pj_per_byte)
        .def_readwrite("onchip_pj_per_byte", &ema::EnergyCoefficients::onchip_pj_per_byte)
        .def_readwrite("mac_pj_high", &ema::EnergyCoefficients::mac_pj_high)
        .def_readwrite("mac_pj_low", &ema::EnergyCoefficients::mac_pj_low);

    py::enum_<ema::Scheme>(m, "Scheme")
        .value("Raw", ema::Scheme::Raw)
        .value("Csr", ema::Scheme::Csr)
        .value("Rle", ema::Scheme::Rle)
        .value("Pssa", ema::Scheme::Pssa);

    py::class_<ema::FfnEnergy>(m, "FfnEnergy")
        .def_readonly("baseline_energy", &ema::FfnEnergy::baseline_energy)
        .def_readonly("mixed_energy", &ema::FfnEnergy::mixed_energy)
        .def_readonly("efficiency_gain", &ema::FfnEnergy::efficiency_gain);

    py::class_<ema::SchemesConfig>(m, "SchemesConfig")
        .def(py::init<>())
        .def_readwrite("synthesize_sas", &ema::SchemesConfig::synthesize_sas)
        .def_readwrite("threshold", &ema::SchemesConfig::threshold)
        .def_readwrite("run_bits", &ema::SchemesConfig::run_bits)
        .def_readwrite("sparsity", &ema::SchemesConfig::sparsity)
        .def_readwrite("flip_rate", &ema::SchemesConfig::flip_rate)
        .def_readwrite("seed", &ema::SchemesConfig::seed);

    m.def("sas_ema_bytes", &ema::sas_ema_bytes, py::arg("scheme"), py::arg("sas"),
          py::arg("threshold"), py::arg("mode"));
    m.def(
        "ffn_energy",
        [](uint32_t n_pixels, double low_ratio, const ema::EnergyCoefficients& coeff,
           uint32_t dim, uint32_t hidden) {
            return ema::ffn_energy(n_pixels, low_ratio, coeff, {dim, hidden});
        },
        py::arg("n_pixels"), py::arg("low_ratio"), py::arg("coeff"), py::arg("dim"),
        py::arg("hidden"));
    m.def(
        "unet_ema_breakdown",
        [](const std::vector<ema::LayerSpec>& layers, const ema::SchemesConfig& cfg) {
            return ema::unet_ema_breakdown(layers, cfg).to_json_string();
        },
        py::arg("layers"), py::arg("cfg") = ema::SchemesConfig{});

    // ---- synth ----
    py::class_<synth::SynthSpec>(m, "SynthSpec")
        .def(py::init<>())
        .def_readwrite("rows", &synth::SynthSpec::rows)
        .def_readwrite("cols", &synth::SynthSpec::cols)
        .def_readwrite("mode", &synth::SynthSpec::mode)
        .def_readwrite("target_sparsity", &synth::SynthSpec::target_sparsity)
        .def_readwrite("adjacent_flip_rate", &synth::SynthSpec::adjacent_flip_rate)
        .def_readwrite("seed", &synth::SynthSpec::seed)
        .def_readwrite("threshold", &synth::SynthSpec::threshold);
    m.def("synth_sas", &synth::synth_sas, py::arg("spec"));

    // ---- io ----
    m.def("save_qtf", &io::save_qtf, py::arg("path"), py::arg("tensor"));
    m.def("load_qtf", &io::load_qtf, py::arg("path"));
    m.def("save_pssa", &io::save_pssa, py::arg("path"), py::arg("compressed"));
    m.def("load_pssa", &io::load_pssa, py::arg("path"));
    m.def("save_mask", &io::save_mask, py::arg("path"), py::arg("mask"));
    m.def("load_mask", &io::load_mask, py::arg("path"));

    m.attr("__version__") = "0.1.0";
}
