#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>

#include "uwsim/fit.hpp"
#include "uwsim/image.hpp"
#include "uwsim/loss.hpp"
#include "uwsim/metrics.hpp"
#include "uwsim/optics.hpp"
#include "uwsim/pipeline.hpp"
#include "uwsim/rng.hpp"
#include "uwsim/scatter.hpp"
#include "uwsim/turbidity.hpp"
#include "uwsim/water.hpp"

namespace py = pybind11;
using namespace uwsim;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;
using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

ImagePlane image_from_array(const FloatArray& a) {
    if (a.ndim() != 3 || a.shape(2) != 3) {
        throw std::invalid_argument("expected an (H, W, 3) array");
    }
    ImagePlane img(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
    auto r = a.unchecked<3>();
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            for (int c = 0; c < 3; ++c) img.at(x, y, c) = r(y, x, c);
        }
    }
    return img;
}

py::array image_to_array(const ImagePlane& img) {
    py::array_t<float> out({img.height(), img.width(), 3});
    auto r = out.mutable_unchecked<3>();
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            for (int c = 0; c < 3; ++c) r(y, x, c) = img.at(x, y, c);
        }
    }
    return out;
}

DepthMap depth_from_array(const DoubleArray& a) {
    if (a.ndim() != 2) throw std::invalid_argument("expected an (H, W) array");
    DepthMap d(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
    auto r = a.unchecked<2>();
    for (int y = 0; y < d.height(); ++y) {
        for (int x = 0; x < d.width(); ++x) d.at(x, y) = r(y, x);
    }
    return d;
}

py::array depth_to_array(const DepthMap& d) {
    py::array_t<double> out({d.height(), d.width()});
    auto r = out.mutable_unchecked<2>();
    for (int y = 0; y < d.height(); ++y) {
        for (int x = 0; x < d.width(); ++x) r(y, x) = d.at(x, y);
    }
    return out;
}

std::array<double, 3> as_triple(const std::vector<double>& v, const char* what) {
    if (v.size() != 3) throw std::invalid_argument(std::string(what) + " must have 3 entries");
    return {v[0], v[1], v[2]};
}

WaterProfile make_profile(const std::vector<double>& beta, const std::vector<double>& veiling) {
    WaterProfile p;
    p.beta = as_triple(beta, "beta");
    p.veiling = as_triple(veiling, "veiling");
    return p;
}

ScatterParams make_scatter_params(const std::vector<double>& alpha, const std::vector<double>& gamma,
                                  double cutoff, const std::string& normalization,
                                  double delta_sigma_eps) {
    ScatterParams params;
    params.alpha = as_triple(alpha, "alpha");
    params.gamma = as_triple(gamma, "gamma");
    params.kernel_cutoff = cutoff;
    params.delta_sigma_eps = delta_sigma_eps;
    if (normalization == "verbatim") params.normalization = KernelNormalization::Verbatim;
    else if (normalization == "normalized") params.normalization = KernelNormalization::Normalized;
    else throw std::invalid_argument("normalization must be 'verbatim' or 'normalized'");
    return params;
}

py::dict report_to_dict(const MetricsReport& r) {
    py::dict d;
    d["rel"] = r.rel;
    d["rms"] = r.rms;
    d["log10"] = r.log10_err;
    d["delta1"] = r.delta1;
    d["delta2"] = r.delta2;
    d["delta3"] = r.delta3;
    d["ssim"] = r.ssim;
    d["n_pixels"] = r.n_pixels;
    return d;
}

// Metric entry points accept either (H,W) depth planes or (H,W,3) images.
template <typename Fn2, typename Fn3>
py::object dispatch_pair(const py::array& a, const py::array& b, Fn2 on_depth, Fn3 on_image) {
    if (a.ndim() == 2) {
        return py::cast(on_depth(depth_from_array(DoubleArray::ensure(a)),
                                 depth_from_array(DoubleArray::ensure(b))));
    }
    return py::cast(on_image(image_from_array(FloatArray::ensure(a)),
                             image_from_array(FloatArray::ensure(b))));
}

} // namespace

PYBIND11_MODULE(_uwsim, m) {
    m.doc() = "Underwater image degradation models, metrics, losses and parameter fitting";

    m.def("jerlov_preset", [](const std::string& name) {
        const WaterProfile p = jerlov_preset(name);
        py::dict d;
        d["name"] = p.name;
        d["beta"] = p.beta;
        d["veiling"] = p.veiling;
        return d;
    }, py::arg("name"));

    m.def("jerlov_presets", [] {
        py::list out;
        for (const auto& p : builtin_water_presets()) {
            py::dict d;
            d["name"] = p.name;
            d["beta"] = p.beta;
            d["veiling"] = p.veiling;
            out.append(d);
        }
        return out;
    });

    m.def("transmission", [](const DoubleArray& depth, const std::vector<double>& beta) {
        WaterProfile p;
        p.beta = as_triple(beta, "beta");
        return image_to_array(transmission_map(depth_from_array(depth), p).map);
    }, py::arg("depth"), py::arg("beta"));

    m.def("degrade_classic",
          [](const FloatArray& clean, const DoubleArray& depth, const std::vector<double>& beta,
             const std::vector<double>& veiling) {
              const WaterProfile p = make_profile(beta, veiling);
              const DepthMap d = depth_from_array(depth);
              const ImagePlane img = image_from_array(clean);
              return image_to_array(degrade_classic(img, transmission_map(d, p), p));
          },
          py::arg("clean"), py::arg("depth"), py::arg("beta"), py::arg("veiling"));

    m.def("scatter_likelihood",
          [](const DoubleArray& depth, const std::vector<double>& alpha) {
              ScatterParams params;
              params.alpha = as_triple(alpha, "alpha");
              return image_to_array(scatter_likelihood(depth_from_array(depth), params).map);
          },
          py::arg("depth"), py::arg("alpha"));

    m.def("gauss_kernel_value",
          [](double x, double y, double xs, double ys, double z_src, double gamma_c,
             const std::string& mode) {
              return gauss_kernel_value(x, y, xs, ys, z_src, gamma_c,
                                        mode == "normalized" ? KernelNormalization::Normalized
                                                             : KernelNormalization::Verbatim);
          },
          py::arg("x"), py::arg("y"), py::arg("x_src"), py::arg("y_src"), py::arg("z_src"),
          py::arg("gamma_c"), py::arg("mode") = "verbatim");

    m.def("scattered_radiance",
          [](const FloatArray& clean, const DoubleArray& depth, const FloatArray& k,
             const std::vector<double>& alpha, const std::vector<double>& gamma, double cutoff,
             const std::string& normalization, double delta_sigma_eps, bool exact, int bins,
             const std::string& strategy, int threads) {
              const ScatterParams params =
                  make_scatter_params(alpha, gamma, cutoff, normalization, delta_sigma_eps);
              const ImagePlane img = image_from_array(clean);
              const DepthMap d = depth_from_array(depth);
              const ScatterField field{image_from_array(k)};
              if (exact) {
                  return image_to_array(scattered_radiance_exact(img, d, field, params));
              }
              const BinStrategy bs =
                  strategy == "quantile" ? BinStrategy::Quantile : BinStrategy::Uniform;
              return image_to_array(
                  scattered_radiance_fast(img, d, field, params, bins, bs, threads));
          },
          py::arg("clean"), py::arg("depth"), py::arg("k"), py::arg("alpha"), py::arg("gamma"),
          py::arg("cutoff") = 3.0, py::arg("normalization") = "verbatim",
          py::arg("delta_sigma_eps") = 0.25, py::arg("exact") = false, py::arg("bins") = 8,
          py::arg("strategy") = "uniform", py::arg("threads") = 1);

    m.def("compose_scattered",
          [](const FloatArray& clean, const FloatArray& j_sct, const FloatArray& k,
             const FloatArray& t, const std::vector<double>& veiling) {
              WaterProfile p;
              p.veiling = as_triple(veiling, "veiling");
              p.beta = {1.0, 1.0, 1.0}; // unused by the composition itself
              return image_to_array(compose_scattered(image_from_array(clean),
                                                      image_from_array(j_sct),
                                                      ScatterField{image_from_array(k)},
                                                      TransmissionMap{image_from_array(t)}, p));
          },
          py::arg("clean"), py::arg("j_sct"), py::arg("k"), py::arg("t"), py::arg("veiling"));

    m.def("particle_layer",
          [](int height, int width, const std::vector<double>& sp_col,
             const std::vector<double>& pr, const std::vector<double>& sigma, bool bipolar,
             std::uint64_t seed, std::uint64_t stream_id) {
              TurbidityParams params;
              params.sp_col = as_triple(sp_col, "sp_col");
              params.pr = as_triple(pr, "pr");
              params.sigma = as_triple(sigma, "sigma");
              params.bipolar = bipolar;
              return image_to_array(
                  make_particle_layer(height, width, params, RngStream(seed, stream_id)));
          },
          py::arg("height"), py::arg("width"), py::arg("sp_col"), py::arg("pr"), py::arg("sigma"),
          py::arg("bipolar") = false, py::arg("seed") = 0, py::arg("stream_id") = 0);

    m.def("blend_turbidity",
          [](const FloatArray& i_sct, const FloatArray& sp, double u) {
              return image_to_array(blend_turbidity(image_from_array(i_sct),
                                                    image_from_array(sp), u));
          },
          py::arg("i_sct"), py::arg("sp"), py::arg("u"));

    m.def("downsample_half", [](const py::array& a) -> py::object {
        if (a.ndim() == 2) {
            return depth_to_array(downsample_half(depth_from_array(DoubleArray::ensure(a))));
        }
        return image_to_array(downsample_half(image_from_array(FloatArray::ensure(a))));
    }, py::arg("plane"));

    // --- metrics -----------------------------------------------------------
    m.def("rel_error", [](const py::array& y, const py::array& y_hat) {
        return dispatch_pair(y, y_hat,
                             [](const DepthMap& a, const DepthMap& b) { return rel_error(a, b); },
                             [](const ImagePlane& a, const ImagePlane& b) { return rel_error(a, b); });
    }, py::arg("y"), py::arg("y_hat"));
    m.def("rms_error", [](const py::array& y, const py::array& y_hat) {
        return dispatch_pair(y, y_hat,
                             [](const DepthMap& a, const DepthMap& b) { return rms_error(a, b); },
                             [](const ImagePlane& a, const ImagePlane& b) { return rms_error(a, b); });
    }, py::arg("y"), py::arg("y_hat"));
    m.def("log10_error", [](const py::array& y, const py::array& y_hat) {
        return dispatch_pair(y, y_hat,
                             [](const DepthMap& a, const DepthMap& b) { return log10_error(a, b); },
                             [](const ImagePlane& a, const ImagePlane& b) { return log10_error(a, b); });
    }, py::arg("y"), py::arg("y_hat"));
    m.def("delta_accuracy", [](const py::array& y, const py::array& y_hat, int i) {
        return dispatch_pair(y, y_hat,
                             [i](const DepthMap& a, const DepthMap& b) { return delta_accuracy(a, b, i); },
                             [i](const ImagePlane& a, const ImagePlane& b) { return delta_accuracy(a, b, i); });
    }, py::arg("y"), py::arg("y_hat"), py::arg("i"));
    m.def("ssim", [](const py::array& a, const py::array& b) {
        return dispatch_pair(a, b,
                             [](const DepthMap& x, const DepthMap& y) { return ssim(x, y); },
                             [](const ImagePlane& x, const ImagePlane& y) { return ssim(x, y); });
    }, py::arg("a"), py::arg("b"));
    m.def("evaluate_pair", [](const py::array& y, const py::array& y_hat) {
        MetricsReport r;
        if (y.ndim() == 2) {
            r = evaluate_pair(depth_from_array(DoubleArray::ensure(y)),
                              depth_from_array(DoubleArray::ensure(y_hat)));
        } else {
            r = evaluate_pair(image_from_array(FloatArray::ensure(y)),
                              image_from_array(FloatArray::ensure(y_hat)));
        }
        return report_to_dict(r);
    }, py::arg("y"), py::arg("y_hat"));

    // --- loss calculus ------------------------------------------------------
    m.def("l1_mean", [](const py::array& a, const py::array& b) {
        return dispatch_pair(a, b,
                             [](const DepthMap& x, const DepthMap& y) { return l1_mean(x, y); },
                             [](const ImagePlane& x, const ImagePlane& y) { return l1_mean(x, y); });
    }, py::arg("a"), py::arg("b"));
    m.def("ssim_loss", [](const py::array& a, const py::array& b) {
        return dispatch_pair(a, b,
                             [](const DepthMap& x, const DepthMap& y) { return ssim_loss(x, y); },
                             [](const ImagePlane& x, const ImagePlane& y) { return ssim_loss(x, y); });
    }, py::arg("a"), py::arg("b"));
    m.def("pair_loss_fixed", [](const py::array& a, const py::array& b, double l1, double l2) {
        return dispatch_pair(a, b,
                             [&](const DepthMap& x, const DepthMap& y) { return pair_loss_fixed(x, y, l1, l2); },
                             [&](const ImagePlane& x, const ImagePlane& y) { return pair_loss_fixed(x, y, l1, l2); });
    }, py::arg("a"), py::arg("b"), py::arg("lambda1") = 0.1, py::arg("lambda2") = 0.1);
    m.def("pair_loss_weighted", [](const py::array& a, const py::array& b, double w) {
        return dispatch_pair(a, b,
                             [&](const DepthMap& x, const DepthMap& y) { return pair_loss_weighted(x, y, w); },
                             [&](const ImagePlane& x, const ImagePlane& y) { return pair_loss_weighted(x, y, w); });
    }, py::arg("a"), py::arg("b"), py::arg("w"));
    m.def("depth_transform", [](const DoubleArray& y_orig, double max_depth) {
        return depth_to_array(depth_transform(depth_from_array(y_orig), max_depth));
    }, py::arg("y_orig"), py::arg("m"));
    m.def("residual_compose", [](const FloatArray& initial, const FloatArray& residue) {
        return image_to_array(residual_compose(image_from_array(initial),
                                               image_from_array(residue)));
    }, py::arg("i_initial"), py::arg("residue"));
    m.def("total_technique1", &total_technique1, py::arg("l_d"), py::arg("l_p"));
    m.def("total_technique2", &total_technique2, py::arg("l_d"), py::arg("l_p"), py::arg("l_t"));
    m.def("total_technique3", &total_technique3, py::arg("l_d"), py::arg("l_p"), py::arg("l_t"),
          py::arg("l_g"));
    m.def("total_variant2", [](const std::vector<double>& components,
                               const std::vector<double>& weights) {
        return total_variant2(components, weights);
    }, py::arg("components"), py::arg("weights"));
    m.def("batch_mean_weight", [](const std::vector<double>& w) { return batch_mean_weight(w); },
          py::arg("weights"));

    // --- inverse fit ---------------------------------------------------------
    m.def("fit_water_profile",
          [](const FloatArray& clean, const DoubleArray& depth, const FloatArray& observed,
             const std::vector<double>& init_beta, const std::vector<double>& init_veiling,
             double beta_max, double tol, int max_iters) {
              FitProblem problem;
              problem.clean = image_from_array(clean);
              problem.depth = depth_from_array(depth);
              problem.observed = image_from_array(observed);
              problem.init = make_profile(init_beta, init_veiling);
              problem.bounds.beta_max = beta_max;
              problem.tol = tol;
              problem.max_iters = max_iters;
              const FitResult r = fit(problem);
              py::dict d;
              d["beta"] = r.profile.beta;
              d["veiling"] = r.profile.veiling;
              d["final_mse"] = r.final_mse;
              d["iterations"] = r.iterations;
              d["converged"] = r.converged;
              d["gradient_norm"] = r.gradient_norm;
              return d;
          },
          py::arg("clean"), py::arg("depth"), py::arg("observed"),
          py::arg("init_beta") = std::vector<double>{0.5, 0.5, 0.5},
          py::arg("init_veiling") = std::vector<double>{0.5, 0.5, 0.5},
          py::arg("beta_max") = 10.0, py::arg("tol") = 1e-9, py::arg("max_iters") = 20000);

    m.def("rng_uniform", [](std::uint64_t seed, std::uint64_t stream_id, std::size_t n) {
        py::array_t<double> out(static_cast<py::ssize_t>(n));
        auto r = out.mutable_unchecked<1>();
        RngStream rng(seed, stream_id);
        for (std::size_t i = 0; i < n; ++i) r(static_cast<py::ssize_t>(i)) = rng.next();
        return out;
    }, py::arg("seed"), py::arg("stream_id"), py::arg("n"));
}
