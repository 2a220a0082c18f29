// Python bindings. Stacks cross the boundary as complex128 arrays shaped
// (coils, maps, n, m); k-space and image stacks use maps == 1.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "acmri/baselines.hpp"
#include "acmri/fourier.hpp"
#include "acmri/io.hpp"
#include "acmri/metrics.hpp"
#include "acmri/operators.hpp"
#include "acmri/simulation.hpp"
#include "acmri/solver.hpp"
#include "acmri/svd_analysis.hpp"

namespace py = pybind11;
using namespace acmri;

namespace {

using ComplexArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

ComplexArray to_array(const CoilStack& s) {
  ComplexArray out({s.coils(), s.maps(), s.n(), s.m()});
  auto v = out.mutable_unchecked<4>();
  for (int j = 0; j < s.coils(); ++j)
    for (int q = 0; q < s.maps(); ++q)
      for (int r = 0; r < s.n(); ++r)
        for (int c = 0; c < s.m(); ++c) v(j, q, r, c) = s.at(j, q)(r, c);
  return out;
}

// Accepts (n, m), (coils, n, m) or (coils, maps, n, m).
CoilStack from_array(const ComplexArray& a, StackKind kind) {
  std::array<py::ssize_t, 4> shape{1, 1, 0, 0};
  if (a.ndim() == 2) {
    shape[2] = a.shape(0);
    shape[3] = a.shape(1);
  } else if (a.ndim() == 3) {
    shape = {a.shape(0), 1, a.shape(1), a.shape(2)};
  } else if (a.ndim() == 4) {
    shape = {a.shape(0), a.shape(1), a.shape(2), a.shape(3)};
  } else {
    throw std::invalid_argument("expected a 2-, 3- or 4-dimensional array");
  }
  CoilStack s(static_cast<int>(shape[2]), static_cast<int>(shape[3]), static_cast<int>(shape[0]),
              static_cast<int>(shape[1]), kind);
  const cplx* data = a.data();
  for (int j = 0; j < s.coils(); ++j)
    for (int q = 0; q < s.maps(); ++q)
      for (int r = 0; r < s.n(); ++r)
        for (int c = 0; c < s.m(); ++c) s.at(j, q)(r, c) = *data++;
  return s;
}

py::dict recon_dict(const ReconResult& r) {
  py::list iterations;
  for (const auto& s : r.slices) iterations.append(s.iterations);
  py::list maps;
  for (const auto& img : r.map_images) maps.append(py::cast(img));
  py::dict d;
  d["method"] = r.method;
  d["magnitude"] = r.magnitude;
  d["map_images"] = maps;
  d["status"] = to_string(r.status);
  d["failed_slices"] = r.failed_slices();
  d["iterations"] = iterations;
  return d;
}

std::optional<Roi> make_roi(const std::optional<Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>>& mask) {
  if (!mask) return std::nullopt;
  return Roi(*mask);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multi-coil MRI reconstruction by per-column Fredholm systems";

  py::class_<SamplingMask>(m, "SamplingMask")
      .def(py::init<std::vector<bool>, int>(), py::arg("acquired"), py::arg("acs"))
      .def_property_readonly("n", &SamplingMask::n)
      .def_property_readonly("acs", &SamplingMask::acs)
      .def_property_readonly("acquired", &SamplingMask::flags)
      .def_property_readonly("acquired_lines", &SamplingMask::acquired_lines)
      .def_property_readonly("missing_lines", &SamplingMask::missing_lines)
      .def_property_readonly("scan_time", &SamplingMask::scan_time)
      .def("__repr__", [](const SamplingMask& s) {
        return "<SamplingMask n=" + std::to_string(s.n()) + " acquired=" + std::to_string(s.acquired_count()) +
               " acs=" + std::to_string(s.acs()) + ">";
      });

  m.def("make_accelerated_mask", &make_accelerated_mask, py::arg("n"), py::arg("rate"), py::arg("acs"));
  m.def("make_random_mask", &make_random_mask, py::arg("n"), py::arg("scan_time"), py::arg("acs"),
        py::arg("seed"));
  m.def("read_mask", [](const std::string& p) { return read_mask(p); }, py::arg("path"));
  m.def("write_mask", [](const std::string& p, const SamplingMask& s) { write_mask(p, s); }, py::arg("path"),
        py::arg("mask"));

  m.def("fft2c", &fft2c, py::arg("image"));
  m.def("ifft2c", &ifft2c, py::arg("kspace"));

  m.def(
      "make_phantom",
      [](const std::string& spec_json) { return make_phantom(phantom_spec_from_json(nlohmann::json::parse(spec_json))); },
      py::arg("spec_json") = "{}", "Phantom from a JSON spec string, e.g. '{\"n\": 64, \"m\": 64}'.");
  m.def(
      "make_coil_maps",
      [](int n, int m, int coils, bool uniform, bool normalize) {
        CoilModel model;
        model.coils = coils;
        model.uniform = uniform;
        model.normalize = normalize;
        return to_array(make_coil_maps(model, Grid(n, m)));
      },
      py::arg("n"), py::arg("m"), py::arg("coils") = 8, py::arg("uniform") = false, py::arg("normalize") = true);
  m.def(
      "simulate_kspace",
      [](const CMatrix& image, const ComplexArray& maps, const SamplingMask& mask, double sigma, std::uint64_t seed) {
        return to_array(simulate_kspace(image, from_array(maps, StackKind::sensitivity), mask, sigma, seed));
      },
      py::arg("image"), py::arg("maps"), py::arg("mask"), py::arg("noise_sigma") = 0.0, py::arg("seed") = 0);
  m.def(
      "prepare_g", [](const ComplexArray& k) { return to_array(prepare_g(from_array(k, StackKind::kspace))); },
      py::arg("kspace"));

  m.def(
      "kernel_eval",
      [](const std::vector<std::pair<double, double>>& bands, double x2) {
        std::vector<Band> b;
        for (const auto& [c, w] : bands) b.push_back({c, w});
        return kernel_eval(BandSet(b), x2);
      },
      py::arg("bands"), py::arg("x2"), "bands: list of (center, half_width) angular-frequency pairs");
  m.def(
      "build_A_dft", [](const SamplingMask& mask, int m) { return build_A_dft(mask, Grid(mask.n(), m)).A; },
      py::arg("mask"), py::arg("m"));

  m.def(
      "svd_analysis",
      [](const ComplexArray& maps_arr, const SamplingMask& mask, double threshold, int threads) {
        const CoilStack maps = from_array(maps_arr, StackKind::sensitivity);
        const auto op = build_A_dft(mask, maps.grid());
        const auto blocks = maps.maps() > 1 ? multi_map_blocks(op, maps) : single_map_blocks(op, maps);
        const SvdReport r = svd_blocks(blocks, threshold, threads);
        py::dict d;
        d["sigma"] = r.sigma;
        d["kappa"] = r.kappa;
        d["null_dim"] = r.null_dim;
        d["null_dim_argmin"] = r.null_dim_argmin;
        d["threshold"] = r.threshold;
        d["rsv_image"] = r.rsv_image;
        return d;
      },
      py::arg("maps"), py::arg("mask"), py::arg("threshold") = 0.01, py::arg("threads") = 1);

  m.def(
      "reconstruct",
      [](const ComplexArray& kspace, const ComplexArray& maps, const SamplingMask& mask, double alpha, double beta,
         int max_iter, const std::string& chain, int threads) {
        SolverOptions opts;
        opts.max_iter = max_iter;
        if (chain == "single_chain") {
          opts.chain = TvChain::single_chain;
        } else if (chain != "per_map") {
          throw std::invalid_argument("chain must be per_map or single_chain");
        }
        const CoilStack g = prepare_g(from_array(kspace, StackKind::kspace));
        const CoilStack s = from_array(maps, StackKind::sensitivity);
        ReconResult r;
        {
          py::gil_scoped_release release;
          r = reconstruct(g, s, mask, TvParams{alpha, beta}, opts, threads);
        }
        return recon_dict(r);
      },
      py::arg("kspace"), py::arg("maps"), py::arg("mask"), py::arg("alpha") = 0.01, py::arg("beta") = kDefaultBeta,
      py::arg("max_iter") = 500, py::arg("chain") = "per_map", py::arg("threads") = 1);
  m.def(
      "reconstruct_baseline",
      [](const ComplexArray& kspace, const ComplexArray& maps, const SamplingMask& mask, const std::string& method,
         double alpha, double beta, int max_iter) {
        BaselineSpec spec{baseline_method_from_string(method), alpha, beta};
        spec.max_iter = max_iter;
        return recon_dict(reconstruct_baseline(from_array(kspace, StackKind::kspace),
                                               from_array(maps, StackKind::sensitivity), mask, spec));
      },
      py::arg("kspace"), py::arg("maps"), py::arg("mask"), py::arg("method") = "zero_fill", py::arg("alpha") = 0.0,
      py::arg("beta") = kDefaultBeta, py::arg("max_iter") = 500);

  m.def("default_roi", [](const RMatrix& truth, double f) { return default_roi(truth, f).mask(); },
        py::arg("truth"), py::arg("fraction") = 0.05);
  m.def(
      "rel_error",
      [](const RMatrix& t, const RMatrix& e, std::optional<BoolMatrix> roi) {
        return rel_error(t, e, make_roi(roi).value_or(Roi::full(t.rows(), t.cols())));
      },
      py::arg("truth"), py::arg("estimate"), py::arg("roi") = py::none());
  m.def(
      "ssim_mean",
      [](const RMatrix& t, const RMatrix& e, std::optional<BoolMatrix> roi, int window) {
        return ssim_mean(t, e, make_roi(roi).value_or(Roi::full(t.rows(), t.cols())), window);
      },
      py::arg("truth"), py::arg("estimate"), py::arg("roi") = py::none(), py::arg("window") = 3);

  m.def("read_coil_stack", [](const std::string& p) { return to_array(read_coil_stack(p)); }, py::arg("path"));
  m.def(
      "write_coil_stack",
      [](const std::string& p, const ComplexArray& a, const std::string& kind) {
        write_coil_stack(p, from_array(a, stack_kind_from_string(kind)));
      },
      py::arg("path"), py::arg("stack"), py::arg("kind") = "image");
}
