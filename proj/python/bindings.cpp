#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>
#include <vector>

#include "upm/aligner.hpp"
#include "upm/classifier.hpp"
#include "upm/eigen.hpp"
#include "upm/kmeans.hpp"
#include "upm/localizer.hpp"
#include "upm/mining.hpp"
#include "upm/npy.hpp"
#include "upm/ops.hpp"
#include "upm/pipeline.hpp"
#include "upm/serialize.hpp"
#include "upm/synth.hpp"

namespace py = pybind11;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;
using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

upm::Tensor to_tensor(const FloatArray& a) {
  std::vector<std::size_t> dims(a.shape(), a.shape() + a.ndim());
  return upm::Tensor(std::move(dims), std::vector<float>(a.data(), a.data() + a.size()));
}

FloatArray to_array(const upm::Tensor& t) {
  std::vector<py::ssize_t> shape(t.dims().begin(), t.dims().end());
  FloatArray out(shape);
  std::copy(t.data().begin(), t.data().end(), out.mutable_data());
  return out;
}

upm::Matrix to_matrix(const DoubleArray& a) {
  if (a.ndim() != 2) throw upm::Error(upm::ErrorCode::ShapeMismatch, "expected a 2-D array");
  upm::Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), m.values().begin());
  return m;
}

DoubleArray matrix_to_array(const upm::Matrix& m) {
  DoubleArray out({static_cast<py::ssize_t>(m.rows()), static_cast<py::ssize_t>(m.cols())});
  std::copy(m.values().begin(), m.values().end(), out.mutable_data());
  return out;
}

upm::TransactionDB to_db(const std::vector<std::vector<upm::Item>>& transactions, std::size_t height,
                         std::size_t width) {
  upm::TransactionDB db;
  db.height = height;
  db.width = width;
  db.transactions = transactions;
  for (auto& t : db.transactions) {
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
  }
  return db;
}

py::list patterns_to_list(const upm::PatternSet& p) {
  py::list out;
  for (const auto& pat : p.patterns) out.append(py::make_tuple(pat.items, pat.support));
  return out;
}

upm::MiningOptions mining_options(double beta, std::size_t max_len, bool strict) {
  upm::MiningOptions o;
  o.beta = beta;
  o.max_len = max_len;
  o.strict = strict;
  return o;
}

py::object json_to_py(const upm::Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Unsupervised part mining: transactions, Apriori, support maps, part layouts, alignment, SVM";

  static py::exception<upm::Error> upm_error(m, "UpmError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const upm::Error& e) {
      py::object err = upm_error;
      py::object instance = err(e.what());
      instance.attr("code") = std::string(upm::to_string(e.code()));
      PyErr_SetObject(upm_error.ptr(), instance.ptr());
    }
  });

  m.def("read_tensor", [](const std::filesystem::path& p) { return to_array(upm::read_tensor(p)); },
        py::arg("path"));
  m.def("write_tensor", [](const FloatArray& a, const std::filesystem::path& p) { upm::write_tensor(to_tensor(a), p); },
        py::arg("array"), py::arg("path"));
  m.def("bilinear_resize",
        [](const FloatArray& a, std::size_t h, std::size_t w) { return to_array(upm::bilinear_resize(to_tensor(a), h, w)); },
        py::arg("array"), py::arg("out_h"), py::arg("out_w"));
  m.def("global_average_pool",
        [](const FloatArray& a) { return upm::global_average_pool(to_tensor(a)).values; }, py::arg("array"));
  m.def("l2_normalize",
        [](std::vector<double> v) { return upm::l2_normalize(upm::Descriptor{std::move(v)}).values; },
        py::arg("values"));

  m.def(
      "compute_threshold",
      [](const FloatArray& stack, const std::string& mode) {
        return upm::compute_threshold(to_tensor(stack), upm::parse_threshold_mode(mode)).alpha;
      },
      py::arg("stack"), py::arg("mode") = "global", "Threshold(s) α: one value in global mode, one per map otherwise.");
  m.def(
      "build_transactions",
      [](const FloatArray& stack, const std::string& mode) {
        const auto t = to_tensor(stack);
        return upm::build_transactions(t, upm::compute_threshold(t, upm::parse_threshold_mode(mode))).transactions;
      },
      py::arg("stack"), py::arg("mode") = "global");

  m.def(
      "support",
      [](const std::vector<std::vector<upm::Item>>& transactions, std::size_t universe,
         const std::vector<upm::Item>& itemset) { return upm::support(to_db(transactions, 1, universe), itemset); },
      py::arg("transactions"), py::arg("universe"), py::arg("itemset"));
  m.def(
      "apriori",
      [](const std::vector<std::vector<upm::Item>>& transactions, std::size_t universe, double beta,
         std::size_t max_len, bool strict) {
        return patterns_to_list(upm::apriori(to_db(transactions, 1, universe), mining_options(beta, max_len, strict)));
      },
      py::arg("transactions"), py::arg("universe"), py::arg("beta"), py::arg("max_len") = 3,
      py::arg("strict") = false, "List of (itemset, support) with supp >= beta (or > beta when strict).");
  m.def(
      "brute_force_mine",
      [](const std::vector<std::vector<upm::Item>>& transactions, std::size_t universe, double beta,
         std::size_t max_len, bool strict) {
        return patterns_to_list(
            upm::brute_force_mine(to_db(transactions, 1, universe), mining_options(beta, max_len, strict)));
      },
      py::arg("transactions"), py::arg("universe"), py::arg("beta"), py::arg("max_len") = 3,
      py::arg("strict") = false);

  m.def(
      "localize",
      [](const FloatArray& stack, double beta, std::size_t k_parts, double lambda, const std::string& alpha_mode,
         int connectivity, double objbox_frac, std::size_t max_pattern_len, std::uint64_t seed,
         std::size_t image_size) {
        upm::PipelineConfig cfg;
        cfg.beta = beta;
        cfg.k_parts = k_parts;
        cfg.lambda = lambda;
        cfg.alpha_mode = upm::parse_threshold_mode(alpha_mode);
        cfg.connectivity = connectivity;
        cfg.objbox_frac = objbox_frac;
        cfg.max_pattern_len = max_pattern_len;
        cfg.seed = seed;
        cfg.image_size = image_size;
        cfg.validate();
        const auto r = upm::localize_parts(to_tensor(stack), cfg, image_size, image_size);
        py::dict out;
        out["layout"] = json_to_py(upm::layout_to_json(r.layout, ""));
        out["support_map"] = to_array(r.grid_support.values);
        out["alpha"] = r.alpha;
        out["patterns"] = r.patterns.size();
        out["warnings"] = r.warnings;
        return out;
      },
      py::arg("stack"), py::arg("beta") = 0.07, py::arg("k_parts") = 4, py::arg("lambda_") = 0.25,
      py::arg("alpha_mode") = "global", py::arg("connectivity") = 8, py::arg("objbox_frac") = 0.2,
      py::arg("max_pattern_len") = 3, py::arg("seed") = 0, py::arg("image_size") = 448,
      "Part layout for one C×h×w activation stack.");

  m.def(
      "kmeans",
      [](const DoubleArray& points, std::size_t k, std::uint64_t seed) {
        upm::KMeansOptions o;
        o.k = k;
        o.seed = seed;
        const auto r = upm::kmeans_cluster(to_matrix(points), o);
        return py::make_tuple(matrix_to_array(r.centers), r.labels, r.inertia, r.inertia_trace);
      },
      py::arg("points"), py::arg("k"), py::arg("seed") = 0, "(centers, labels, inertia, inertia_trace)");
  m.def(
      "sym_eigen",
      [](const DoubleArray& a) {
        const auto e = upm::sym_eigen(to_matrix(a));
        return py::make_tuple(e.values, matrix_to_array(e.vectors));
      },
      py::arg("matrix"));
  m.def(
      "spectral_cluster",
      [](const DoubleArray& descriptors, std::size_t k, std::uint64_t seed) {
        const auto mat = to_matrix(descriptors);
        upm::PartDescriptorTable table;
        for (std::size_t r = 0; r < mat.rows(); ++r) {
          const auto row = mat.row(r);
          table.rows.push_back({std::to_string(r), 0, upm::Descriptor{{row.begin(), row.end()}}});
        }
        return upm::spectral_cluster(table, k, seed).labels;
      },
      py::arg("descriptors"), py::arg("k"), py::arg("seed") = 0);

  m.def(
      "fuse_features",
      [](const std::vector<std::vector<double>>& blocks) {
        std::vector<upm::Descriptor> d;
        for (const auto& b : blocks) d.push_back({b});
        return upm::fuse_features(d).values;
      },
      py::arg("blocks"));

  py::class_<upm::LinearModel>(m, "LinearModel")
      .def_static(
          "train",
          [](const DoubleArray& x, const std::vector<std::string>& y, double c_reg, std::uint64_t seed) {
            upm::SvmOptions o;
            o.c_reg = c_reg;
            o.seed = seed;
            return upm::train_linear_svm(to_matrix(x), y, o);
          },
          py::arg("x"), py::arg("y"), py::arg("c_reg") = 1.0, py::arg("seed") = 0)
      .def("predict", [](const upm::LinearModel& model,
                         const std::vector<double>& x) { return upm::predict(model, x); })
      .def("to_json", [](const upm::LinearModel& model) { return upm::model_to_json(model).dump(); })
      .def_readonly("classes", &upm::LinearModel::classes)
      .def_readonly("weights", &upm::LinearModel::weights)
      .def_readonly("biases", &upm::LinearModel::biases);

  m.def(
      "planted_fixture",
      [](std::uint64_t seed, std::size_t maps, std::size_t grid, std::size_t groups) {
        upm::PlantedOptions o;
        o.seed = seed;
        o.maps = maps;
        o.grid = grid;
        o.groups = groups;
        const auto f = upm::make_planted_fixture(o);
        std::vector<std::pair<double, double>> centers;
        for (const auto& c : f.image_centers) centers.emplace_back(c.x, c.y);
        return py::make_tuple(to_array(f.stack), centers);
      },
      py::arg("seed") = 0, py::arg("maps") = 1024, py::arg("grid") = 28, py::arg("groups") = 4,
      "(stack, planted image-space centers) of a synthetic planted-part fixture.");
}
