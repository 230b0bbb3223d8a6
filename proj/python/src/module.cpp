#include "psdbw/ai.hpp"
#include "psdbw/barycenter.hpp"
#include "psdbw/bw.hpp"
#include "psdbw/error.hpp"
#include "psdbw/geometry.hpp"
#include "psdbw/randgen.hpp"
#include "psdbw/symmat.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace psdbw;

namespace {

// Arrays crossing the boundary must be square and symmetric up to roundoff;
// the same tolerance as the matrix file readers.
SymMatrix to_sym(const Matrix& m) {
  if (m.rows() != m.cols())
    throw InvalidArgument("expected a square matrix, got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i + 1; j < m.cols(); ++j)
      if (std::abs(m(i, j) - m(j, i)) > 1e-9 * std::max({1.0, std::abs(m(i, j)), std::abs(m(j, i))}))
        throw InvalidArgument("matrix is not symmetric at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
  return SymMatrix(m);
}

std::vector<SymMatrix> to_syms(const std::vector<Matrix>& ms) {
  std::vector<SymMatrix> out;
  out.reserve(ms.size());
  for (const Matrix& m : ms) out.push_back(to_sym(m));
  return out;
}

py::dict result_dict(const BarycenterResult& r) {
  py::dict d;
  d["mean"] = r.mean.matrix();
  d["iterations"] = r.iterations;
  d["converged"] = r.converged;
  d["final_step"] = r.final_step;
  d["algorithm"] = std::string(to_string(r.algorithm));
  d["geometry"] = r.geometry;
  d["diagnostic"] = r.diagnostic;
  d["working_set_spread"] = r.working_set_spread ? py::cast(*r.working_set_spread) : py::none();
  return d;
}

SolverConfig solver(double eps, std::optional<int> max_iters) {
  SolverConfig cfg;
  cfg.epsilon = eps;
  cfg.max_iters = max_iters;
  cfg.validate();
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_psdbw, m) {
  m.doc() = "Bures-Wasserstein and affine-invariant geometry of PSD matrices.";

  // Translators run newest first, so the base classes go in before the
  // derived ones.
  static py::exception<Error> error(m, "Error");
  static py::exception<InvalidArgument> invalid(m, "InvalidArgument", error.ptr());
  static py::exception<NumericalError> numerical(m, "NumericalError", error.ptr());
  static py::exception<NotPsdError> not_psd(m, "NotPsdError", numerical.ptr());
  static py::exception<NotPdError> not_pd(m, "NotPdError", numerical.ptr());
  static py::exception<ExpDomainError> exp_domain(m, "ExpDomainError", numerical.ptr());
  static py::exception<ConvergenceError> convergence(m, "ConvergenceError", numerical.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConvergenceError& e) {
      PyErr_SetString(convergence.ptr(), e.what());
    } catch (const ExpDomainError& e) {
      PyErr_SetString(exp_domain.ptr(), e.what());
    } catch (const NotPdError& e) {
      PyErr_SetString(not_pd.ptr(), e.what());
    } catch (const NotPsdError& e) {
      PyErr_SetString(not_psd.ptr(), e.what());
    } catch (const NumericalError& e) {
      PyErr_SetString(numerical.ptr(), e.what());
    } catch (const InvalidArgument& e) {
      PyErr_SetString(invalid.ptr(), e.what());
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), e.what());
    }
  });

  m.def("distance", [](const Matrix& a, const Matrix& b, const std::string& metric) {
        return geometry_by_name(metric).distance(to_sym(a), to_sym(b));
      }, py::arg("a"), py::arg("b"), py::arg("metric") = "bw");
  m.def("geodesic", [](const Matrix& a, const Matrix& b, double t, const std::string& metric) {
        return geometry_by_name(metric).geodesic(to_sym(a), to_sym(b), t).matrix();
      }, py::arg("a"), py::arg("b"), py::arg("t"), py::arg("metric") = "bw");
  m.def("pair_mean", [](const Matrix& a, const Matrix& b, const std::string& metric) {
        return geometry_by_name(metric).pair_mean(to_sym(a), to_sym(b)).matrix();
      }, py::arg("a"), py::arg("b"), py::arg("metric") = "bw");
  m.def("log", [](const Matrix& base, const Matrix& target, const std::string& metric) {
        return geometry_by_name(metric).log(to_sym(base), to_sym(target)).value.matrix();
      }, py::arg("base"), py::arg("target"), py::arg("metric") = "bw");
  m.def("exp", [](const Matrix& base, const Matrix& x, const std::string& metric) {
        return geometry_by_name(metric).exp(to_sym(base), TangentVector{to_sym(x)}).matrix();
      }, py::arg("base"), py::arg("x"), py::arg("metric") = "bw");

  m.def("barycenter", [](const std::vector<Matrix>& mats, const std::string& metric, const std::string& algorithm,
                         double eps, std::optional<int> max_iters) {
        const std::vector<SymMatrix> xs = to_syms(mats);
        return result_dict(barycenter(algorithm_from_string(algorithm), geometry_by_name(metric), xs, solver(eps, max_iters)));
      }, py::arg("matrices"), py::arg("metric") = "bw", py::arg("algorithm") = "projection", py::arg("eps") = 1e-3,
      py::arg("max_iters") = py::none());
  m.def("ssd", [](const std::vector<Matrix>& mats, const Matrix& mean, const std::string& metric) {
        const std::vector<SymMatrix> xs = to_syms(mats);
        return ssd(geometry_by_name(metric), xs, to_sym(mean));
      }, py::arg("matrices"), py::arg("mean"), py::arg("metric") = "bw");
  m.def("frechet_variance", [](const std::vector<Matrix>& mats, const Matrix& mean, const std::string& metric) {
        const std::vector<SymMatrix> xs = to_syms(mats);
        return frechet_variance(geometry_by_name(metric), xs, to_sym(mean));
      }, py::arg("matrices"), py::arg("mean"), py::arg("metric") = "bw");

  m.def("sqrt_psd", [](const Matrix& a) { return sqrt_psd(to_sym(a)).matrix(); }, py::arg("a"));
  m.def("clip_to_psd", [](const Matrix& a, double floor) { return clip_to_psd(to_sym(a), floor).matrix(); },
        py::arg("a"), py::arg("floor"));
  m.def("eigh", [](const Matrix& a) {
        const SpectralDecomp d = spectral_decompose(to_sym(a));
        return py::make_tuple(d.eigenvalues, d.eigenvectors);
      }, py::arg("a"), "Ascending eigenvalues and orthonormal eigenvector columns.");

  m.def("random_spd", [](int n, double p, std::uint64_t seed, double small_scale, double bulk_low, double bulk_high) {
        SpectrumSpec spec;
        spec.dim = n;
        spec.small_fraction = p;
        spec.small_scale = small_scale;
        spec.bulk_low = bulk_low;
        spec.bulk_high = bulk_high;
        return random_spd(spec, RngSeed{seed}).matrix();
      }, py::arg("n"), py::arg("p") = 0.0, py::arg("seed") = 0, py::arg("small_scale") = 1e-3, py::arg("bulk_low") = 0.5,
      py::arg("bulk_high") = 1.5);
  m.def("random_perturbation", [](int n, double scale, std::uint64_t seed) {
        return random_perturbation(n, scale, RngSeed{seed}).matrix();
      }, py::arg("n"), py::arg("scale") = 1e-3, py::arg("seed") = 0);
}
