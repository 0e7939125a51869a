#include <pybind11/pybind11.h>
#include <pybind11/eigen.h>
#include <pybind11/stl.h>

#include "qadd/io.hpp"

namespace py = pybind11;
using namespace qadd;

namespace {

double extended(const ExtendedValue& v) { return v.finite() ? v.value : std::numeric_limits<double>::infinity(); }

std::vector<HermitianOperator> to_ops(const std::vector<Mat>& ms) {
  std::vector<HermitianOperator> v;
  v.reserve(ms.size());
  for (const auto& m : ms) v.emplace_back(m);
  return v;
}

}  // namespace

PYBIND11_MODULE(_qadd, m) {
  m.doc() = "minimized quantum divergences: optimization, additivity certificates, error exponents";

  static py::exception<Error> exc(m, "QaddError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(exc.ptr(), (std::string(to_string(e.code())) + ": " + e.what()).c_str());
    }
  });

  py::class_<HermitianOperator>(m, "HermitianOperator")
      .def(py::init<const Mat&>(), py::arg("matrix"))
      .def_property_readonly("matrix", &HermitianOperator::matrix)
      .def_property_readonly("dim", &HermitianOperator::dim)
      .def("trace", &HermitianOperator::trace)
      .def("eigenvalues", [](const HermitianOperator& h) { return RVec(h.eig().values); });

  py::class_<DensityState>(m, "DensityState")
      .def(py::init<const Mat&>(), py::arg("matrix"))
      .def(py::init<const HermitianOperator&>())
      .def_property_readonly("matrix", [](const DensityState& s) { return s.op().matrix(); })
      .def_property_readonly("dim", &DensityState::dim);

  py::class_<DivergenceSpec>(m, "DivergenceSpec")
      .def_static("umegaki", &DivergenceSpec::umegaki)
      .def_static("petz", &DivergenceSpec::petz, py::arg("alpha"))
      .def_static("sandwiched", &DivergenceSpec::sandwiched, py::arg("alpha"))
      .def_static("reversed", &DivergenceSpec::reversed, py::arg("alpha"))
      .def_static("alpha_z", &DivergenceSpec::alpha_z, py::arg("alpha"), py::arg("z"))
      .def_readonly("alpha", &DivergenceSpec::alpha)
      .def_property_readonly("z", &DivergenceSpec::z)
      .def("in_dp_region", &DivergenceSpec::in_dp_region)
      .def("on_line", &DivergenceSpec::on_line)
      .def("__repr__", [](const DivergenceSpec& d) { return "DivergenceSpec(" + d.label() + ")"; });

  py::class_<ConvexSetSpec>(m, "ConvexSetSpec")
      .def_static("hull", [](const std::vector<Mat>& ex) { return ConvexSetSpec::hull(to_ops(ex)); })
      .def_static("av_qubit", &ConvexSetSpec::av_qubit, py::arg("lam"))
      .def_static("werner_rains", &ConvexSetSpec::werner_rains, py::arg("d") = 2)
      .def_static("mana_strange", &ConvexSetSpec::mana_strange)
      .def_static("single", [](const Mat& s) { return ConvexSetSpec::single(HermitianOperator(s)); })
      .def_static("product_marginal", &ConvexSetSpec::product_marginal)
      .def_property_readonly("base_dim", &ConvexSetSpec::base_dim)
      .def_property_readonly("type_name", &ConvexSetSpec::type_name)
      .def("extreme_points", [](const ConvexSetSpec& s) {
        std::vector<Mat> out;
        for (const auto& e : extreme_points(s)) out.push_back(e.matrix());
        return out;
      })
      .def("to_json", [](const ConvexSetSpec& s) { return set_to_json(s).dump(); });

  py::class_<MinimizationResult>(m, "MinimizationResult")
      .def_property_readonly("sigma", [](const MinimizationResult& r) { return r.sigma_opt.matrix(); })
      .def_readonly("weights", &MinimizationResult::weights)
      .def_property_readonly("value", [](const MinimizationResult& r) { return extended(r.value); })
      .def_readonly("q_value", &MinimizationResult::q_value)
      .def_readonly("certificate_gap", &MinimizationResult::certificate_gap)
      .def_readonly("fw_gap", &MinimizationResult::fw_gap)
      .def_readonly("iterations", &MinimizationResult::iterations)
      .def_readonly("converged", &MinimizationResult::converged)
      .def("to_json", [](const MinimizationResult& r) { return minimization_to_json(r).dump(); });

  py::enum_<Verdict>(m, "Verdict")
      .value("Additive", Verdict::Additive)
      .value("NonAdditive", Verdict::NonAdditive)
      .value("Inconclusive", Verdict::Inconclusive);

  py::class_<CertifyOptions>(m, "CertifyOptions")
      .def(py::init<>())
      .def_readwrite("rel_tol", &CertifyOptions::rel_tol)
      .def_readwrite("t_window_k", &CertifyOptions::t_window_k)
      .def_readwrite("grid", &CertifyOptions::grid)
      .def_readwrite("refine_top", &CertifyOptions::refine_top);

  py::class_<AdditivityCertificate>(m, "AdditivityCertificate")
      .def_readonly("verdict", &AdditivityCertificate::verdict)
      .def_readonly("sup_value", &AdditivityCertificate::sup_value)
      .def_readonly("q_value", &AdditivityCertificate::q_value)
      .def_readonly("margin", &AdditivityCertificate::margin)
      .def_readonly("witness_t", &AdditivityCertificate::witness_t)
      .def_readonly("witness_tau", &AdditivityCertificate::witness_tau)
      .def_readonly("commuting", &AdditivityCertificate::commuting)
      .def_readonly("weights", &AdditivityCertificate::weights)
      .def_property_readonly("method", [](const AdditivityCertificate& c) { return c.search.method; })
      .def("to_json", [](const AdditivityCertificate& c) { return certificate_to_json(c).dump(); });

  py::class_<SaddleReport>(m, "SaddleReport")
      .def_readonly("alpha0", &SaddleReport::alpha0)
      .def_readonly("value", &SaddleReport::value)
      .def_readonly("weights", &SaddleReport::weights)
      .def_readonly("residual_alpha", &SaddleReport::residual_alpha)
      .def_readonly("residual_sigma", &SaddleReport::residual_sigma)
      .def_readonly("minimax_gap", &SaddleReport::minimax_gap)
      .def_readonly("converged", &SaddleReport::converged);

  py::class_<ExponentOptions>(m, "ExponentOptions")
      .def(py::init<>())
      .def_readwrite("n_max", &ExponentOptions::n_max)
      .def_readwrite("size_cap", &ExponentOptions::size_cap)
      .def_readwrite("certify", &ExponentOptions::certify);

  py::class_<ExponentReport>(m, "ExponentReport")
      .def_property_readonly("kind", [](const ExponentReport& r) { return std::string(to_string(r.kind)); })
      .def_readonly("rate", &ExponentReport::rate)
      .def_readonly("value", &ExponentReport::value)
      .def_readonly("lower", &ExponentReport::lower)
      .def_readonly("upper", &ExponentReport::upper)
      .def_readonly("certified", &ExponentReport::certified)
      .def_readonly("upper_by_n", &ExponentReport::upper_by_n)
      .def_readonly("alpha0", &ExponentReport::alpha0)
      .def_readonly("notes", &ExponentReport::notes)
      .def("to_json", [](const ExponentReport& r) { return report_to_json(r).dump(); });

  py::class_<ViolationValue>(m, "ViolationValue")
      .def_readonly("closed", &ViolationValue::closed)
      .def_readonly("quadrature", &ViolationValue::quadrature);

  py::class_<ConditionalResult>(m, "ConditionalResult")
      .def_readonly("value", &ConditionalResult::value)
      .def_readonly("raw_divergence", &ConditionalResult::raw_divergence)
      .def_readonly("fixpoint_residual", &ConditionalResult::fixpoint_residual)
      .def_property_readonly("sigma_b", [](const ConditionalResult& c) { return c.sigma_b.matrix(); });

  m.def("plus_state", &plus_state);
  m.def("werner_state", &werner_state, py::arg("p"), py::arg("d") = 2);
  m.def("strange_state", &strange_state, py::arg("p"));

  m.def(
      "divergence",
      [](const DensityState& rho, const Mat& sigma, const DivergenceSpec& spec) {
        return extended(divergence(rho, HermitianOperator(sigma), spec));
      },
      py::arg("rho"), py::arg("sigma"), py::arg("spec"));
  m.def(
      "minimize_divergence",
      [](const DensityState& rho, const ConvexSetSpec& set, const DivergenceSpec& spec) {
        return minimize_divergence(rho, set, spec);
      },
      py::arg("rho"), py::arg("set"), py::arg("spec") = DivergenceSpec::umegaki());
  m.def(
      "minimize_d_down",
      [](const DensityState& rho, const ConvexSetSpec& set) { return minimize_d_down(rho, extreme_points(set)); },
      py::arg("rho"), py::arg("set"));
  m.def(
      "additivity_check",
      [](const DensityState& rho, const ConvexSetSpec& set, const DivergenceSpec& spec, const CertifyOptions& o) {
        return additivity_check(rho, set, spec, o);
      },
      py::arg("rho"), py::arg("set"), py::arg("spec") = DivergenceSpec::umegaki(), py::arg("opts") = CertifyOptions{});
  m.def(
      "ncopy_gap",
      [](const DensityState& rho, const ConvexSetSpec& set, int n, const DivergenceSpec& spec) {
        return ncopy_brute_min(rho, set, n, spec).gap;
      },
      py::arg("rho"), py::arg("set"), py::arg("n"), py::arg("spec") = DivergenceSpec::umegaki());
  m.def(
      "chernoff_saddle", [](const DensityState& rho, const ConvexSetSpec& set) { return chernoff_saddle(rho, set); },
      py::arg("rho"), py::arg("set"));
  m.def(
      "hoeffding_saddle",
      [](const DensityState& rho, const ConvexSetSpec& set, double r) { return hoeffding_saddle(rho, set, r); },
      py::arg("rho"), py::arg("set"), py::arg("r"));
  m.def("stein_report", &stein_report, py::arg("rho"), py::arg("set"), py::arg("opts") = ExponentOptions{});
  m.def("chernoff_report", &chernoff_report, py::arg("rho"), py::arg("set"), py::arg("opts") = ExponentOptions{});
  m.def("hoeffding_report", &hoeffding_report, py::arg("rho"), py::arg("set"), py::arg("r"),
        py::arg("opts") = ExponentOptions{});
  m.def("strong_converse_report", &strong_converse_report, py::arg("rho"), py::arg("set"), py::arg("r"),
        py::arg("opts") = ExponentOptions{});
  m.def("violation_integral", &violation_integral, py::arg("p"), py::arg("n"));
  m.def(
      "conditional_entropy",
      [](const DensityState& rho, int da, int db, const DivergenceSpec& spec) {
        return conditional_entropy(rho, SystemShape{{da, db}}, spec);
      },
      py::arg("rho"), py::arg("dim_a"), py::arg("dim_b"), py::arg("spec") = DivergenceSpec::umegaki());
  m.def(
      "audenaert_test",
      [](const Mat& a, const Mat& b, double alpha) {
        return audenaert_test(HermitianOperator(a), HermitianOperator(b), alpha).op.matrix();
      },
      py::arg("a"), py::arg("b"), py::arg("alpha"));
  m.def(
      "load_problem",
      [](const std::string& text) {
        ProblemSpec p = load_problem(text);
        return py::make_tuple(p.state, p.set, p.divergence);
      },
      py::arg("text_or_path"));
}
