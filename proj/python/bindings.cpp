#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "casimir/asymptotics.hpp"
#include "casimir/lifshitz.hpp"
#include "casimir/modes.hpp"

namespace py = pybind11;
using namespace casimir;

namespace {

py::object to_fraction(const Rational& r) {
  static py::object fraction = py::module_::import("fractions").attr("Fraction");
  return fraction(py::int_(py::str(numerator(r).str())),
                  py::int_(py::str(denominator(r).str())));
}

template <class T>
py::tuple estimate(const Estimate<T>& e) {
  return py::make_tuple(e.value, e.error);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Casimir free energy, entropy and cavity modes between two mirrors";

  // Instances carry the machine-readable `code` and the `achieved` estimate.
  static py::handle error_type =
      py::exception<Error>(m, "CasimirError", PyExc_RuntimeError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = error_type(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      exc.attr("achieved") = e.achieved() ? py::cast(*e.achieved()) : py::none();
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  py::class_<PerfectMirror>(m, "PerfectMirror").def(py::init<>());
  py::class_<ConstantR>(m, "ConstantR")
      .def(py::init([](double rho) { return ConstantR{rho}; }), py::arg("rho"))
      .def_readwrite("rho", &ConstantR::rho);
  py::class_<Plasma>(m, "Plasma")
      .def(py::init([](double wp) { return Plasma{wp}; }), py::arg("omega_p"))
      .def_readwrite("omega_p", &Plasma::omega_p);
  py::class_<Drude>(m, "Drude")
      .def(py::init([](double wp, double g0) { return Drude{wp, g0}; }),
           py::arg("omega_p"), py::arg("gamma0"))
      .def_readwrite("omega_p", &Drude::omega_p)
      .def_readwrite("gamma0", &Drude::gamma0);
  py::class_<DrudeThermal>(m, "DrudeThermal")
      .def(py::init([](double wp, double g0, double a2) { return DrudeThermal{wp, g0, a2}; }),
           py::arg("omega_p"), py::arg("gamma0"), py::arg("alpha2"))
      .def_readwrite("omega_p", &DrudeThermal::omega_p)
      .def_readwrite("gamma0", &DrudeThermal::gamma0)
      .def_readwrite("alpha2", &DrudeThermal::alpha2);

  py::enum_<Polarization>(m, "Polarization")
      .value("TE", Polarization::TE)
      .value("TM", Polarization::TM);

  py::class_<TransverseMode>(m, "TransverseMode")
      .def(py::init([](Polarization p, double k) { return TransverseMode{p, k}; }),
           py::arg("p"), py::arg("k"))
      .def_readwrite("p", &TransverseMode::p)
      .def_readwrite("k", &TransverseMode::k);

  py::class_<CavityConfig>(m, "CavityConfig")
      .def(py::init([](DielectricModel model, double L) { return CavityConfig{L, model}; }),
           py::arg("model"), py::arg("L") = 1.0)
      .def_readwrite("L", &CavityConfig::L)
      .def_readwrite("model", &CavityConfig::model)
      .def("__repr__", [](const CavityConfig& c) {
        return "CavityConfig(" + model_name(c.model) + ", L=" + std::to_string(c.L) + ")";
      });

  m.def("model_name", &model_name);
  m.def("permittivity", &permittivity, py::arg("model"), py::arg("omega"), py::arg("tau") = 0.0);
  m.def(
      "reflection",
      [](const DielectricModel& model, const TransverseMode& mode, cplx omega, double tau) {
        return reflection(model, mode, omega, tau);
      },
      py::arg("model"), py::arg("mode"), py::arg("omega"), py::arg("tau") = 0.0);
  m.def("reflection_zero_limit", &reflection_zero_limit, py::arg("model"), py::arg("mode"),
        py::arg("tau") = 0.0);

  m.def("g_value", &g_value, py::arg("cfg"), py::arg("mode"), py::arg("omega"),
        py::arg("tau") = 0.0);
  m.def("dispersion", &dispersion, py::arg("cfg"), py::arg("mode"), py::arg("omega"),
        py::arg("tau") = 0.0);
  m.def("dlnD_domega", &dlnD_domega, py::arg("cfg"), py::arg("mode"), py::arg("omega"),
        py::arg("tau") = 0.0);
  m.def("dlnD_dL", &dlnD_dL, py::arg("cfg"), py::arg("mode"), py::arg("omega"),
        py::arg("tau") = 0.0);
  m.def(
      "g_derivatives_at_zero",
      [](const CavityConfig& c, const TransverseMode& mode, double tau) {
        const auto d = g_derivatives_at_zero(c, mode, tau);
        return py::dict(py::arg("g_xi") = d.g_xi, py::arg("g_xi2") = d.g_xi2,
                        py::arg("error_xi") = d.error_xi, py::arg("error_xi2") = d.error_xi2);
      },
      py::arg("cfg"), py::arg("mode"), py::arg("tau") = 0.0);
  m.def(
      "g_tilde_zero",
      [](const CavityConfig& c, const TransverseMode& mode, std::complex<double> alpha) {
        GTildeOptions o;
        o.alpha = alpha;
        return g_tilde_zero(c, mode, o);
      },
      py::arg("cfg"), py::arg("mode"), py::arg("alpha") = std::complex<double>(0.0, 1.0));
  m.def(
      "sample_g_curve",
      [](const CavityConfig& c, const TransverseMode& mode, double tau,
         const std::vector<double>& xi) { return sample_g_curve(c, mode, tau, xi).g; },
      py::arg("cfg"), py::arg("mode"), py::arg("tau"), py::arg("xi"));

  py::class_<SeriesResult>(m, "SeriesResult")
      .def_readonly("value", &SeriesResult::value)
      .def_readonly("error", &SeriesResult::error)
      .def_readonly("terms", &SeriesResult::terms)
      .def_readonly("tail", &SeriesResult::tail);
  m.def("free_energy", [](const CavityConfig& c, double tau) { return free_energy(c, tau); },
        py::arg("cfg"), py::arg("tau"));
  m.def("entropy_matsubara",
        [](const CavityConfig& c, double tau) { return entropy_matsubara(c, tau); },
        py::arg("cfg"), py::arg("tau"));
  m.def("force", [](const CavityConfig& c, double tau) { return force(c, tau); },
        py::arg("cfg"), py::arg("tau"));
  m.def("energy_integral_T0",
        [](const CavityConfig& c) { return estimate(energy_integral_T0(c)); }, py::arg("cfg"));
  m.def("force_integral_T0",
        [](const CavityConfig& c) { return estimate(force_integral_T0(c)); }, py::arg("cfg"));
  m.def("channel_energy_T0",
        [](const CavityConfig& c, const TransverseMode& mode) { return channel_energy_T0(c, mode); },
        py::arg("cfg"), py::arg("mode"));
  m.def("channel_matsubara_energy",
        [](const CavityConfig& c, const TransverseMode& mode, double tau) {
          return channel_matsubara_energy(c, mode, tau);
        },
        py::arg("cfg"), py::arg("mode"), py::arg("tau"));

  py::class_<EntropyExpansion>(m, "EntropyExpansion")
      .def_readonly("c1", &EntropyExpansion::c1)
      .def_readonly("c2", &EntropyExpansion::c2)
      .def_readonly("c1_te", &EntropyExpansion::c1_te)
      .def_readonly("c1_tm", &EntropyExpansion::c1_tm)
      .def_readonly("radius", &EntropyExpansion::radius);
  m.def("entropy_expansion", &entropy_expansion, py::arg("cfg"));
  m.def(
      "euler_maclaurin_entropy",
      [](const CavityConfig& c, double tau, int k_max, int m_max) {
        const auto r = euler_maclaurin_entropy(c, tau, k_max, m_max);
        return py::make_tuple(r.value, r.truncation);
      },
      py::arg("cfg"), py::arg("tau"), py::arg("k_max"), py::arg("m_max"));
  m.def(
      "residual_entropy",
      [](const CavityConfig& c) {
        const auto v = residual_entropy(c);
        return py::dict(py::arg("model") = v.model, py::arg("residual") = v.residual,
                        py::arg("classification") = to_string(v.classification),
                        py::arg("discontinuity") = v.discontinuity);
      },
      py::arg("cfg"));

  py::class_<Rect>(m, "Rect")
      .def(py::init([](double a, double b, double c, double d) { return Rect{a, b, c, d}; }),
           py::arg("re_min"), py::arg("re_max"), py::arg("im_min"), py::arg("im_max"));
  py::class_<ModeSet>(m, "ModeSet")
      .def_readonly("zeros", &ModeSet::zeros)
      .def_readonly("multiplicity", &ModeSet::multiplicity)
      .def_readonly("residual", &ModeSet::residual)
      .def_readonly("poles", &ModeSet::poles)
      .def_readonly("winding", &ModeSet::winding)
      .def_readonly("zero_count", &ModeSet::zero_count)
      .def("csv", [](const ModeSet& s) { return modes_csv(s); });
  m.def(
      "find_modes",
      [](const CavityConfig& c, const TransverseMode& mode, const Rect& r, int max_count,
         double tau) {
        ModeSearchOptions o;
        o.tau = tau;
        return find_modes(c, mode, r, max_count, o);
      },
      py::arg("cfg"), py::arg("mode"), py::arg("region"), py::arg("max_count"),
      py::arg("tau") = 0.0);
  m.def(
      "residue_sum",
      [](const CavityConfig& c, const TransverseMode& mode, const Rect& r,
         const std::function<std::complex<double>(std::complex<double>)>& f, double sheet_lo,
         double sheet_hi, double tau) {
        const Sheet sheet = std::isnan(sheet_lo) ? Sheet{} : Sheet::strip(sheet_lo, sheet_hi);
        return residue_sum(c, mode, rectangle_contour(r, sheet), f, tau);
      },
      py::arg("cfg"), py::arg("mode"), py::arg("region"), py::arg("kernel"),
      py::arg("sheet_lo") = std::numeric_limits<double>::quiet_NaN(),
      py::arg("sheet_hi") = std::numeric_limits<double>::quiet_NaN(), py::arg("tau") = 0.0);
  m.def("sum_rule_residual", &sum_rule_residual, py::arg("cfg"), py::arg("mode"),
        py::arg("omega_max"), py::arg("tau") = 0.0);
  m.def(
      "pole_sum_energy_T0",
      [](const CavityConfig& c, const TransverseMode& mode, double Lambda) {
        return pole_sum_energy_T0(c, mode, Lambda).value;
      },
      py::arg("cfg"), py::arg("mode"), py::arg("Lambda") = 1.0);
  m.def(
      "pole_sum_energy_finiteT",
      [](const CavityConfig& c, const TransverseMode& mode, double tau, double Lambda) {
        return pole_sum_energy_finiteT(c, mode, tau, 0, Lambda).value;
      },
      py::arg("cfg"), py::arg("mode"), py::arg("tau"), py::arg("Lambda") = 1.0);

  m.def("bernoulli", [](int n) { return to_fraction(bernoulli(n)); }, py::arg("n"));
  m.def(
      "richardson_extrapolate",
      [](const std::vector<double>& h, const std::vector<double>& v) {
        const auto e = richardson_extrapolate(h, v);
        return py::make_tuple(e.limit, e.residual);
      },
      py::arg("h"), py::arg("values"));
}
