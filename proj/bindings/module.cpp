// Python bindings for the core operations: parameters and closed-form
// profiles, the spectral toolbox, the two solvers with their frame changes,
// seed construction and the shrinking-set audit, and the shooting /
// profile-extraction drivers.
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "quench/config.hpp"
#include "quench/dynamics.hpp"
#include "quench/params.hpp"
#include "quench/quadrature.hpp"
#include "quench/seed.hpp"
#include "quench/solver.hpp"
#include "quench/spectral.hpp"

namespace py = pybind11;
using namespace quench;

namespace {

GridFunction grid_from_array(py::array_t<double, py::array::c_style> values,
                             double x_min, double x_max, const std::string& kind,
                             double time_tag) {
  GridFunction g;
  const auto buf = values.unchecked<1>();
  g.values.resize(buf.shape(0));
  for (py::ssize_t i = 0; i < buf.shape(0); ++i) g.values[i] = buf(i);
  g.x_min = x_min;
  g.x_max = x_max;
  g.time_tag = time_tag;
  if (kind == "h") g.kind = FieldKind::h;
  else if (kind == "u") g.kind = FieldKind::u;
  else if (kind == "w") g.kind = FieldKind::w;
  else if (kind == "q") g.kind = FieldKind::q;
  else throw std::invalid_argument("kind must be one of h, u, w, q");
  return g;
}

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  auto buf = out.mutable_unchecked<1>();
  for (std::size_t i = 0; i < v.size(); ++i) buf(static_cast<py::ssize_t>(i)) = v[i];
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Numerical laboratory for finite-time quenching of dh/dt = "
            "Lap(h) - h^{-beta}: self-similar profiles, Hermite mode "
            "decomposition, shooting on the unstable modes, and final-profile "
            "verification.";

  py::register_exception<PositivityLossError>(m, "PositivityLossError");
  py::register_exception<NoQuenchError>(m, "NoQuenchError");
  py::register_exception<OutOfRegimeError>(m, "OutOfRegimeError");
  py::register_exception<InvalidSeedError>(m, "InvalidSeedError");
  py::register_exception<ConfigError>(m, "ConfigError");

  py::class_<Parameters>(m, "Parameters")
      .def(py::init<>())
      .def_readwrite("beta", &Parameters::beta)
      .def_readwrite("alpha", &Parameters::alpha)
      .def_readonly("a", &Parameters::a)
      .def_readonly("p", &Parameters::p)
      .def_readonly("b", &Parameters::b)
      .def_readonly("kappa", &Parameters::kappa)
      .def_readwrite("N", &Parameters::N)
      .def_readwrite("T", &Parameters::T)
      .def_readwrite("K0", &Parameters::K0)
      .def_readwrite("A", &Parameters::A)
      .def_readwrite("eps0", &Parameters::eps0)
      .def_readwrite("alpha0", &Parameters::alpha0)
      .def_readwrite("delta0", &Parameters::delta0)
      .def_readwrite("C0", &Parameters::C0)
      .def_readwrite("eta0", &Parameters::eta0)
      .def("__repr__", [](const Parameters& pr) {
        return "Parameters(beta=" + std::to_string(pr.beta) +
               ", alpha=" + std::to_string(pr.alpha) +
               ", p=" + std::to_string(pr.p) + ")";
      });

  m.def("derive_exponents", &derive_exponents, py::arg("beta"),
        py::arg("alpha") = 1.0);
  m.def("phi_big", &phi_big, py::arg("abs_z"), py::arg("params"));
  m.def("phi_hat", &phi_hat, py::arg("abs_z"), py::arg("beta"));
  m.def("grad_phi_hat", &grad_phi_hat, py::arg("z"), py::arg("beta"));

  py::class_<FinalProfileOptions>(m, "FinalProfileOptions")
      .def(py::init<>())
      .def_readwrite("rho0", &FinalProfileOptions::rho0)
      .def_readwrite("c_inner", &FinalProfileOptions::c_inner);

  m.def("final_profile", &final_profile, py::arg("x"), py::arg("beta"),
        py::arg("options") = FinalProfileOptions{});
  m.def("grad_final_profile", &grad_final_profile, py::arg("x"), py::arg("beta"),
        py::arg("options") = FinalProfileOptions{});
  m.def("final_profile_inner", &final_profile_inner, py::arg("abs_x"),
        py::arg("beta"));
  m.def("flat_solutions", [](double t, const Parameters& pr) {
    const FlatSolutions fs = flat_solutions(t, pr);
    return py::make_tuple(fs.h, fs.u);
  });
  m.def("k_hat", &k_hat, py::arg("tau"), py::arg("beta"), py::arg("K0"));
  m.def("k_hat_x", &k_hat_x, py::arg("tau"), py::arg("direction"), py::arg("beta"),
        py::arg("K0"), py::arg("log_theta"));
  m.def("solve_theta", &solve_theta, py::arg("abs_x"), py::arg("K0"),
        py::arg("tol") = 1e-14);
  m.def("quasi_parabola_radius", &quasi_parabola_radius, py::arg("theta"),
        py::arg("K0"));

  py::class_<GridFunction>(m, "GridFunction")
      .def(py::init(&grid_from_array), py::arg("values"), py::arg("x_min"),
           py::arg("x_max"), py::arg("kind") = "h", py::arg("time_tag") = 0.0)
      .def_property_readonly(
          "values", [](const GridFunction& g) { return to_array(g.values); })
      .def_readonly("x_min", &GridFunction::x_min)
      .def_readonly("x_max", &GridFunction::x_max)
      .def_readonly("time_tag", &GridFunction::time_tag)
      .def_property_readonly(
          "kind", [](const GridFunction& g) { return to_string(g.kind); })
      .def("n", &GridFunction::n)
      .def("dx", &GridFunction::dx)
      .def("x", &GridFunction::x)
      .def("min_value", &GridFunction::min_value);

  m.def("hermite_eval", &hermite_eval, py::arg("ell"), py::arg("xi"));
  m.def("hermite_norm_sq", &hermite_norm_sq, py::arg("ell"));
  m.def("inner_product_rho",
        py::overload_cast<const GridFunction&, const GridFunction&>(
            &inner_product_rho));
  m.def("cutoff_chi", &cutoff_chi, py::arg("y"), py::arg("s"), py::arg("K0"));

  py::class_<ModeDecomposition>(m, "ModeDecomposition")
      .def_readonly("r0", &ModeDecomposition::r0)
      .def_readonly("r1", &ModeDecomposition::r1)
      .def_readonly("r2", &ModeDecomposition::r2)
      .def_readonly("r_minus", &ModeDecomposition::r_minus)
      .def_readonly("r_e", &ModeDecomposition::r_e)
      .def("reconstruct", &ModeDecomposition::reconstruct);

  m.def("decompose", &decompose, py::arg("r"), py::arg("s"), py::arg("K0"));
  m.def("apply_L", &apply_L, py::arg("r"));
  m.def("mehler_apply", &mehler_apply, py::arg("theta"), py::arg("r"));
  m.def("potential_V", &potential_V, py::arg("y"), py::arg("s"), py::arg("params"));
  m.def("remainder_R", &remainder_R, py::arg("y"), py::arg("s"), py::arg("params"));
  m.def("phi_similarity", &phi_similarity, py::arg("y"), py::arg("s"),
        py::arg("params"));

  py::enum_<ForcingKind>(m, "ForcingKind")
      .value("pure_power", ForcingKind::pure_power)
      .value("vortex", ForcingKind::vortex);

  py::class_<Forcing>(m, "Forcing")
      .def(py::init<>())
      .def_readwrite("kind", &Forcing::kind)
      .def_readwrite("vortex_H0", &Forcing::vortex_H0)
      .def("F", &Forcing::F, py::arg("h"), py::arg("beta"));

  py::class_<MinHSample>(m, "MinHSample")
      .def_readonly("t", &MinHSample::t)
      .def_readonly("min_h", &MinHSample::min_h)
      .def_readonly("argmin_x", &MinHSample::argmin_x);

  py::class_<SimRecord>(m, "SimRecord")
      .def_readonly("snapshots", &SimRecord::snapshots)
      .def_readonly("min_h_series", &SimRecord::min_h_series)
      .def_readonly("estimated_T", &SimRecord::estimated_T)
      .def_readonly("estimated_x0", &SimRecord::estimated_x0)
      .def_readonly("quenched", &SimRecord::quenched);

  py::class_<SimOptions>(m, "SimOptions")
      .def(py::init<>())
      .def_readwrite("h_stop", &SimOptions::h_stop)
      .def_readwrite("t_max", &SimOptions::t_max)
      .def_readwrite("T_ref", &SimOptions::T_ref)
      .def_readwrite("snapshot_ds", &SimOptions::snapshot_ds)
      .def_readwrite("s_end", &SimOptions::s_end)
      .def_readwrite("stop_at_s_end", &SimOptions::stop_at_s_end);

  m.def("simulate_physical", &simulate_physical, py::arg("h0"), py::arg("params"),
        py::arg("forcing") = Forcing{}, py::arg("options") = SimOptions{},
        py::call_guard<py::gil_scoped_release>());
  m.def("detect_quench", [](const SimRecord& record, double beta) {
    const QuenchEstimate est = detect_quench(record, beta);
    return py::make_tuple(est.T_est, est.x0_est);
  });

  py::class_<SimilarityGridSpec>(m, "SimilarityGridSpec")
      .def(py::init<>())
      .def_readwrite("y_max", &SimilarityGridSpec::y_max)
      .def_readwrite("dy", &SimilarityGridSpec::dy);

  py::class_<SimilaritySlice>(m, "SimilaritySlice")
      .def_readonly("w", &SimilaritySlice::w)
      .def_readonly("q", &SimilaritySlice::q)
      .def_readonly("s", &SimilaritySlice::s)
      .def_readonly("y_covered", &SimilaritySlice::y_covered);

  m.def("transform_to_similarity", &transform_to_similarity, py::arg("h"),
        py::arg("t"), py::arg("T_est"), py::arg("params"),
        py::arg("spec") = SimilarityGridSpec{}, py::arg("x0") = 0.0,
        py::arg("h_boundary") = 1.0);
  m.def("scaling_invariance_check", &scaling_invariance_check, py::arg("u0"),
        py::arg("lambda_"), py::arg("params"), py::arg("horizon"),
        py::arg("window") = 0.5);

  py::class_<SeedParams>(m, "SeedParams")
      .def(py::init([](double d0, double d1, double t0) {
             return SeedParams{d0, d1, t0};
           }),
           py::arg("d0") = 0.0, py::arg("d1") = 0.0, py::arg("t0") = 0.0)
      .def_readwrite("d0", &SeedParams::d0)
      .def_readwrite("d1", &SeedParams::d1)
      .def_readwrite("t0", &SeedParams::t0)
      .def("s0", &SeedParams::s0, py::arg("T"));

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init<>())
      .def_readwrite("x_min", &GridSpec::x_min)
      .def_readwrite("x_max", &GridSpec::x_max)
      .def_readwrite("n", &GridSpec::n);

  m.def("build_initial_h", &build_initial_h, py::arg("seed"), py::arg("params"),
        py::arg("grid") = GridSpec{}, py::arg("profile") = FinalProfileOptions{});

  py::class_<RegionFlags>(m, "RegionFlags")
      .def_readonly("in_R1", &RegionFlags::in_R1)
      .def_readonly("in_R2", &RegionFlags::in_R2)
      .def_readonly("in_R3", &RegionFlags::in_R3);

  m.def("classify_region", &classify_region, py::arg("x"), py::arg("t"),
        py::arg("params"));

  py::class_<KxSlices>(m, "KxSlices")
      .def_property_readonly("xi", [](const KxSlices& k) { return to_array(k.xi); })
      .def_property_readonly("tau",
                             [](const KxSlices& k) { return to_array(k.tau); })
      .def_readonly("values", &KxSlices::values)
      .def_readonly("grad", &KxSlices::grad)
      .def_readonly("theta", &KxSlices::theta)
      .def_readonly("t_of_x", &KxSlices::t_of_x);

  m.def("second_rescale", &second_rescale, py::arg("trajectory"), py::arg("x"),
        py::arg("params"), py::arg("T"), py::arg("n_xi") = 17,
        py::arg("n_tau") = 33);

  py::class_<ShrinkCondition>(m, "ShrinkCondition")
      .def_readonly("name", &ShrinkCondition::name)
      .def_readonly("bound", &ShrinkCondition::bound)
      .def_readonly("measured", &ShrinkCondition::measured)
      .def_readonly("margin", &ShrinkCondition::margin)
      .def_property_readonly("passed",
                             [](const ShrinkCondition& c) { return c.pass; });

  py::class_<ShrinkReport>(m, "ShrinkReport")
      .def_readonly("t", &ShrinkReport::t)
      .def_readonly("s", &ShrinkReport::s)
      .def_readonly("conditions", &ShrinkReport::conditions)
      .def("all_pass", &ShrinkReport::all_pass);

  py::class_<AuditOptions>(m, "AuditOptions")
      .def(py::init<>())
      .def_readwrite("C_q_agg", &AuditOptions::C_q_agg);

  m.def("audit_shrinking_set", &audit_shrinking_set, py::arg("h"), py::arg("t"),
        py::arg("baseline"), py::arg("params"), py::arg("T"),
        py::arg("options") = AuditOptions{});
  m.def("shrink_report_csv", &shrink_report_csv);

  py::class_<ModeSeries>(m, "ModeSeries")
      .def_property_readonly("s",
                             [](const ModeSeries& v) { return to_array(v.s); })
      .def_property_readonly("q0",
                             [](const ModeSeries& v) { return to_array(v.q0); })
      .def_property_readonly("q1",
                             [](const ModeSeries& v) { return to_array(v.q1); })
      .def_property_readonly("q2",
                             [](const ModeSeries& v) { return to_array(v.q2); })
      .def_property_readonly(
          "qminus_weighted",
          [](const ModeSeries& v) { return to_array(v.qminus_weighted); })
      .def_property_readonly(
          "qe_sup", [](const ModeSeries& v) { return to_array(v.qe_sup); })
      .def_property_readonly(
          "q_sup", [](const ModeSeries& v) { return to_array(v.q_sup); });

  m.def("track_modes", &track_modes, py::arg("trajectory"), py::arg("params"),
        py::arg("T_used"), py::arg("spec") = SimilarityGridSpec{50.0, 0.05});
  m.def("resample_uniform", &resample_uniform, py::arg("series"), py::arg("ds"));

  py::class_<ModeOdeReport>(m, "ModeOdeReport")
      .def_property_readonly("s",
                             [](const ModeOdeReport& r) { return to_array(r.s); })
      .def_property_readonly(
          "scaled_res0",
          [](const ModeOdeReport& r) { return to_array(r.scaled_res0); })
      .def_property_readonly(
          "scaled_res1",
          [](const ModeOdeReport& r) { return to_array(r.scaled_res1); })
      .def_property_readonly(
          "scaled_res2",
          [](const ModeOdeReport& r) { return to_array(r.scaled_res2); })
      .def_readonly("sup0", &ModeOdeReport::sup0)
      .def_readonly("sup1", &ModeOdeReport::sup1)
      .def_readonly("sup2", &ModeOdeReport::sup2)
      .def_readonly("cbar_fit", &ModeOdeReport::cbar_fit);

  m.def("verify_mode_odes", &verify_mode_odes, py::arg("series"));

  py::class_<RateFit>(m, "RateFit")
      .def_readonly("best", &RateFit::best)
      .def_readonly("c_logs_over_s", &RateFit::c_logs_over_s)
      .def_readonly("c_inv_s", &RateFit::c_inv_s)
      .def_readonly("c_inv_sqrt_s", &RateFit::c_inv_sqrt_s)
      .def_readonly("res_logs_over_s", &RateFit::res_logs_over_s)
      .def_readonly("res_inv_s", &RateFit::res_inv_s)
      .def_readonly("res_inv_sqrt_s", &RateFit::res_inv_sqrt_s);

  m.def("fit_rate", &fit_rate, py::arg("s"), py::arg("y"));

  py::class_<ShootOptions>(m, "ShootOptions")
      .def(py::init<>())
      .def_readwrite("levels", &ShootOptions::levels)
      .def_readwrite("d0_min", &ShootOptions::d0_min)
      .def_readwrite("d0_max", &ShootOptions::d0_max)
      .def_readwrite("d1_min", &ShootOptions::d1_min)
      .def_readwrite("d1_max", &ShootOptions::d1_max)
      .def_readwrite("s_end", &ShootOptions::s_end)
      .def_readwrite("check_corners", &ShootOptions::check_corners)
      .def_readwrite("grid", &ShootOptions::grid)
      .def_readwrite("profile", &ShootOptions::profile);

  py::class_<LevelRecord>(m, "LevelRecord")
      .def_readonly("level", &LevelRecord::level)
      .def_readonly("d0", &LevelRecord::d0)
      .def_readonly("d1", &LevelRecord::d1)
      .def_readonly("s_exit", &LevelRecord::s_exit)
      .def_readonly("exit_condition", &LevelRecord::exit_condition)
      .def_readonly("exit_sign", &LevelRecord::exit_sign);

  py::class_<ShootResult>(m, "ShootResult")
      .def_readonly("best_d0", &ShootResult::best_d0)
      .def_readonly("best_d1", &ShootResult::best_d1)
      .def_readonly("s_max", &ShootResult::s_max)
      .def_readonly("exit_condition", &ShootResult::exit_condition)
      .def_readonly("history", &ShootResult::history)
      .def_readonly("init_audit", &ShootResult::init_audit);

  m.def("shoot", &shoot, py::arg("params"), py::arg("forcing"), py::arg("t0"),
        py::arg("options"), py::call_guard<py::gil_scoped_release>());

  m.def("run_seed_to_exit", &run_seed_to_exit, py::arg("seed"), py::arg("params"),
        py::arg("forcing"), py::arg("options"), py::arg("snapshot_ds") = -1.0,
        py::call_guard<py::gil_scoped_release>());

  py::class_<SeedRun>(m, "SeedRun")
      .def_readonly("outcome", &SeedRun::outcome)
      .def_readonly("record", &SeedRun::record);

  py::class_<FinalProfiles>(m, "FinalProfiles")
      .def_property_readonly("r",
                             [](const FinalProfiles& f) { return to_array(f.r); })
      .def_property_readonly(
          "H_star_ref",
          [](const FinalProfiles& f) { return to_array(f.H_star_ref); })
      .def_property_readonly(
          "h_ratio_plus",
          [](const FinalProfiles& f) { return to_array(f.h_ratio_plus); })
      .def_property_readonly(
          "h_ratio_minus",
          [](const FinalProfiles& f) { return to_array(f.h_ratio_minus); })
      .def_property_readonly(
          "grad_ratio_plus",
          [](const FinalProfiles& f) { return to_array(f.grad_ratio_plus); })
      .def_property_readonly(
          "grad_ratio_minus",
          [](const FinalProfiles& f) { return to_array(f.grad_ratio_minus); })
      .def_readonly("x0", &FinalProfiles::x0)
      .def_readonly("T_est", &FinalProfiles::T_est);

  m.def("extract_final_profiles", &extract_final_profiles, py::arg("trajectory"),
        py::arg("params"), py::arg("profile") = FinalProfileOptions{},
        py::arg("r_max") = 0.1, py::arg("n_r") = 48);

  py::class_<IntermediateErrorSeries>(m, "IntermediateErrorSeries")
      .def_property_readonly(
          "s", [](const IntermediateErrorSeries& e) { return to_array(e.s); })
      .def_property_readonly(
          "err_profile",
          [](const IntermediateErrorSeries& e) { return to_array(e.err_profile); })
      .def_property_readonly(
          "err_gradient",
          [](const IntermediateErrorSeries& e) { return to_array(e.err_gradient); })
      .def_property_readonly("err_weighted_grad",
                             [](const IntermediateErrorSeries& e) {
                               return to_array(e.err_weighted_grad);
                             });

  m.def("intermediate_profile_error", &intermediate_profile_error,
        py::arg("trajectory"), py::arg("params"), py::arg("T_est"),
        py::arg("K") = 1.0, py::arg("x0") = 0.0);
}
