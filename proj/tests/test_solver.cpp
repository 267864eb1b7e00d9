// Physical and similarity-frame time integration: flat quenching, a
// manufactured solution, the comparison principle, the deviation equation,
// frame changes, scale invariance, and quench detection.
#include <cmath>
#include <functional>

#include "doctest.h"
#include "quench/params.hpp"
#include "quench/seed.hpp"
#include "quench/solver.hpp"
#include "quench/spectral.hpp"
#include "test_util.hpp"

using namespace quench;

namespace {

GridFunction make_h(double x_min, double x_max, int n,
                    const std::function<double(double)>& f, double t = 0.0) {
  GridFunction h;
  h.values.resize(n);
  h.x_min = x_min;
  h.x_max = x_max;
  h.kind = FieldKind::h;
  h.time_tag = t;
  for (int i = 0; i < n; ++i) h.values[i] = f(h.x(i));
  return h;
}

const Forcing kPure{ForcingKind::pure_power};

}  // namespace

TEST_SUITE_BEGIN("solver");

TEST_CASE("flat data quenches at h0^{beta+1}/(beta+1) within 1e-4") {
  // Exact ODE solution dh/dt = -1/h from h0 = 1 reaches zero at T = 0.5. The
  // domain is wide enough that the pinned boundary never reaches the center.
  const Parameters pr = derive_exponents(1.0, 1.0);
  GridFunction h0 = make_h(-6.0, 6.0, 2001, [](double) { return 1.0; });
  SimOptions opts;
  opts.h_stop = 5e-4;
  const SimRecord record = simulate_physical(h0, pr, kPure, opts);
  CHECK(record.quenched);
  const QuenchEstimate est = detect_quench(record, pr.beta);
  CHECK(std::fabs(est.T_est - 0.5) < 1e-4);
  // The flat law (min h)^{beta+1}/(beta+1) + t stays constant along the way.
  for (const auto& sample : record.min_h_series) {
    const double invariant =
        std::pow(sample.min_h, pr.beta + 1.0) / (pr.beta + 1.0) + sample.t;
    CHECK(std::fabs(invariant - 0.5) < 0.01 * 0.5);
  }
}

TEST_CASE("manufactured solution converges at second order in space") {
  // h_m(x, t) = 2 + t sin(x) with the compensating source
  // S = sin(x)(1 + t) + (2 + t sin x)^{-beta}.
  const Parameters pr = derive_exponents(1.0, 1.0);
  auto exact = [](double x, double t) { return 2.0 + t * std::sin(x); };
  const SourceFn source = [&](double x, double t) {
    return std::sin(x) * (1.0 + t) + 1.0 / (2.0 + t * std::sin(x));
  };
  const BoundaryFn boundary = [&](double t) {
    return std::pair<double, double>{exact(-1.0, t), exact(1.0, t)};
  };
  const double t_final = 0.5;
  double prev_err = -1.0;
  for (int n : {101, 201, 401}) {
    GridFunction h = make_h(-1.0, 1.0, n, [&](double x) { return exact(x, 0.0); });
    while (h.time_tag < t_final - 1e-13) {
      REQUIRE(step_physical(h, t_final - h.time_tag, pr, kPure, StepControl{},
                            source, boundary) == StepStatus::accepted);
    }
    double err_sq = 0.0;
    for (int i = 0; i < h.n(); ++i) {
      const double e = h.values[i] - exact(h.x(i), t_final);
      err_sq += e * e * h.dx();
    }
    const double err = std::sqrt(err_sq);
    if (prev_err > 0.0) {
      CHECK(std::log2(prev_err / err) > 1.9);
    }
    prev_err = err;
  }
}

TEST_CASE("comparison principle is preserved to 10 dx^2") {
  const Parameters pr = derive_exponents(1.0, 1.0);
  const int n = 201;
  GridFunction ha = make_h(-1.0, 1.0, n, [](double x) {
    return 1.0 + 0.2 * std::sin(3.0 * x);
  });
  GridFunction hb = make_h(-1.0, 1.0, n, [](double x) {
    return 1.0 + 0.2 * std::sin(3.0 * x) + 0.05 * (1.0 + std::cos(2.0 * x));
  });
  const double dx2 = ha.dx() * ha.dx();
  const double t_final = 0.1;
  while (ha.time_tag < t_final - 1e-13) {
    const double cap = t_final - ha.time_tag;
    REQUIRE(step_physical(ha, cap, pr, kPure) == StepStatus::accepted);
    REQUIRE(step_physical(hb, cap, pr, kPure) == StepStatus::accepted);
    REQUIRE(ha.time_tag == hb.time_tag);  // same clocks, same dt choices
    for (int i = 0; i < n; ++i) {
      CHECK(ha.values[i] <= hb.values[i] + 10.0 * dx2);
    }
  }
}

TEST_CASE("accepted steps never lose positivity near quenching") {
  const Parameters pr = derive_exponents(1.0, 1.0);
  GridFunction h = make_h(-1.0, 1.0, 401, [](double x) {
    return 0.05 + 0.5 * x * x;  // aggressive dip at the origin
  });
  const Forcing forcing = kPure;
  for (int step = 0; step < 100000; ++step) {
    const StepStatus status = step_physical(h, 1.0, pr, forcing);
    for (double v : h.values) CHECK(v > 0.0);
    if (status == StepStatus::quench_signal || h.min_value() < 1e-4) break;
  }
}

TEST_CASE("vortex forcing stays a small correction of the power law") {
  const Forcing vortex{ForcingKind::vortex, 1.0};
  // F(h) = 1/h - e^{-h}: the correction is o(h^{-1}) at the origin.
  CHECK(vortex.F(1e-4, 1.0) == doctest::Approx(1e4).epsilon(1e-3));
  CHECK(vortex.F(1.0, 1.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  // Blowup-frame perturbation decays at infinity relative to u^p.
  const Parameters pr = derive_exponents(1.0, 1.0);
  for (double u : {10.0, 100.0, 1000.0}) {
    CHECK(std::fabs(vortex.f_tilde(u, pr)) / std::pow(u, pr.p) < 1.0 / u);
  }
}

TEST_CASE("one similarity step from zero deviation reproduces the remainder") {
  const Parameters pr = derive_exponents(1.0, 1.0);
  const double s0 = 20.0;
  GridFunction q;
  const int n = 1601;
  q.values.assign(n, 0.0);
  q.x_min = -40.0;
  q.x_max = 40.0;
  q.kind = FieldKind::q;
  q.time_tag = s0;
  const double ds = 1e-3;
  const SimilarityBoundaryFn zero_bc = [](double) {
    return std::pair<double, double>{0.0, 0.0};
  };
  step_similarity(q, ds, pr, kPure, SimilarityTerms{}, zero_bc);
  double sup_q = 0.0, sup_diff = 0.0;
  for (int i = 0; i < n; ++i) {
    if (std::fabs(q.x(i)) > 35.0) continue;
    sup_q = std::max(sup_q, std::fabs(q.values[i]));
    sup_diff = std::max(
        sup_diff, std::fabs(q.values[i] - ds * remainder_R(q.x(i), s0, pr)));
  }
  CHECK(sup_q <= 1.0 * ds / s0);  // ||R|| <= C/s with the calibrated C = 1
  CHECK(sup_diff < 5.0 * ds * ds);
}

TEST_CASE("pure drift evolution scales hermite modes by e^{(1 - m/2) ds}") {
  const Parameters pr = derive_exponents(1.0, 1.0);
  SimilarityTerms off;
  off.use_V = off.use_B = off.use_T = off.use_R = off.use_L = false;
  for (int m : {0, 1, 2, 3}) {
    GridFunction q;
    const double y_max = 20.0, dy = 0.05;
    const int n = 2 * static_cast<int>(std::round(y_max / dy)) + 1;
    q.values.resize(n);
    q.x_min = -y_max;
    q.x_max = y_max;
    q.kind = FieldKind::q;
    q.time_tag = 5.0;
    for (int i = 0; i < n; ++i) q.values[i] = hermite_eval(m, q.x(i));
    const double lam = 1.0 - 0.5 * m;
    const double s1 = 5.5;
    const SimilarityBoundaryFn exact_bc = [&](double s) {
      const double factor = std::exp(lam * (s - 5.0));
      return std::pair<double, double>{factor * hermite_eval(m, -y_max),
                                       factor * hermite_eval(m, y_max)};
    };
    advance_similarity(q, s1, pr, kPure, off, exact_bc);
    const double factor = std::exp(lam * (s1 - 5.0));
    for (int i = 0; i < n; ++i) {
      const double y = q.x(i);
      if (std::fabs(y) > 10.0) continue;
      CHECK(std::fabs(q.values[i] - factor * hermite_eval(m, y)) <
            2e-3 * (1.0 + std::fabs(hermite_eval(m, y))));
    }
  }
}

TEST_CASE("similarity stepper converges at second order on an exact solution") {
  // With the nonlinear terms off, e^{(1 - m/2)(s - s0)} h_m solves the drift
  // equation exactly; the discrete error is the spatial truncation.
  const Parameters pr = derive_exponents(1.0, 1.0);
  SimilarityTerms off;
  off.use_V = off.use_B = off.use_T = off.use_R = off.use_L = false;
  const int m = 3;
  const double lam = 1.0 - 0.5 * m;
  const double s0 = 5.0, s1 = 5.4, y_max = 20.0;
  double prev = -1.0;
  for (double dy : {0.2, 0.1, 0.05}) {
    const int n = 2 * static_cast<int>(std::round(y_max / dy)) + 1;
    GridFunction q;
    q.values.resize(n);
    q.x_min = -y_max;
    q.x_max = y_max;
    q.kind = FieldKind::q;
    q.time_tag = s0;
    for (int i = 0; i < n; ++i) q.values[i] = hermite_eval(m, q.x(i));
    const SimilarityBoundaryFn exact_bc = [&](double s) {
      const double f = std::exp(lam * (s - s0));
      return std::pair<double, double>{f * hermite_eval(m, -y_max),
                                       f * hermite_eval(m, y_max)};
    };
    advance_similarity(q, s1, pr, kPure, off, exact_bc);
    const double factor = std::exp(lam * (s1 - s0));
    double err = 0.0;
    for (int i = 0; i < n; ++i) {
      if (std::fabs(q.x(i)) > 10.0) continue;
      err = std::max(err, std::fabs(q.values[i] - factor * hermite_eval(m, q.x(i))));
    }
    if (prev > 0.0) {
      CHECK(std::log2(prev / err) > 1.9);
    }
    prev = err;
  }
}

TEST_CASE("physical and similarity routes agree over one s-unit") {
  // Evolve the well-prepared state physically, transform snapshots; evolve the
  // first transformed slice with the deviation equation; compare on the bulk.
  Parameters pr = derive_exponents(1.0, 1.0);
  pr.T = std::exp(-6.0);
  SeedParams seed;
  seed.t0 = 0.0;
  FinalProfileOptions profile;
  profile.c_inner = 0.25;
  const GridFunction h0 = build_initial_h(seed, pr, GridSpec{-1.0, 1.0, 2001}, profile);

  SimOptions opts;
  opts.T_ref = pr.T;
  opts.snapshot_ds = 0.25;
  opts.s_end = 7.0 + 1e-9;
  const SimRecord record = simulate_physical(h0, pr, kPure, opts);
  REQUIRE(record.snapshots.size() >= 5);

  const SimilarityGridSpec spec{40.0, 0.05};
  GridFunction q = transform_to_similarity(record.snapshots.front(), 0.0, pr.T,
                                           pr, spec).q;
  double worst = 0.0;
  for (const auto& snap : record.snapshots) {
    const double s_snap = -std::log(pr.T - snap.time_tag);
    if (s_snap < q.time_tag + 1e-9) continue;
    if (s_snap > 7.0 + 1e-6) break;
    advance_similarity(q, s_snap, pr, kPure);
    const SimilaritySlice reference =
        transform_to_similarity(snap, snap.time_tag, pr.T, pr, spec);
    for (int i = 0; i < q.n(); ++i) {
      const double y = q.x(i);
      if (std::fabs(y) > pr.K0 * std::sqrt(s_snap)) continue;
      if (std::fabs(y) > reference.y_covered) continue;
      worst = std::max(worst, std::fabs(q.values[i] - reference.q.values[i]));
    }
  }
  CHECK(worst < 5e-3);
}

TEST_CASE("similarity step guards the positivity of phi + q") {
  const Parameters pr = derive_exponents(1.0, 1.0);
  GridFunction q;
  q.values.assign(401, -10.0);  // far below -phi
  q.x_min = -10.0;
  q.x_max = 10.0;
  q.kind = FieldKind::q;
  q.time_tag = 6.0;
  CHECK_THROWS_AS(step_similarity(q, 1e-4, pr, kPure), PositivityLossError);
}

TEST_CASE("flat state maps to w = kappa and q(0) = -kappa/(2(p-a)s)") {
  // Work at t = 0 against T = e^{-50} so the tiny gap stays representable.
  const Parameters pr = derive_exponents(1.0, 1.0);
  const double s = 50.0;
  const double gap = std::exp(-s);
  const double flat = std::sqrt(2.0 * gap);
  const GridFunction h = make_h(-1.0, 1.0, 801, [&](double) { return flat; }, 0.0);
  const SimilaritySlice slice = transform_to_similarity(
      h, 0.0, gap, pr, SimilarityGridSpec{30.0, 0.1}, 0.0, flat);
  for (int i = 0; i < slice.w.n(); ++i) {
    CHECK(std::fabs(slice.w.values[i] - pr.kappa) < 1e-13);
  }
  const int center = slice.q.n() / 2;
  CHECK(slice.q.values[center] ==
        doctest::Approx(-pr.kappa / 100.0).epsilon(1e-10));
  CHECK(slice.q.values[center] == doctest::Approx(-0.0070710678).epsilon(1e-7));
}

TEST_CASE("frame round trip reproduces the deviation at matching nodes") {
  Parameters pr = derive_exponents(1.0, 1.0);
  pr.T = std::exp(-6.0);
  FinalProfileOptions profile;
  profile.c_inner = 0.25;
  const GridFunction h =
      build_initial_h(SeedParams{0.05, 0.02, 0.0}, pr, GridSpec{-1.0, 1.0, 2001},
                      profile);
  const double t = 0.0;
  const double root = std::sqrt(pr.T - t);
  // Align the frame grid with the physical nodes so sampling is exact.
  SimilarityGridSpec spec;
  spec.dy = h.dx() / root;
  spec.y_max = 500 * spec.dy;
  const SimilaritySlice slice = transform_to_similarity(h, t, pr.T, pr, spec);
  const GridFunction h_back = transform_from_similarity(
      slice.w, slice.s, pr.T, pr, -500 * h.dx(), 500 * h.dx(), 1001);
  for (int i = 0; i < h_back.n(); ++i) {
    const double x = h_back.x(i);
    const int j = static_cast<int>(std::round((x - h.x_min) / h.dx()));
    CHECK(std::fabs(h_back.values[i] - h.values[j]) < 1e-10);
  }
  const SimilaritySlice again =
      transform_to_similarity(h_back, t, pr.T, pr, spec);
  for (int i = 0; i < again.q.n(); ++i) {
    if (std::fabs(again.q.x(i)) > again.y_covered) continue;
    CHECK(std::fabs(again.q.values[i] - slice.q.values[i]) < 1e-8);
  }
}

TEST_CASE("scale commutator vanishes at lambda = 1 and decays at second order") {
  const Parameters pr = derive_exponents(1.0, 1.0);
  auto u_bump = [](double x) { return 1.0 + 0.5 * std::exp(-8.0 * x * x); };
  {
    GridFunction u0 = make_h(-1.0, 1.0, 201, u_bump);
    u0.kind = FieldKind::u;
    CHECK(scaling_invariance_check(u0, 1.0, pr, 5e-4) == 0.0);
  }
  double prev = -1.0;
  for (int n : {201, 401, 801}) {
    GridFunction u0 = make_h(-1.0, 1.0, n, u_bump);
    u0.kind = FieldKind::u;
    const double disc = scaling_invariance_check(u0, 2.0, pr, 5e-4);
    CHECK(disc > 0.0);  // the routes discretize independently
    if (prev > 0.0) {
      CHECK(std::log2(prev / disc) > 1.9);
    }
    prev = disc;
  }
}

TEST_CASE("scale commutator ignores the time tag") {
  const Parameters pr = derive_exponents(1.0, 1.0);
  GridFunction u0 = make_h(-1.0, 1.0, 201,
                           [](double x) { return 1.0 + 0.3 * std::cos(x); });
  u0.kind = FieldKind::u;
  const double base = scaling_invariance_check(u0, 2.0, pr, 5e-4);
  u0.time_tag = 17.5;
  CHECK(scaling_invariance_check(u0, 2.0, pr, 5e-4) == base);
}

TEST_CASE("quench detection recovers symmetric and translated dips") {
  const Parameters pr = derive_exponents(1.0, 1.0);
  SimOptions opts;
  opts.h_stop = 0.02;
  // Wide dips: curvature 2 * 0.8 * 2 = 3.2 < 1/h = 5 at the bottom, so the
  // reaction wins and the dip quenches instead of diffusing away.
  {
    GridFunction h0 = make_h(-1.0, 1.0, 401, [](double x) {
      return 1.0 - 0.8 * std::exp(-2.0 * x * x);
    });
    const SimRecord record = simulate_physical(h0, pr, kPure, opts);
    CHECK(record.quenched);
    const QuenchEstimate est = detect_quench(record, pr.beta);
    CHECK(std::fabs(est.x0_est) < 1e-3);
  }
  {
    GridFunction h0 = make_h(-1.0, 1.0, 401, [](double x) {
      return 1.0 - 0.8 * std::exp(-2.0 * (x - 0.1) * (x - 0.1));
    });
    const SimRecord record = simulate_physical(h0, pr, kPure, opts);
    CHECK(record.quenched);
    const QuenchEstimate est = detect_quench(record, pr.beta);
    CHECK(std::fabs(est.x0_est - 0.1) < record.snapshots.back().dx());
  }
}

TEST_CASE("quench detection refuses non-decreasing series") {
  const Parameters pr = derive_exponents(1.0, 1.0);
  SimRecord record;
  record.snapshots.push_back(make_h(-1.0, 1.0, 11, [](double) { return 1.0; }));
  for (int k = 0; k < 10; ++k) {
    record.min_h_series.push_back({0.01 * k, 1.0, 0.0});
  }
  CHECK_THROWS_AS(detect_quench(record, pr.beta), NoQuenchError);
}

TEST_SUITE_END();
