// Time integration of the quenching equation dh/dt = Lap(h) - F(h) on a
// bounded interval with Dirichlet data, the change of variables to the
// similarity frame (y, s) = (x/sqrt(T-t), -log(T-t)), and the evolution of
// the deviation q = w - phi in that frame. Explicit RK2 with a dual step
// limit: the diffusion CFL and the reaction clock (min h)^{beta+1}.
#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "quench/grid.hpp"
#include "quench/params.hpp"

namespace quench {

struct PositivityLossError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoQuenchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct OutOfRegimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ForcingKind { pure_power, vortex };

// F(h) = h^{-beta} for pure_power; the vortex variant adds the boundary-field
// correction -H0 e^{-h}, which vanishes faster than h^{-beta} at quenching.
struct Forcing {
  ForcingKind kind = ForcingKind::pure_power;
  double vortex_H0 = 1.0;
  double F(double h, double beta) const;
  // Perturbation of the pure power u^p in the blowup frame, f(u) - u^p.
  double f_tilde(double u, const Parameters& params) const;
};

using SourceFn = std::function<double(double x, double t)>;
using BoundaryFn = std::function<std::pair<double, double>(double t)>;

struct StepControl {
  double cfl_diffusion = 0.25;   // dt <= cfl_diffusion * dx^2
  double cfl_reaction = 0.05;    // dt <= cfl_reaction * (min h)^{beta+1}
  double dt_floor = 1e-14;       // below this the state counts as quenched
};

enum class StepStatus { accepted, quench_signal };

// One accepted RK2 step; h.time_tag advances by the chosen dt. Positivity is
// enforced by halving dt, and exhaustion of that loop is the quench signal.
StepStatus step_physical(GridFunction& h, double dt_max, const Parameters& params,
                         const Forcing& forcing, const StepControl& control = {},
                         const SourceFn& source = nullptr,
                         const BoundaryFn& boundary = nullptr);

struct MinHSample {
  double t;
  double min_h;
  double argmin_x;
};

struct SimRecord {
  std::vector<GridFunction> snapshots;
  std::vector<MinHSample> min_h_series;
  std::optional<double> estimated_T;
  std::optional<double> estimated_x0;
  bool quenched = false;
};

struct SimOptions {
  double h_stop = 5e-4;  // min-h threshold treated as quenching
  double t_max = std::numeric_limits<double>::infinity();
  double dt_max = std::numeric_limits<double>::infinity();
  StepControl control;
  // Snapshots at uniform spacing in s = -log(T_ref - t) when T_ref is finite.
  double T_ref = std::numeric_limits<double>::quiet_NaN();
  double snapshot_ds = 0.05;
  double s_end = std::numeric_limits<double>::infinity();
  // Stop at s_end when true; otherwise keep stepping freely (no s-clamp, no
  // further s-snapshots) until quenching or t_max.
  bool stop_at_s_end = true;
  long max_steps = 20000000;
  SourceFn source;
  BoundaryFn boundary;
};

SimRecord simulate_physical(GridFunction h0, const Parameters& params,
                            const Forcing& forcing, const SimOptions& options = {});

// Quench time by extrapolating the flat law (min h)^{beta+1}/(beta+1) = T - t
// over the last decade of min h, and quench point by sub-grid parabolic
// refinement of the final argmin. Throws NoQuenchError without a decreasing
// tail.
struct QuenchEstimate {
  double T_est;
  double x0_est;
};
QuenchEstimate detect_quench(const SimRecord& record, double beta);

// One slice of the similarity frame. Points with |x| beyond the physical
// domain carry the image of the Dirichlet data; y_covered marks the largest
// |y| backed by actual samples.
struct SimilaritySlice {
  GridFunction w;
  GridFunction q;
  double s = 0.0;
  double y_covered = 0.0;
};

struct SimilarityGridSpec {
  double y_max = 40.0;
  double dy = 0.05;
};

SimilaritySlice transform_to_similarity(const GridFunction& h, double t, double T_est,
                                        const Parameters& params,
                                        const SimilarityGridSpec& spec = {},
                                        double x0 = 0.0, double h_boundary = 1.0);

// Inverse map: rebuild h on the given x-grid from a w-slice. Used by the
// round-trip check.
GridFunction transform_from_similarity(const GridFunction& w, double s, double T,
                                       const Parameters& params, double x_min,
                                       double x_max, int n, double x0 = 0.0);

// Term toggles for the q-equation (testing hooks; all on in production).
struct SimilarityTerms {
  bool use_V = true;
  bool use_B = true;
  bool use_T = true;
  bool use_R = true;
  bool use_L = true;
};

using SimilarityBoundaryFn = std::function<std::pair<double, double>(double s)>;

// One RK2 step of dq/ds = (L + V) q + B(q) + T(q) + R + L(q). Throws
// PositivityLossError when phi + q stops being positive.
void step_similarity(GridFunction& q, double ds, const Parameters& params,
                     const Forcing& forcing, const SimilarityTerms& terms = {},
                     const SimilarityBoundaryFn& boundary = nullptr,
                     double h_boundary = 1.0);

// Advance a q-slice to s_target with automatic stable substeps.
void advance_similarity(GridFunction& q, double s_target, const Parameters& params,
                        const Forcing& forcing, const SimilarityTerms& terms = {},
                        const SimilarityBoundaryFn& boundary = nullptr,
                        double h_boundary = 1.0);

// Sup-norm commutator of evolve-then-rescale vs rescale-then-evolve for the
// scale symmetry u_lambda(x, t) = lambda^{2/(p-1)} u(lambda x, lambda^2 t) of
// the pure-power blowup equation. Measured on |x| <= window / lambda.
double scaling_invariance_check(const GridFunction& u0, double lambda,
                                const Parameters& params, double horizon,
                                double window = 0.5);

}  // namespace quench
