// One check per quantitatively testable lemma: kernel closed forms and
// dilation, L1 decay exponents, definition equivalence, uniform-over-annuli
// bounds, commutation, PV identity, and the solution-suite bundle.
#pragma once

#include "sqg/data_gen.hpp"
#include "sqg/report.hpp"
#include "sqg/solver.hpp"

namespace sqg {

// g_alpha(1,.) against the Gaussian (alpha=1) and Poisson (alpha=1/2) closed
// forms over r in [0, 8]; also reports per-profile build time.
DiagnosticsReport check_closed_forms(int n_samples = 1280);

// Dilated t=1 profile against a direct t=4 Fourier inversion.
DiagnosticsReport check_dilation(double alpha, double nu = 1.0);

// Fitted log-log time slopes of ||grad g||_1, ||K*grad g||_1, ||Lambda g||_1,
// ||Lambda^{2a} grad g||_1 over t in {1/4,...,4}.
DiagnosticsReport check_decay_rates(double alpha, double nu = 1.0, int n = 256,
                                    double domain = 40.0);

// Spectral vs singular-integral fractional Laplacian on band-limited data.
DiagnosticsReport check_lambda_equivalence(double alpha);

// sup over an (r,R) log-grid of the truncated PV convolution, plus the decay
// of outer-shell increments. gate_monotone controls whether the tail row gates.
DiagnosticsReport check_uniform_annuli(const ScalarField& f, const std::string& tag,
                                       bool gate_monotone);

// || g(t)*(PV K*f) - PV K*(g(t)*f) ||_inf / ||f||_inf at one domain size.
double commutation_discrepancy(const ScalarField& f, double t, double alpha, double nu);
DiagnosticsReport check_commutation(const ScalarField& f, double t, double alpha, double nu,
                                    const std::string& tag);

// PV identity and commutation discrepancies across doubled domains (the
// whole-plane proxy study); sizes are domain lengths at fixed resolution.
DiagnosticsReport check_domain_convergence(const std::vector<double>& sizes, double h,
                                           double alpha, double nu);

// Bundled invariants of a continuation run: maximum principle, mean and L2
// behavior, divergence, Gronwall velocity bound, constitutive and LP drift.
DiagnosticsReport check_solution_suite(const GlobalSolution& run, const SolverConfig& cfg);

// Outer-difference contraction ratios at the size-condition tau, plus an
// informational above-condition rerun.
DiagnosticsReport check_contraction(const ScalarField& theta0, const VectorField& u0,
                                    const SolverConfig& cfg);

// Pointwise PDE residual of a solved segment (interior nodes).
double pde_residual_linf(const TrajectorySegment& seg, const SolverConfig& cfg);

// Residual must drop >= 3x when the node count doubles (16 -> 32).
DiagnosticsReport check_residual_convergence(const ScalarField& theta0, const VectorField& u0,
                                             SolverConfig cfg, double tau);

// Two runs from data differing by delta stay within K*delta, K <= 2.
DiagnosticsReport check_stability(const ScalarField& theta0, const VectorField& u0,
                                  const SolverConfig& cfg);

// Iterated first derivatives against spectral differentiation of the solved
// trajectory, plus the C^1 bound.
DiagnosticsReport check_derivative_propagation(const TrajectorySegment& seg,
                                               const SolverConfig& cfg);

// Holder-gain: diffusion smoothing exponent on seeded rough data, plus
// refinement stability of the run-calibrated envelope constants.
DiagnosticsReport check_holder_gain(const GlobalSolution& coarse, const GlobalSolution& fine,
                                    const SolverConfig& cfg_coarse);
DiagnosticsReport check_holder_diffusion_exponent(double alpha, double nu, const GridSpec& spec,
                                                  std::uint64_t seed);

// Schedule structure: S_n increasing, tau_n >= tau_1 exp(-lambda S_{n-1}),
// interval-count budget. Capped final intervals are excluded from the
// exponential lower bound.
DiagnosticsReport check_schedule(const GlobalSolution& run, const SolverConfig& cfg,
                                 double t_requested, int max_intervals);

}  // namespace sqg
