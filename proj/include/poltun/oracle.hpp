#pragma once

// Brute-force rederivations of the closed-form results.  Everything here is
// deliberately independent of the analytic expressions it checks: paths come
// from the eigenpairs of the stiffness matrix, actions from raw Matsubara
// sums and quadrature, ensemble averages from Monte Carlo.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "poltun/instanton.hpp"
#include "poltun/rate.hpp"
#include "poltun/system.hpp"

namespace poltun::oracle {

// Distribution over the squared QED couplings g^2.
struct CouplingEnsemble {
    enum class Kind { Explicit, Uniform, Gaussian, TwoPoint };
    Kind kind = Kind::Explicit;
    std::vector<double> explicitG2;
    double lo = 0.0, hi = 0.0;   // uniform
    double mean = 0.0, sd = 0.0; // gaussian
    double v1 = 0.0, v2 = 0.0, p = 0.0; // two-point: v1 with probability p
    int count = 0;               // N couplings per draw
    std::uint64_t seed = 0;
};

struct OracleReport {
    std::string checkName;
    double maxError = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    double runtimeSeconds = 0.0;
};

// --- reproducible RNG -----------------------------------------------------
// Sample s of a run with master seed `seed` uses an mt19937_64 engine seeded
// with splitmix64(seed ^ (s+1)*0x9E3779B97F4A7C15); variate transforms are
// spelled out below so streams are identical across platforms.

std::uint64_t mix64(std::uint64_t x);
std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t streamIndex);
double uniform01(std::mt19937_64& eng); // 53-bit, in [0, 1)
double draw_g2(const CouplingEnsemble& ens, std::mt19937_64& eng); // one sample, may be < 0 for gaussian

// --- path oracle ----------------------------------------------------------
// Solves (-d^2/dtau^2 + K) phi = A e_hit delta(tau - tau1) on the infinite
// line by expanding in eigenpairs (mu_k, v_k) of the stiffness matrix:
//   phi(tau) = A sum_k (v_k^T e_hit) v_k e^{-sqrt(mu_k)|tau - tau1|} / (2 sqrt(mu_k)),
// with A fixed by phi_hit(tau1) = a.
Trajectory normal_mode_path_oracle(const SystemSpec& spec, int hitIndex,
                                   const std::vector<double>& tauGrid, double tau1 = 0.0);

// --- action oracles -------------------------------------------------------
// Raw truncated Matsubara action, no tail correction of any kind.
double matsubara_sum_oracle(const SystemSpec& spec, int hitIndex, double beta, long mMax);

// Cutoff needed so the bare-tail bound beta/(2 pi^2 M) stays below
// relTol of the full sum.
long matsubara_mmax_for(double beta, double omega0, double relTol);

// Composite Simpson over the trajectory's own graded grid (panels of four
// sub-intervals), kinetic part from analytic derivatives; Richardson
// comparison against the half-resolution rule must stay below relTol.
double numeric_action_oracle(const Trajectory& traj, const SystemSpec& spec,
                             double relTol = 1e-8);
// Same quadrature restricted to the kinetic density phi_dot^T phi_dot.
double kinetic_action_quadrature(const Trajectory& traj, const SystemSpec& spec,
                                 double relTol = 1e-8);

// --- ensemble oracle --------------------------------------------------------
struct MonteCarloResult {
    double rMean = 0.0;
    double rStdErr = 0.0;
    long rejected = 0; // draws discarded for instability or g^2 < 0
    int samples = 0;
};

// Draws `samples` coupling sets, evaluates the per-draw ensemble rate
// modification, and averages.  Rejected draws are resampled, capped at
// 100 x samples attempts overall.
MonteCarloResult monte_carlo_ensemble(const CouplingEnsemble& ens, const SystemSpec& tmpl,
                                      double s0, int samples,
                                      SpectrumMode mode = SpectrumMode::RWA);

// --- verification battery ---------------------------------------------------
struct VerifyOptions {
    double toleranceOverride = -1.0; // >= 0 replaces every check tolerance
    double omegaHScale = 1.0;        // perturbation hook used by canary tests
    std::uint64_t seed = 982451653;
    bool quick = false;              // skip the slowest cross-checks
};

// Cross-checks paths, actions, epsilon, rates, and the high-T limit for one
// spec.  Failures are data, not exceptions.
std::vector<OracleReport> run_verification(const SystemSpec& spec,
                                           const VerifyOptions& opt = {});

} // namespace poltun::oracle
