#pragma once

// Tunneling-rate modifications.  Absolute rates are never produced; every
// result is a ratio against the uncoupled system, so fluctuation
// determinants and the 2*pi bookkeeping cancel throughout.

#include <optional>
#include <vector>

#include "poltun/instanton.hpp"
#include "poltun/system.hpp"

namespace poltun {

struct RateBreakdown {
    struct PerSystem {
        int index = 0;       // which quadrature bounces (1-based)
        double omegaH = 0.0;
        double omegaA = 0.0;
        double action = 0.0; // S_E,i = S_0 w_H/w0
        double factor = 0.0; // (w_H/w0) sqrt(w_A/w0) exp[-S_0 (w_H/w0 - 1)]
    };
    std::vector<PerSystem> perSystem;
    double ensembleR = 0.0; // mean of the factors over the N couplings
    SpectrumMode mode = SpectrumMode::Exact;
    double s0 = 0.0;
};

struct HighTResult {
    struct PerSystem {
        int index = 0;
        double ratio = 0.0;     // (w0 wc - N<g^2>) / (w0 wc - (N<g^2> - g_i^2))
        double action = 0.0;    // beta E_b * ratio
        double prefactor = 0.0; // proportional to w0 sqrt(ratio)
    };
    std::vector<PerSystem> perSystem;
    double beta = 0.0;
};

// w_A,i = [ (N<l^4>-l_i^4) w0 + l_i^4 ((1+d)w+/2 + (1-d)w-/2) ] / N<l^4>.
// Equals w0 exactly in RWA mode and for an uncoupled bouncer.
double arithmetic_frequency(const SystemSpec& spec, int hitIndex,
                            SpectrumMode mode = SpectrumMode::Exact);

// Finite-temperature correction to the zero-mode eigenvalue,
//   eps_i(beta) = 4 w_H,i / (N<l^4>) [ (N<l^4>-l_i^4) w0 e^{-beta w0}
//       + l_i^4 ( (1+d)/2 w+ e^{-beta w+} + (1-d)/2 w- e^{-beta w-} ) ],
// with eps_i(0) = 4 w_A,i w_H,i and the uncoupled limit 4 w0^2 e^{-beta w0}.
double epsilon_finite(const SystemSpec& spec, int hitIndex, double beta,
                      SpectrumMode mode = SpectrumMode::Exact);

// Same correction from the instanton path itself:
//   eps = 2 [ phi_dot^T phi_ddot(-beta/2) - phi_dot^T phi_ddot(beta/2) ]
//         / integral phi_dot^T phi_dot dtau,
// boundary points taken relative to the hitting time.
double epsilon_from_path(const Trajectory& traj, const SystemSpec& spec, double beta);

// The sequence [eps(beta/n)/eps(0)]^n stays pinched between constants for
// fixed beta; minValue/maxValue report the empirical bounds.
struct EpsilonRatioBounds {
    std::vector<int> nValues;
    std::vector<double> values;
    double minValue = 0.0;
    double maxValue = 0.0;
};
EpsilonRatioBounds epsilon_ratio_bounds(const SystemSpec& spec, int hitIndex, double beta,
                                        const std::vector<int>& nRange,
                                        SpectrumMode mode = SpectrumMode::Exact);

// r = < (w_H/w0) sqrt(w_A/w0) exp[-S_0 (w_H/w0 - 1)] >, the mean running
// over which quadrature bounces.  S_0 defaults to the spec's bare action.
RateBreakdown rate_modification_exact(const SystemSpec& spec,
                                      std::optional<double> s0Override = std::nullopt,
                                      SpectrumMode mode = SpectrumMode::Exact);

// Single system under the RWA: r = (1 - rho) exp(S_0 rho), rho = g^2/(wc w0).
double rate_modification_single(double g2ratio, double s0);

// Lowest order in the coupling: r ~ 1 + (S_0 - 1) rho.
double rate_single_linearized(double g2ratio, double s0);

// Second-order cumulant expansion of the ensemble average (RWA regime),
// plus the simplified large-N closed form.
struct CumulantRate {
    double r = 0.0;
    double rLargeN = 0.0; // (1 - <g^2>/wc w0) exp(S_0 <g^2>/wc w0)
    double meanH = 0.0;   // <w_H/w0>
    double varH = 0.0;    // Var(w_H/w0)
};
CumulantRate rate_modification_cumulant(const CouplingMoments& moments,
                                        const SystemSpec& spec, double s0);

// High-temperature (thermal activation) limit, only the m = 0 Matsubara
// term survives: S_E,i = beta E_b * ratio_i, prefactor ~ w0 sqrt(ratio_i).
HighTResult high_t_action(const SystemSpec& spec, double beta);

// Stationary-point classification of the smooth barrier
//   V_n(q) = E_b [ (q/a)^2 - theta(q) (q/a)^n ],
// coupled through the cavity as in V_tot.  Newton root-finding on the
// gradient starts from the given configuration (quadratures listed in
// atBarrier sit at the uncoupled barrier top, the rest at the minimum).
struct HessianSignature {
    std::vector<double> stationaryPoint; // (x, q_1..q_N)
    std::vector<double> eigenvalues;     // ascending
    int negativeCount = 0;
    double gradientNorm = 0.0;
};
HessianSignature barrier_hessian_analysis(const SystemSpec& spec, int regExponent,
                                          const std::vector<int>& atBarrier);
HessianSignature barrier_hessian_analysis(const SystemSpec& spec,
                                          const std::vector<int>& atBarrier);

} // namespace poltun
