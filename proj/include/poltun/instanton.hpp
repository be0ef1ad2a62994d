#pragma once

// Analytic instanton machinery.  One quadrature bounces off the wall at
// tau_1; the delta-kick of strength A that encodes the bounce is fixed by
// the wall condition q_hit(tau_1) = a.  At zero temperature the path is a
// sum of decaying exponentials in |tau - tau_1| with frequencies w0, w+, w-;
// at finite temperature the Matsubara series of the same solution gives the
// Euclidean action.

#include <complex>
#include <optional>
#include <vector>

#include "poltun/system.hpp"

namespace poltun {

// One decaying exponential  coef * exp(-freq |tau - tau1|).
struct ExpTerm {
    double coef = 0.0;
    double freq = 0.0;
};

struct Trajectory {
    std::vector<double> tauGrid;
    // values[k] = (x, q_1, ..., q_N) at tauGrid[k]
    std::vector<std::vector<double>> values;
    int hitIndex = 1;      // which quadrature bounces (1-based)
    double hitTime = 0.0;  // tau_1
    double amplitude = 0.0; // kick strength A; equals 2 a w_H at zero T

    // Exponential-sum representation per component (size N+1); exact
    // derivatives follow from it away from the kink at hitTime.
    std::vector<std::vector<ExpTerm>> terms;

    std::vector<double> evaluate(double tau) const;
    // side < 0 / > 0 selects the left/right limit at the kink; 0 means
    // "right of the kink when tau == hitTime".
    std::vector<double> derivative(double tau, int side = 0) const;
    std::vector<double> secondDerivative(double tau) const;
};

// Polaritonic response chi_P(w) = [(w^2+w0^2)(w^2+wc^2) - N<lambda^4>]^{-1}.
double chi_p(const SystemSpec& spec, double omega);

struct HarmonicFrequency {
    double omegaH = 0.0;     // coupling-weighted harmonic mean of w0, w+, w-
    double amplitudeA = 0.0; // A = 2 a omegaH
};

// w_H,i = N<l^4> / [ (N<l^4>-l_i^4)/w0
//                    + l_i^4 ( (1+d)/(2w+) + (1-d)/(2w-) ) ].
// An uncoupled bouncer (l_i^2 = 0) gives w_H = w0.
HarmonicFrequency harmonic_frequency(const SystemSpec& spec, int hitIndex,
                                     SpectrumMode mode = SpectrumMode::Exact);

// Zero-temperature instanton evaluated on tauGrid, bouncing quadrature
// hitIndex at tau1.  Components decay with w+, w-, and w0; only the
// bouncing quadrature carries the velocity kink.
Trajectory instanton_path(const SystemSpec& spec, int hitIndex,
                          const std::vector<double>& tauGrid, double tau1 = 0.0);

// Matsubara-space solution at inverse temperature beta.  Coefficients obey
// f_{-m} = conj(f_m) and decay as O(1/w_m^2); only m >= 0 is stored.  The
// kick strength defaults to the wall condition applied to the synthesized
// series (and reduces to 2 a w_H as beta -> infinity); pass `amplitude`
// to override.
struct FourierSolution {
    double beta = 0.0;
    int mMax = 0;
    int hitIndex = 1;
    double hitTime = 0.0;
    double amplitude = 0.0;
    // coefficients[m][c] for m = 0..mMax, component c = 0..N
    std::vector<std::vector<std::complex<double>>> coefficients;

    std::vector<std::complex<double>> coefficient(int m) const; // any |m| <= mMax

    // Real-space synthesis.  The slowly converging bare 1/(w0^2+w_m^2) part
    // of the bouncing component is resummed with its exact beta-periodic
    // closed form; the remaining polaritonic corrections fall off as
    // 1/w_m^6 and are summed directly.
    std::vector<double> synthesize(double tau) const;

    double omega0 = 0.0; // cached for the resummed bare part
};

FourierSolution fourier_coefficients(const SystemSpec& spec, int hitIndex,
                                     double beta, int mMax, double tau1 = 0.0,
                                     std::optional<double> amplitude = std::nullopt);

// S_E,i = S_0 * w_H,i / w0 in the beta -> infinity limit.
double action_zero_t(const SystemSpec& spec, int hitIndex,
                     SpectrumMode mode = SpectrumMode::Exact);

inline constexpr int kAdaptiveMMax = -1;

// S_E,i(beta) = 1/2 a^2 [ (1/beta) sum_m (1 + l_i^4 chi_P(w_m))
//                                        / (w0^2 + w_m^2) ]^{-1}.
// The bare part of the tail |m| > mMax is resummed exactly (coth form); the
// remaining polaritonic tail is bounded analytically and must stay below
// 1e-9 of the sum, else TruncationNotConverged.  mMax = kAdaptiveMMax picks
// the cutoff from that bound.
double action_finite_beta(const SystemSpec& spec, int hitIndex, double beta,
                          int mMax = kAdaptiveMMax);

// E(tau) = 1/2 phi_dot^T phi_dot - V_tot(phi) on the trajectory grid.  The
// kink node (if on the grid) is skipped; instantons conserve E = 0.
struct PathEnergy {
    std::vector<double> tau;
    std::vector<double> energy;
};
PathEnergy path_energy(const Trajectory& traj, const SystemSpec& spec);

// V_tot and the quadratic-form energy of an (x, q_1..q_N) point.
double potential_energy(const SystemSpec& spec, const std::vector<double>& phi);

// Exact integral of phi_dot^T phi_dot over the whole line, from the
// exponential-sum representation.  Equals the Euclidean action for a
// zero-energy path.
double kinetic_action_closed(const Trajectory& traj);

// Symmetric grid about tau1 made of panels of four sub-intervals each;
// panel widths grow geometrically from h0 by `ratio` up to hMax and the
// grid extends to |tau - tau1| >= span.
std::vector<double> graded_grid(double tau1, double h0, double ratio,
                                double hMax, double span);

// Grading tuned so composite Simpson on the grid resolves the action to
// better than 1e-8 relative; extends to 40 / w_-.
std::vector<double> default_instanton_grid(const SystemSpec& spec, double tau1 = 0.0);

} // namespace poltun
