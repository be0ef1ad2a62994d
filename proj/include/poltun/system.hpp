#pragma once

// Physical model: N metastable quadratures q_i, each in a harmonic well that
// is cut off by a wall at q_i = a (beyond it the potential drops away), all
// bilinearly coupled to a single cavity quadrature x:
//
//   V_tot = 1/2 wc^2 x^2 + sum_i [ 1/2 w0^2 q_i^2 + lambda_i^2 x q_i ],
//
// valid for q_i <= a.  Couplings are stored as the signed stiffnesses
// c_i = lambda_i^2 (energy^2); the QED coupling constant g_i enters through
// lambda_i^2 = sqrt(wc w0) g_i, so only g_i^2 = c_i^2/(w0 wc) is ever needed.

#include <vector>

#include <Eigen/Dense>

#include "poltun/errors.hpp"

namespace poltun {

struct SystemSpec {
    double omega0 = 0.0; // matter frequency w0 (energy units, hbar = 1)
    double omegaC = 0.0; // cavity frequency wc
    double wallA = 0.0;  // wall position a (quadrature units)
    std::vector<double> couplings; // signed lambda_i^2, one entry per system

    // filled in by validate_system
    double barrierEnergy = 0.0; // E_b = 1/2 w0^2 a^2
    double bareAction = 0.0;    // S_0 = 2 E_b / w0
    bool validated = false;

    int n() const { return static_cast<int>(couplings.size()); }
};

struct CouplingMoments {
    double meanLambda2 = 0.0; // <lambda^2> = sum c_i / N (signed, may vanish)
    double meanLambda4 = 0.0; // <lambda^4> = sum c_i^2 / N
    double meanG2 = 0.0;      // <g^2> = <lambda^4>/(w0 wc)
    double varG2 = 0.0;       // Var(g^2)
};

enum class SpectrumMode { Exact, RWA };

// Hybrid cavity-matter normal modes.  The N-1 matter combinations orthogonal
// to the coupling vector stay at w0 (dark states).
struct PolaritonSpectrum {
    double omegaPlus = 0.0;
    double omegaMinus = 0.0;
    double delta = 0.0;         // detuning parameter, in [-1, 1]
    int darkCount = 0;          // N - 1
    double darkFrequency = 0.0; // w0
    SpectrumMode mode = SpectrumMode::Exact;

    double rabiSplitting() const { return omegaPlus - omegaMinus; }
};

// Checks positivity of w0, wc, a, a non-empty coupling list, and the
// collective stability condition N<lambda^4> < w0^2 wc^2 (strict: at
// equality w- = 0 and the instanton integrals diverge).  On success returns
// the spec with E_b and S_0 cached.
SystemSpec validate_system(SystemSpec spec);

void require_validated(const SystemSpec& spec);

// N <lambda^4> = sum_i c_i^2
double total_lambda4(const SystemSpec& spec);

CouplingMoments coupling_moments(const SystemSpec& spec);

// Exact mode:  w±^2 = (w0^2+wc^2)/2 ± 1/2 sqrt(4N<l^4> + (w0^2-wc^2)^2),
//              delta = (w0^2-wc^2)/(w+^2-w-^2).
// RWA mode:    w±   = (wc+w0)/2 ± sqrt(N<g^2> + (wc-w0)^2/4),
//              delta = (w0-wc)/(w+-w-),
// which keeps the weighted means of 1/w± and w± in closed form.  Degenerate
// 0/0 cases (resonance, or fully uncoupled) give delta = 0 resp. ±1.
PolaritonSpectrum polariton_spectrum(const SystemSpec& spec,
                                     SpectrumMode mode = SpectrumMode::Exact);

// Quadratic-form matrix of V_tot in the (x, q_1..q_N) basis:
// K[0][0] = wc^2, K[i][i] = w0^2, K[0][i] = K[i][0] = lambda_i^2.
// Its eigenvalues are {w+^2, w-^2} plus w0^2 with multiplicity N-1.
Eigen::MatrixXd stiffness_matrix(const SystemSpec& spec);

// Coupling-weighted means over {w0, w+, w-}: weight (N<l^4>-l_i^4) on the
// dark frequency w0 and l_i^4 (1±delta)/2 on w±.  The harmonic one sets the
// kick amplitude and the action, the arithmetic one the fluctuation
// prefactor.  Both collapse to w0 for an uncoupled bouncer.
double weighted_harmonic_mean(const PolaritonSpectrum& ps, double omega0,
                              double totalL4, double li4);
double weighted_arithmetic_mean(const PolaritonSpectrum& ps, double omega0,
                                double totalL4, double li4);

} // namespace poltun
