#include "poltun/system.hpp"

#include <cmath>

namespace poltun {

SystemSpec validate_system(SystemSpec spec) {
    if (!(spec.omega0 > 0.0))
        throw InvalidParameter("validate_system: omega0 must be positive");
    if (!(spec.omegaC > 0.0))
        throw InvalidParameter("validate_system: omegaC must be positive");
    if (!(spec.wallA > 0.0))
        throw InvalidParameter("validate_system: wallA must be positive");
    if (spec.couplings.empty())
        throw InvalidParameter("validate_system: coupling list is empty");
    for (double c : spec.couplings)
        if (!std::isfinite(c))
            throw InvalidParameter("validate_system: non-finite coupling");

    const double w0c2 = spec.omega0 * spec.omega0 * spec.omegaC * spec.omegaC;
    if (total_lambda4(spec) >= w0c2)
        throw UnstableSystem("validate_system: N<lambda^4> >= w0^2 wc^2");

    spec.barrierEnergy = 0.5 * spec.omega0 * spec.omega0 * spec.wallA * spec.wallA;
    spec.bareAction = 2.0 * spec.barrierEnergy / spec.omega0;
    spec.validated = true;
    return spec;
}

void require_validated(const SystemSpec& spec) {
    if (!spec.validated)
        throw InvalidParameter("spec must pass validate_system first");
}

double total_lambda4(const SystemSpec& spec) {
    double sum = 0.0;
    for (double c : spec.couplings) sum += c * c;
    return sum;
}

CouplingMoments coupling_moments(const SystemSpec& spec) {
    require_validated(spec);
    const double n = static_cast<double>(spec.n());
    double s1 = 0.0, s2 = 0.0, s4 = 0.0;
    for (double c : spec.couplings) {
        s1 += c;
        s2 += c * c;
        s4 += c * c * c * c;
    }
    CouplingMoments m;
    m.meanLambda2 = s1 / n;
    m.meanLambda4 = s2 / n;
    const double w0wc = spec.omega0 * spec.omegaC;
    m.meanG2 = m.meanLambda4 / w0wc;
    const double meanG4 = (s4 / n) / (w0wc * w0wc);
    m.varG2 = meanG4 - m.meanG2 * m.meanG2;
    if (m.varG2 < 0.0) m.varG2 = 0.0; // guard round-off on equal couplings
    return m;
}

PolaritonSpectrum polariton_spectrum(const SystemSpec& spec, SpectrumMode mode) {
    require_validated(spec);
    const double w02 = spec.omega0 * spec.omega0;
    const double wc2 = spec.omegaC * spec.omegaC;
    const double nl4 = total_lambda4(spec);

    PolaritonSpectrum s;
    s.mode = mode;
    s.darkCount = spec.n() - 1;
    s.darkFrequency = spec.omega0;

    if (mode == SpectrumMode::Exact) {
        const double split = std::sqrt(4.0 * nl4 + (w02 - wc2) * (w02 - wc2));
        const double wp2 = 0.5 * (w02 + wc2) + 0.5 * split;
        const double wm2 = 0.5 * (w02 + wc2) - 0.5 * split;
        if (!(wm2 > 0.0))
            throw UnstableSystem("polariton_spectrum: w-^2 <= 0");
        s.omegaPlus = std::sqrt(wp2);
        s.omegaMinus = std::sqrt(wm2);
        s.delta = (split > 0.0) ? (w02 - wc2) / split : 0.0;
    } else {
        const double ng2 = nl4 / (spec.omega0 * spec.omegaC);
        const double half = std::sqrt(ng2 + 0.25 * (spec.omegaC - spec.omega0) * (spec.omegaC - spec.omega0));
        s.omegaPlus = 0.5 * (spec.omegaC + spec.omega0) + half;
        s.omegaMinus = 0.5 * (spec.omegaC + spec.omega0) - half;
        if (!(s.omegaMinus > 0.0))
            throw UnstableSystem("polariton_spectrum: RWA w- <= 0");
        s.delta = (half > 0.0) ? (spec.omega0 - spec.omegaC) / (2.0 * half) : 0.0;
    }
    return s;
}

double weighted_harmonic_mean(const PolaritonSpectrum& ps, double omega0,
                              double totalL4, double li4) {
    if (li4 == 0.0) return omega0;
    const double polWeight = 0.5 * (1.0 + ps.delta) / ps.omegaPlus
                           + 0.5 * (1.0 - ps.delta) / ps.omegaMinus;
    return totalL4 / ((totalL4 - li4) / omega0 + li4 * polWeight);
}

double weighted_arithmetic_mean(const PolaritonSpectrum& ps, double omega0,
                                double totalL4, double li4) {
    if (li4 == 0.0) return omega0;
    const double polMean = 0.5 * (1.0 + ps.delta) * ps.omegaPlus
                         + 0.5 * (1.0 - ps.delta) * ps.omegaMinus;
    return ((totalL4 - li4) * omega0 + li4 * polMean) / totalL4;
}

Eigen::MatrixXd stiffness_matrix(const SystemSpec& spec) {
    require_validated(spec);
    const int n = spec.n();
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n + 1, n + 1);
    k(0, 0) = spec.omegaC * spec.omegaC;
    for (int i = 1; i <= n; ++i) {
        k(i, i) = spec.omega0 * spec.omega0;
        k(0, i) = k(i, 0) = spec.couplings[static_cast<size_t>(i - 1)];
    }
    return k;
}

} // namespace poltun
