#include "poltun/rate.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace poltun {

double arithmetic_frequency(const SystemSpec& spec, int hitIndex, SpectrumMode mode) {
    require_validated(spec);
    if (hitIndex < 1 || hitIndex > spec.n())
        throw InvalidParameter("arithmetic_frequency: hitIndex out of range");
    const double li2 = spec.couplings[static_cast<size_t>(hitIndex - 1)];
    if (li2 == 0.0) return spec.omega0;
    return weighted_arithmetic_mean(polariton_spectrum(spec, mode), spec.omega0,
                                    total_lambda4(spec), li2 * li2);
}

double epsilon_finite(const SystemSpec& spec, int hitIndex, double beta, SpectrumMode mode) {
    require_validated(spec);
    if (hitIndex < 1 || hitIndex > spec.n())
        throw InvalidParameter("epsilon_finite: hitIndex out of range");
    if (beta < 0.0)
        throw InvalidParameter("epsilon_finite: negative beta");
    const double w0 = spec.omega0;
    const double li2 = spec.couplings[static_cast<size_t>(hitIndex - 1)];
    const double li4 = li2 * li2;
    if (li4 == 0.0)
        return 4.0 * w0 * w0 * std::exp(-beta * w0);

    const PolaritonSpectrum ps = polariton_spectrum(spec, mode);
    const double nl4 = total_lambda4(spec);
    const double wH = weighted_harmonic_mean(ps, w0, nl4, li4);
    const double bracket = (nl4 - li4) * w0 * std::exp(-beta * w0)
                         + li4 * (0.5 * (1.0 + ps.delta) * ps.omegaPlus * std::exp(-beta * ps.omegaPlus)
                                + 0.5 * (1.0 - ps.delta) * ps.omegaMinus * std::exp(-beta * ps.omegaMinus));
    return 4.0 * wH * bracket / nl4;
}

double epsilon_from_path(const Trajectory& traj, const SystemSpec& spec, double beta) {
    require_validated(spec);
    if (!(beta > 0.0))
        throw InvalidParameter("epsilon_from_path: beta must be positive");
    const auto contract = [&](double tau) {
        const auto d1 = traj.derivative(tau);
        const auto d2 = traj.secondDerivative(tau);
        double s = 0.0;
        for (size_t c = 0; c < d1.size(); ++c) s += d1[c] * d2[c];
        return s;
    };
    const double numerator = 2.0 * (contract(traj.hitTime - 0.5 * beta)
                                    - contract(traj.hitTime + 0.5 * beta));
    return numerator / kinetic_action_closed(traj);
}

EpsilonRatioBounds epsilon_ratio_bounds(const SystemSpec& spec, int hitIndex, double beta,
                                        const std::vector<int>& nRange, SpectrumMode mode) {
    require_validated(spec);
    if (!(beta > 0.0))
        throw InvalidParameter("epsilon_ratio_bounds: beta must be positive");
    if (nRange.empty())
        throw InvalidParameter("epsilon_ratio_bounds: empty n range");

    const double w0 = spec.omega0;
    const double li2 = spec.couplings[static_cast<size_t>(hitIndex - 1)];
    const double li4 = li2 * li2;
    const double eps0 = (li4 == 0.0)
        ? 4.0 * w0 * w0
        : 4.0 * weighted_harmonic_mean(polariton_spectrum(spec, mode), w0, total_lambda4(spec), li4)
            * weighted_arithmetic_mean(polariton_spectrum(spec, mode), w0, total_lambda4(spec), li4);

    EpsilonRatioBounds out;
    out.nValues = nRange;
    out.values.reserve(nRange.size());
    for (int n : nRange) {
        if (n < 1)
            throw InvalidParameter("epsilon_ratio_bounds: n must be positive");
        const double ratio = epsilon_finite(spec, hitIndex, beta / n, mode) / eps0;
        out.values.push_back(std::exp(static_cast<double>(n) * std::log(ratio)));
    }
    out.minValue = *std::min_element(out.values.begin(), out.values.end());
    out.maxValue = *std::max_element(out.values.begin(), out.values.end());
    return out;
}

RateBreakdown rate_modification_exact(const SystemSpec& spec,
                                      std::optional<double> s0Override, SpectrumMode mode) {
    require_validated(spec);
    const double s0 = s0Override.value_or(spec.bareAction);
    const double w0 = spec.omega0;
    const PolaritonSpectrum ps = polariton_spectrum(spec, mode);
    const double nl4 = total_lambda4(spec);

    RateBreakdown rb;
    rb.mode = mode;
    rb.s0 = s0;
    rb.perSystem.reserve(static_cast<size_t>(spec.n()));
    double sum = 0.0;
    for (int i = 1; i <= spec.n(); ++i) {
        const double li2 = spec.couplings[static_cast<size_t>(i - 1)];
        const double li4 = li2 * li2;
        RateBreakdown::PerSystem p;
        p.index = i;
        p.omegaH = weighted_harmonic_mean(ps, w0, nl4, li4);
        p.omegaA = weighted_arithmetic_mean(ps, w0, nl4, li4);
        p.action = s0 * p.omegaH / w0;
        p.factor = (p.omegaH / w0) * std::sqrt(p.omegaA / w0)
                   * std::exp(-s0 * (p.omegaH / w0 - 1.0));
        sum += p.factor;
        rb.perSystem.push_back(p);
    }
    rb.ensembleR = sum / static_cast<double>(spec.n());
    return rb;
}

double rate_modification_single(double g2ratio, double s0) {
    // physical inputs are non-negative; the closed form itself is smooth on
    // (-1, 1), which lets derivative probes straddle zero
    if (!(g2ratio > -1.0) || g2ratio >= 1.0)
        throw InvalidParameter("rate_modification_single: need g^2/(wc w0) in [0, 1)");
    return (1.0 - g2ratio) * std::exp(s0 * g2ratio);
}

double rate_single_linearized(double g2ratio, double s0) {
    return 1.0 + (s0 - 1.0) * g2ratio;
}

CumulantRate rate_modification_cumulant(const CouplingMoments& moments,
                                        const SystemSpec& spec, double s0) {
    require_validated(spec);
    const double w0wc = spec.omega0 * spec.omegaC;
    const double n = static_cast<double>(spec.n());
    const double ng2 = n * moments.meanG2;
    if (ng2 >= w0wc)
        throw RWAViolation("rate_modification_cumulant: N<g^2> >= w0 wc");

    CumulantRate out;
    out.meanH = (w0wc - ng2) / (w0wc - (n - 1.0) * moments.meanG2);
    const double h2 = out.meanH * out.meanH;
    out.varH = h2 * h2 * moments.varG2 / ((w0wc - ng2) * (w0wc - ng2));
    out.r = (out.meanH - s0 * out.varH)
            * std::exp(s0 - s0 * out.meanH + 0.5 * s0 * s0 * out.varH);
    out.rLargeN = (1.0 - moments.meanG2 / w0wc) * std::exp(s0 * moments.meanG2 / w0wc);
    return out;
}

HighTResult high_t_action(const SystemSpec& spec, double beta) {
    require_validated(spec);
    if (!(beta > 0.0))
        throw InvalidParameter("high_t_action: beta must be positive");
    const double w2 = spec.omega0 * spec.omega0 * spec.omegaC * spec.omegaC;
    const double nl4 = total_lambda4(spec);

    HighTResult out;
    out.beta = beta;
    out.perSystem.reserve(static_cast<size_t>(spec.n()));
    for (int i = 1; i <= spec.n(); ++i) {
        const double li2 = spec.couplings[static_cast<size_t>(i - 1)];
        HighTResult::PerSystem p;
        p.index = i;
        p.ratio = (w2 - nl4) / (w2 - nl4 + li2 * li2);
        p.action = beta * spec.barrierEnergy * p.ratio;
        p.prefactor = spec.omega0 * std::sqrt(p.ratio);
        out.perSystem.push_back(p);
    }
    return out;
}

namespace {

// smooth stand-in for the wall: V_n(q) = E_b [(q/a)^2 - theta(q) (q/a)^n]
struct RegularizedPotential {
    double eb, a;
    int n;

    double d1(double q) const {
        double g = 2.0 * eb * q / (a * a);
        if (q > 0.0) g -= eb * n * std::pow(q / a, n - 1) / a;
        return g;
    }
    double d2(double q) const {
        double h = 2.0 * eb / (a * a);
        if (q > 0.0) h -= eb * n * (n - 1) * std::pow(q / a, n - 2) / (a * a);
        return h;
    }
    double top() const { return a * std::pow(2.0 / n, 1.0 / (n - 2)); }
};

} // namespace

HessianSignature barrier_hessian_analysis(const SystemSpec& spec,
                                          const std::vector<int>& atBarrier) {
    return barrier_hessian_analysis(spec, 8, atBarrier);
}

HessianSignature barrier_hessian_analysis(const SystemSpec& spec, int regExponent,
                                          const std::vector<int>& atBarrier) {
    require_validated(spec);
    if (regExponent < 4 || regExponent % 2 != 0)
        throw InvalidParameter("barrier_hessian_analysis: exponent must be even and >= 4");
    const int n = spec.n();
    for (int i : atBarrier)
        if (i < 1 || i > n)
            throw InvalidParameter("barrier_hessian_analysis: quadrature index out of range");

    const RegularizedPotential pot{spec.barrierEnergy, spec.wallA, regExponent};

    Eigen::VectorXd phi = Eigen::VectorXd::Zero(n + 1);
    for (int i : atBarrier) phi(i) = pot.top();
    double xSeed = 0.0;
    for (int i = 1; i <= n; ++i) xSeed -= spec.couplings[static_cast<size_t>(i - 1)] * phi(i);
    phi(0) = xSeed / (spec.omegaC * spec.omegaC);

    const auto gradient = [&](const Eigen::VectorXd& p) {
        Eigen::VectorXd g(n + 1);
        g(0) = spec.omegaC * spec.omegaC * p(0);
        for (int i = 1; i <= n; ++i) {
            const double li2 = spec.couplings[static_cast<size_t>(i - 1)];
            g(0) += li2 * p(i);
            g(i) = pot.d1(p(i)) + li2 * p(0);
        }
        return g;
    };
    const auto hessian = [&](const Eigen::VectorXd& p) {
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n + 1, n + 1);
        h(0, 0) = spec.omegaC * spec.omegaC;
        for (int i = 1; i <= n; ++i) {
            const double li2 = spec.couplings[static_cast<size_t>(i - 1)];
            h(0, i) = h(i, 0) = li2;
            h(i, i) = pot.d2(p(i));
        }
        return h;
    };

    const double gradTol = 1e-12 * spec.barrierEnergy / spec.wallA;
    const double box = 10.0 * spec.wallA;
    bool converged = false;
    for (int iter = 0; iter < 100; ++iter) {
        const Eigen::VectorXd g = gradient(phi);
        if (g.norm() <= gradTol) { converged = true; break; }
        const Eigen::VectorXd step = hessian(phi).fullPivLu().solve(g);
        phi -= step;
        if (!phi.allFinite() || phi.cwiseAbs().maxCoeff() > box)
            throw StationaryPointNotFound("barrier_hessian_analysis: Newton left the barrier region");
    }
    if (!converged)
        throw StationaryPointNotFound("barrier_hessian_analysis: gradient did not converge");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hessian(phi));
    HessianSignature sig;
    sig.stationaryPoint.assign(phi.data(), phi.data() + n + 1);
    sig.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + n + 1);
    sig.gradientNorm = gradient(phi).norm();
    const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
    for (double ev : sig.eigenvalues)
        if (ev < -1e-10 * scale) ++sig.negativeCount;
    return sig;
}

} // namespace poltun
