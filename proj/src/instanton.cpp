#include "poltun/instanton.hpp"

#include <algorithm>
#include <cmath>

namespace poltun {

namespace {

double eval_terms(const std::vector<ExpTerm>& terms, double absDt) {
    double v = 0.0;
    for (const auto& t : terms) v += t.coef * std::exp(-t.freq * absDt);
    return v;
}

} // namespace

std::vector<double> Trajectory::evaluate(double tau) const {
    const double absDt = std::abs(tau - hitTime);
    std::vector<double> phi(terms.size());
    for (size_t c = 0; c < terms.size(); ++c) phi[c] = eval_terms(terms[c], absDt);
    return phi;
}

std::vector<double> Trajectory::derivative(double tau, int side) const {
    const double dt = tau - hitTime;
    double sign;
    if (dt > 0.0) sign = -1.0;
    else if (dt < 0.0) sign = 1.0;
    else sign = (side < 0) ? 1.0 : -1.0;
    const double absDt = std::abs(dt);
    std::vector<double> v(terms.size());
    for (size_t c = 0; c < terms.size(); ++c) {
        double s = 0.0;
        for (const auto& t : terms[c]) s += sign * t.coef * t.freq * std::exp(-t.freq * absDt);
        v[c] = s;
    }
    return v;
}

std::vector<double> Trajectory::secondDerivative(double tau) const {
    const double absDt = std::abs(tau - hitTime);
    std::vector<double> v(terms.size());
    for (size_t c = 0; c < terms.size(); ++c) {
        double s = 0.0;
        for (const auto& t : terms[c]) s += t.coef * t.freq * t.freq * std::exp(-t.freq * absDt);
        v[c] = s;
    }
    return v;
}

double chi_p(const SystemSpec& spec, double omega) {
    require_validated(spec);
    const double w2 = omega * omega;
    const double denom = (w2 + spec.omega0 * spec.omega0) * (w2 + spec.omegaC * spec.omegaC)
                         - total_lambda4(spec);
    if (denom <= 0.0)
        throw DivergentResponse("chi_p: non-positive denominator");
    return 1.0 / denom;
}

HarmonicFrequency harmonic_frequency(const SystemSpec& spec, int hitIndex, SpectrumMode mode) {
    require_validated(spec);
    if (hitIndex < 1 || hitIndex > spec.n())
        throw InvalidParameter("harmonic_frequency: hitIndex out of range");
    const double li2 = spec.couplings[static_cast<size_t>(hitIndex - 1)];
    HarmonicFrequency hf;
    if (li2 == 0.0) {
        hf.omegaH = spec.omega0; // uncoupled bouncer: the bare bounce
    } else {
        hf.omegaH = weighted_harmonic_mean(polariton_spectrum(spec, mode), spec.omega0,
                                           total_lambda4(spec), li2 * li2);
    }
    hf.amplitudeA = 2.0 * spec.wallA * hf.omegaH;
    return hf;
}

Trajectory instanton_path(const SystemSpec& spec, int hitIndex,
                          const std::vector<double>& tauGrid, double tau1) {
    require_validated(spec);
    const int n = spec.n();
    if (hitIndex < 1 || hitIndex > n)
        throw InvalidParameter("instanton_path: hitIndex out of range");

    const HarmonicFrequency hf = harmonic_frequency(spec, hitIndex);
    const double a = hf.amplitudeA;
    const double w0 = spec.omega0;
    const double lh2 = spec.couplings[static_cast<size_t>(hitIndex - 1)];
    const double lh4 = lh2 * lh2;

    Trajectory traj;
    traj.hitIndex = hitIndex;
    traj.hitTime = tau1;
    traj.amplitude = a;
    traj.terms.assign(static_cast<size_t>(n + 1), {});

    if (lh4 == 0.0) {
        // decoupled: the bare bounce in the hit quadrature, everything else flat
        traj.terms[static_cast<size_t>(hitIndex)] = {{a / (2.0 * w0), w0}};
    } else {
        const PolaritonSpectrum ps = polariton_spectrum(spec, SpectrumMode::Exact);
        const double wp = ps.omegaPlus, wm = ps.omegaMinus, d = ps.delta;
        const double nl4 = total_lambda4(spec);

        // cavity: A l^2 sqrt((1-d^2)/(4 N<l^4>)) (e^{-w+|t|}/(2w+) - e^{-w-|t|}/(2w-)),
        // the prefactor being 1/(w+^2 - w-^2) in disguise
        const double cx = a * lh2 * std::sqrt((1.0 - d * d) / (4.0 * nl4));
        traj.terms[0] = {{cx / (2.0 * wp), wp}, {-cx / (2.0 * wm), wm}};

        // f(t) = (1+d)/2 e^{-w+|t|}/(2w+) + (1-d)/2 e^{-w-|t|}/(2w-) - e^{-w0|t|}/(2w0)
        const auto fTerms = [&](double weight) -> std::vector<ExpTerm> {
            return {{weight * (1.0 + d) / (4.0 * wp), wp},
                    {weight * (1.0 - d) / (4.0 * wm), wm},
                    {-weight / (2.0 * w0), w0}};
        };
        for (int j = 1; j <= n; ++j) {
            const double lj2 = spec.couplings[static_cast<size_t>(j - 1)];
            if (j == hitIndex) {
                auto t = fTerms(a * lh4 / nl4);
                t[2].coef += a / (2.0 * w0); // bare bounce on top of the f-part
                traj.terms[static_cast<size_t>(j)] = std::move(t);
            } else if (lj2 != 0.0) {
                traj.terms[static_cast<size_t>(j)] = fTerms(a * lh2 * lj2 / nl4);
            }
        }
    }

    traj.tauGrid = tauGrid;
    traj.values.reserve(tauGrid.size());
    for (double tau : tauGrid) traj.values.push_back(traj.evaluate(tau));
    return traj;
}

std::vector<std::complex<double>> FourierSolution::coefficient(int m) const {
    const int am = std::abs(m);
    if (am > mMax)
        throw InvalidParameter("FourierSolution::coefficient: |m| > mMax");
    auto c = coefficients[static_cast<size_t>(am)];
    if (m < 0)
        for (auto& z : c) z = std::conj(z);
    return c;
}

std::vector<double> FourierSolution::synthesize(double tau) const {
    const size_t nComp = coefficients.front().size();
    // wrap into the principal period around the kick
    double dt = tau - hitTime;
    dt -= beta * std::round(dt / beta);
    const double absDt = std::abs(dt);

    std::vector<double> phi(nComp, 0.0);

    // exact beta-periodic bare response of the bouncing quadrature:
    // A [e^{-w0|dt|} + e^{-w0(beta-|dt|)}] / (2 w0 (1 - e^{-beta w0}))
    const double damp = std::exp(-beta * omega0);
    phi[static_cast<size_t>(hitIndex)] =
        amplitude * (std::exp(-omega0 * absDt) + std::exp(-omega0 * (beta - absDt)))
        / (2.0 * omega0 * (1.0 - damp));

    for (int m = 0; m <= mMax; ++m) {
        const double wm = 2.0 * M_PI * static_cast<double>(m) / beta;
        const std::complex<double> bare =
            (amplitude / beta) / (omega0 * omega0 + wm * wm)
            * std::exp(std::complex<double>(0.0, -wm * hitTime));
        const std::complex<double> phase =
            std::exp(std::complex<double>(0.0, wm * tau));
        const double weight = (m == 0) ? 1.0 : 2.0;
        for (size_t c = 0; c < nComp; ++c) {
            std::complex<double> corr = coefficients[static_cast<size_t>(m)][c];
            if (c == static_cast<size_t>(hitIndex)) corr -= bare;
            phi[c] += weight * std::real(corr * phase);
        }
    }
    return phi;
}

FourierSolution fourier_coefficients(const SystemSpec& spec, int hitIndex, double beta,
                                     int mMax, double tau1, std::optional<double> amplitude) {
    require_validated(spec);
    const int n = spec.n();
    if (hitIndex < 1 || hitIndex > n)
        throw InvalidParameter("fourier_coefficients: hitIndex out of range");
    if (!(beta > 0.0))
        throw InvalidParameter("fourier_coefficients: beta must be positive");
    if (mMax < 1)
        throw InvalidParameter("fourier_coefficients: mMax must be >= 1");

    const double w0 = spec.omega0;
    const double lh2 = spec.couplings[static_cast<size_t>(hitIndex - 1)];

    FourierSolution fs;
    fs.beta = beta;
    fs.mMax = mMax;
    fs.hitIndex = hitIndex;
    fs.hitTime = tau1;
    fs.omega0 = w0;
    fs.amplitude = 1.0; // scaled after the wall condition is applied

    fs.coefficients.resize(static_cast<size_t>(mMax + 1));
    for (int m = 0; m <= mMax; ++m) {
        const double wm = 2.0 * M_PI * static_cast<double>(m) / beta;
        const double chi = chi_p(spec, wm);
        const double bare = 1.0 / (w0 * w0 + wm * wm);
        const std::complex<double> phase =
            (1.0 / beta) * std::exp(std::complex<double>(0.0, -wm * tau1));

        auto& row = fs.coefficients[static_cast<size_t>(m)];
        row.assign(static_cast<size_t>(n + 1), {0.0, 0.0});
        row[0] = -lh2 * chi * phase;
        for (int j = 1; j <= n; ++j) {
            const double lj2 = spec.couplings[static_cast<size_t>(j - 1)];
            if (j == hitIndex)
                row[static_cast<size_t>(j)] = bare * (1.0 + lh2 * lh2 * chi) * phase;
            else
                row[static_cast<size_t>(j)] = bare * lh2 * lj2 * chi * phase;
        }
    }

    double kick;
    if (amplitude) {
        kick = *amplitude;
    } else {
        // wall condition q_hit(tau1) = a applied to the synthesized series
        const double unit = fs.synthesize(tau1)[static_cast<size_t>(hitIndex)];
        kick = spec.wallA / unit;
    }
    fs.amplitude = kick;
    for (auto& row : fs.coefficients)
        for (auto& z : row) z *= kick;
    return fs;
}

double action_zero_t(const SystemSpec& spec, int hitIndex, SpectrumMode mode) {
    require_validated(spec);
    return spec.bareAction * harmonic_frequency(spec, hitIndex, mode).omegaH / spec.omega0;
}

double action_finite_beta(const SystemSpec& spec, int hitIndex, double beta, int mMax) {
    require_validated(spec);
    if (hitIndex < 1 || hitIndex > spec.n())
        throw InvalidParameter("action_finite_beta: hitIndex out of range");
    if (!(beta > 0.0))
        throw InvalidParameter("action_finite_beta: beta must be positive");

    const double w0 = spec.omega0;
    const double li2 = spec.couplings[static_cast<size_t>(hitIndex - 1)];
    const double li4 = li2 * li2;
    const double relTol = 1e-9;

    // (1/beta) sum_m 1/(w0^2+w_m^2) in closed form; the polaritonic
    // l_i^4 chi_P part is summed term by term, its tail falls as 1/w_m^6.
    const double bareSum = 1.0 / (2.0 * w0 * std::tanh(0.5 * beta * w0));

    const auto polTerm = [&](int m) {
        const double wm = 2.0 * M_PI * static_cast<double>(m) / beta;
        return li4 * chi_p(spec, wm) / (w0 * w0 + wm * wm);
    };
    // tail bound: (2/beta) sum_{m>M} l^4 / w_m^6 <= l^4 beta^5 / (160 pi^6 M^5)
    const auto tailBound = [&](int m) {
        const double pi6 = std::pow(M_PI, 6);
        return li4 * std::pow(beta, 5) / (160.0 * pi6 * std::pow(static_cast<double>(m), 5));
    };

    double polSum = li4 * chi_p(spec, 0.0) / (w0 * w0);
    int m = 0;
    const auto converged = [&](int atM) {
        return atM >= 1 && tailBound(atM) <= relTol * (bareSum + polSum / beta);
    };
    if (mMax == kAdaptiveMMax) {
        while (!converged(m)) {
            ++m;
            polSum += 2.0 * polTerm(m);
            if (m > (1 << 26))
                throw TruncationNotConverged("action_finite_beta: adaptive cutoff ran away");
        }
    } else {
        for (m = 1; m <= mMax; ++m) polSum += 2.0 * polTerm(m);
        m = mMax;
        if (li4 > 0.0 && !converged(m))
            throw TruncationNotConverged("action_finite_beta: tail bound above 1e-9 of the sum");
    }

    const double total = bareSum + polSum / beta;
    const double a = spec.wallA;
    return 0.5 * a * a / total;
}

double potential_energy(const SystemSpec& spec, const std::vector<double>& phi) {
    const double x = phi[0];
    double v = 0.5 * spec.omegaC * spec.omegaC * x * x;
    for (int i = 1; i <= spec.n(); ++i) {
        const double q = phi[static_cast<size_t>(i)];
        v += 0.5 * spec.omega0 * spec.omega0 * q * q
             + spec.couplings[static_cast<size_t>(i - 1)] * x * q;
    }
    return v;
}

double kinetic_action_closed(const Trajectory& traj) {
    // integral of (sum_j c_j w_j e^{-w_j |t|})^2 = 2 sum_{jk} c_j c_k w_j w_k / (w_j + w_k)
    double total = 0.0;
    for (const auto& comp : traj.terms)
        for (const auto& tj : comp)
            for (const auto& tk : comp)
                total += 2.0 * tj.coef * tk.coef * tj.freq * tk.freq / (tj.freq + tk.freq);
    return total;
}

PathEnergy path_energy(const Trajectory& traj, const SystemSpec& spec) {
    require_validated(spec);
    PathEnergy out;
    out.tau.reserve(traj.tauGrid.size());
    out.energy.reserve(traj.tauGrid.size());
    for (size_t k = 0; k < traj.tauGrid.size(); ++k) {
        const double tau = traj.tauGrid[k];
        if (tau == traj.hitTime) continue; // velocity kink
        const auto vel = traj.derivative(tau);
        double kin = 0.0;
        for (double v : vel) kin += v * v;
        out.tau.push_back(tau);
        out.energy.push_back(0.5 * kin - potential_energy(spec, traj.values[k]));
    }
    return out;
}

std::vector<double> graded_grid(double tau1, double h0, double ratio, double hMax, double span) {
    if (!(h0 > 0.0) || !(ratio >= 1.0) || !(hMax >= h0) || !(span > 0.0))
        throw InvalidParameter("graded_grid: bad grading parameters");
    // panel edges on [0, span]; each panel contributes 4 equal sub-intervals
    std::vector<double> offsets{0.0};
    double pos = 0.0, h = h0;
    while (pos < span) {
        for (int s = 1; s <= 4; ++s) offsets.push_back(pos + h * s / 4.0);
        pos += h;
        h = std::min(h * ratio, hMax);
    }
    std::vector<double> grid;
    grid.reserve(2 * offsets.size() - 1);
    for (size_t i = offsets.size(); i-- > 1;) grid.push_back(tau1 - offsets[i]);
    for (double o : offsets) grid.push_back(tau1 + o);
    return grid;
}

std::vector<double> default_instanton_grid(const SystemSpec& spec, double tau1) {
    const PolaritonSpectrum ps = polariton_spectrum(spec, SpectrumMode::Exact);
    const double wFast = ps.omegaPlus;
    const double wSlow = std::min(ps.omegaMinus, spec.omega0);
    return graded_grid(tau1, 4e-4 / wFast, 1.04, 0.025 / wFast, 40.0 / wSlow);
}

} // namespace poltun
