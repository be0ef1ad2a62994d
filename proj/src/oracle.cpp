#include "poltun/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

namespace poltun::oracle {

// --- RNG --------------------------------------------------------------------

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t streamIndex) {
    return std::mt19937_64(mix64(seed ^ (streamIndex + 1) * 0x9E3779B97F4A7C15ULL));
}

double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

double draw_g2(const CouplingEnsemble& ens, std::mt19937_64& eng) {
    switch (ens.kind) {
        case CouplingEnsemble::Kind::Uniform:
            return ens.lo + (ens.hi - ens.lo) * uniform01(eng);
        case CouplingEnsemble::Kind::Gaussian: {
            // Box-Muller; two fresh uniforms per variate keeps streams simple
            const double u1 = uniform01(eng);
            const double u2 = uniform01(eng);
            return ens.mean + ens.sd * std::sqrt(-2.0 * std::log1p(-u1))
                                 * std::cos(2.0 * M_PI * u2);
        }
        case CouplingEnsemble::Kind::TwoPoint:
            return (uniform01(eng) < ens.p) ? ens.v1 : ens.v2;
        case CouplingEnsemble::Kind::Explicit:
        default:
            throw InvalidParameter("draw_g2: explicit ensembles are not sampled");
    }
}

// --- path oracle --------------------------------------------------------------

Trajectory normal_mode_path_oracle(const SystemSpec& spec, int hitIndex,
                                   const std::vector<double>& tauGrid, double tau1) {
    require_validated(spec);
    const int n = spec.n();
    if (hitIndex < 1 || hitIndex > n)
        throw InvalidParameter("normal_mode_path_oracle: hitIndex out of range");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(stiffness_matrix(spec));
    const Eigen::VectorXd mu = es.eigenvalues();
    const Eigen::MatrixXd v = es.eigenvectors();

    // A from the wall condition phi_hit(tau1) = a
    double hitSum = 0.0;
    for (int k = 0; k <= n; ++k)
        hitSum += v(hitIndex, k) * v(hitIndex, k) / std::sqrt(mu(k));
    const double kick = 2.0 * spec.wallA / hitSum;

    Trajectory traj;
    traj.hitIndex = hitIndex;
    traj.hitTime = tau1;
    traj.amplitude = kick;
    traj.terms.assign(static_cast<size_t>(n + 1), {});
    for (int c = 0; c <= n; ++c) {
        auto& terms = traj.terms[static_cast<size_t>(c)];
        terms.reserve(static_cast<size_t>(n + 1));
        for (int k = 0; k <= n; ++k) {
            const double om = std::sqrt(mu(k));
            terms.push_back({kick * v(hitIndex, k) * v(c, k) / (2.0 * om), om});
        }
    }
    traj.tauGrid = tauGrid;
    traj.values.reserve(tauGrid.size());
    for (double tau : tauGrid) traj.values.push_back(traj.evaluate(tau));
    return traj;
}

// --- action oracles ----------------------------------------------------------

double matsubara_sum_oracle(const SystemSpec& spec, int hitIndex, double beta, long mMax) {
    require_validated(spec);
    if (hitIndex < 1 || hitIndex > spec.n())
        throw InvalidParameter("matsubara_sum_oracle: hitIndex out of range");
    if (!(beta > 0.0) || mMax < 0)
        throw InvalidParameter("matsubara_sum_oracle: bad beta or mMax");

    const double w0sq = spec.omega0 * spec.omega0;
    const double li2 = spec.couplings[static_cast<size_t>(hitIndex - 1)];
    const double li4 = li2 * li2;
    const double wcsq = spec.omegaC * spec.omegaC;
    const double nl4 = total_lambda4(spec);

    // Kahan-compensated raw sum over |m| <= mMax
    double sum = (1.0 + li4 / (w0sq * wcsq - nl4)) / w0sq; // m = 0
    double comp = 0.0;
    const double wUnit = 2.0 * M_PI / beta;
    for (long m = 1; m <= mMax; ++m) {
        const double wm2 = (wUnit * m) * (wUnit * m);
        const double chi = 1.0 / ((wm2 + w0sq) * (wm2 + wcsq) - nl4);
        const double term = 2.0 * (1.0 + li4 * chi) / (w0sq + wm2);
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return 0.5 * spec.wallA * spec.wallA * beta / sum;
}

long matsubara_mmax_for(double beta, double omega0, double relTol) {
    // raw tail (1/beta) sum_{|m|>M} 1/w_m^2 = beta/(2 pi^2 M), full sum >= 1/(2 w0)
    return static_cast<long>(std::ceil(beta * omega0 / (M_PI * M_PI * relTol)));
}

namespace {

// 3-point closed Newton-Cotes on [x0, x2] with interior node x1
double three_point(double x0, double x1, double x2, double f0, double f1, double f2) {
    const double h1 = x1 - x0, h2 = x2 - x1, h = h1 + h2;
    return h / 6.0 * ((2.0 - h2 / h1) * f0 + h * h / (h1 * h2) * f1 + (2.0 - h1 / h2) * f2);
}

double graded_quadrature(const Trajectory& traj, const SystemSpec& spec,
                         const std::function<double(size_t)>& density, double relTol) {
    const auto& grid = traj.tauGrid;
    const size_t nPts = grid.size();
    if (nPts < 9)
        throw GridTooCoarse("quadrature: grid has fewer than 9 nodes");

    size_t kink = nPts;
    for (size_t k = 0; k < nPts; ++k)
        if (grid[k] == traj.hitTime) { kink = k; break; }
    if (kink == nPts)
        throw GridTooCoarse("quadrature: hitting time is not a grid node");
    if (kink % 4 != 0 || (nPts - 1 - kink) % 4 != 0)
        throw GridTooCoarse("quadrature: sides are not panels of four sub-intervals");

    // grading contract: spacing away from the kink grows by at most 1.1
    for (size_t k = 0; k + 2 < nPts; ++k) {
        const double hA = grid[k + 1] - grid[k];
        const double hB = grid[k + 2] - grid[k + 1];
        if (!(hA > 0.0) || !(hB > 0.0))
            throw GridTooCoarse("quadrature: grid not strictly increasing");
        const bool outward = (k + 1 > kink);
        const double growth = outward ? hB / hA : hA / hB;
        if (growth > 1.1 + 1e-9)
            throw GridTooCoarse("quadrature: spacing ratio above 1.1");
    }
    const PolaritonSpectrum ps = polariton_spectrum(spec, SpectrumMode::Exact);
    const double span = 40.0 / std::min(ps.omegaMinus, spec.omega0);
    if (traj.hitTime - grid.front() < span * (1.0 - 1e-9)
        || grid.back() - traj.hitTime < span * (1.0 - 1e-9))
        throw GridTooCoarse("quadrature: grid does not extend to 40 / w_-");

    double fine = 0.0, coarse = 0.0;
    for (size_t p = 0; p + 4 < nPts; p += 4) {
        const double f0 = density(p), f1 = density(p + 1), f2 = density(p + 2),
                     f3 = density(p + 3), f4 = density(p + 4);
        fine += three_point(grid[p], grid[p + 1], grid[p + 2], f0, f1, f2)
              + three_point(grid[p + 2], grid[p + 3], grid[p + 4], f2, f3, f4);
        coarse += three_point(grid[p], grid[p + 2], grid[p + 4], f0, f2, f4);
    }
    const double est = std::abs(fine - coarse) / 15.0;
    if (est > relTol * std::abs(fine))
        throw GridTooCoarse("quadrature: Richardson estimate above tolerance");
    return fine;
}

} // namespace

double numeric_action_oracle(const Trajectory& traj, const SystemSpec& spec, double relTol) {
    require_validated(spec);
    const auto density = [&](size_t k) {
        const auto vel = traj.derivative(traj.tauGrid[k]);
        double kin = 0.0;
        for (double v : vel) kin += v * v;
        return 0.5 * kin + potential_energy(spec, traj.values[k]);
    };
    return graded_quadrature(traj, spec, density, relTol);
}

double kinetic_action_quadrature(const Trajectory& traj, const SystemSpec& spec, double relTol) {
    require_validated(spec);
    const auto density = [&](size_t k) {
        const auto vel = traj.derivative(traj.tauGrid[k]);
        double kin = 0.0;
        for (double v : vel) kin += v * v;
        return kin;
    };
    return graded_quadrature(traj, spec, density, relTol);
}

// --- ensemble oracle -----------------------------------------------------------

MonteCarloResult monte_carlo_ensemble(const CouplingEnsemble& ens, const SystemSpec& tmpl,
                                      double s0, int samples, SpectrumMode mode) {
    if (samples < 1)
        throw InvalidParameter("monte_carlo_ensemble: samples must be >= 1");
    if (ens.count < 1 && ens.kind != CouplingEnsemble::Kind::Explicit)
        throw InvalidParameter("monte_carlo_ensemble: ensemble count must be >= 1");

    const double w0wc = tmpl.omega0 * tmpl.omegaC;
    const long cap = 100L * samples;

    MonteCarloResult out;
    out.samples = samples;
    long attempts = 0;
    double mean = 0.0, m2 = 0.0;
    int accepted = 0;

    for (int s = 0; s < samples; ++s) {
        auto eng = stream_engine(ens.seed, static_cast<std::uint64_t>(s));
        SystemSpec draw;
        bool ok = false;
        while (!ok) {
            if (++attempts > cap)
                throw Error("monte_carlo_ensemble: rejection cap of 100 x samples reached");
            std::vector<double> g2;
            if (ens.kind == CouplingEnsemble::Kind::Explicit) {
                g2 = ens.explicitG2;
            } else {
                g2.resize(static_cast<size_t>(ens.count));
                for (auto& v : g2) v = draw_g2(ens, eng);
            }
            if (std::any_of(g2.begin(), g2.end(), [](double v) { return v < 0.0; })) {
                ++out.rejected;
                continue;
            }
            draw = tmpl;
            draw.validated = false;
            draw.couplings.resize(g2.size());
            for (size_t i = 0; i < g2.size(); ++i)
                draw.couplings[i] = std::sqrt(w0wc * g2[i]);
            try {
                draw = validate_system(draw);
                ok = true;
            } catch (const UnstableSystem&) {
                ++out.rejected;
            }
        }
        const double r = rate_modification_exact(draw, s0, mode).ensembleR;
        ++accepted;
        const double delta = r - mean;
        mean += delta / accepted;
        m2 += delta * (r - mean);
    }
    out.rMean = mean;
    out.rStdErr = (samples > 1) ? std::sqrt(m2 / (samples - 1.0) / samples) : 0.0;
    return out;
}

// --- verification battery --------------------------------------------------------

namespace {

struct CheckRunner {
    std::vector<OracleReport>& reports;
    double tolOverride;

    void run(const std::string& name, double tol, const std::function<double()>& body) {
        OracleReport rep;
        rep.checkName = name;
        rep.tolerance = (tolOverride >= 0.0) ? tolOverride : tol;
        const auto start = std::chrono::steady_clock::now();
        try {
            rep.maxError = body();
        } catch (const std::exception& e) {
            rep.maxError = std::numeric_limits<double>::infinity();
            rep.checkName += std::string(" [threw: ") + e.what() + "]";
        }
        rep.runtimeSeconds = std::chrono::duration<double>(
            std::chrono::steady_clock::now() - start).count();
        rep.pass = rep.maxError <= rep.tolerance;
        reports.push_back(rep);
    }
};

double rel(double got, double want) {
    return std::abs(got - want) / std::abs(want);
}

std::string fmt6(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

} // namespace

std::vector<OracleReport> run_verification(const SystemSpec& spec, const VerifyOptions& opt) {
    require_validated(spec);
    std::vector<OracleReport> reports;
    CheckRunner checks{reports, opt.toleranceOverride};

    const double w0 = spec.omega0;
    const double a = spec.wallA;
    const double scale = opt.omegaHScale;

    std::vector<int> hits{1};
    if (spec.n() > 1) {
        int strongest = 1;
        for (int i = 2; i <= spec.n(); ++i)
            if (std::abs(spec.couplings[static_cast<size_t>(i - 1)])
                > std::abs(spec.couplings[static_cast<size_t>(strongest - 1)]))
                strongest = i;
        if (strongest != 1) hits.push_back(strongest);
    }

    const auto grid = default_instanton_grid(spec);
    std::vector<Trajectory> engine, nm;
    for (int i : hits) {
        engine.push_back(instanton_path(spec, i, grid));
        nm.push_back(normal_mode_path_oracle(spec, i, grid));
    }

    checks.run("instanton_vs_normal_mode", 1e-10, [&] {
        double worst = 0.0;
        for (size_t h = 0; h < hits.size(); ++h)
            for (size_t k = 0; k < grid.size(); ++k)
                for (size_t c = 0; c < engine[h].values[k].size(); ++c)
                    worst = std::max(worst,
                        std::abs(engine[h].values[k][c] - nm[h].values[k][c]) / a);
        return worst;
    });

    checks.run("wall_condition", 1e-12, [&] {
        double worst = 0.0;
        for (size_t h = 0; h < hits.size(); ++h) {
            const auto phi = engine[h].evaluate(engine[h].hitTime);
            worst = std::max(worst, std::abs(phi[static_cast<size_t>(hits[h])] - a) / a);
        }
        return worst;
    });

    checks.run("velocity_jump", 1e-10, [&] {
        double worst = 0.0;
        for (size_t h = 0; h < hits.size(); ++h) {
            const auto left = engine[h].derivative(engine[h].hitTime, -1);
            const auto right = engine[h].derivative(engine[h].hitTime, +1);
            const double jump = left[static_cast<size_t>(hits[h])]
                              - right[static_cast<size_t>(hits[h])];
            worst = std::max(worst, rel(jump, engine[h].amplitude));
        }
        return worst;
    });

    checks.run("zero_energy", 1e-10, [&] {
        double worst = 0.0;
        for (const auto& traj : engine) {
            const auto pe = path_energy(traj, spec);
            for (double e : pe.energy)
                worst = std::max(worst, std::abs(e) / spec.barrierEnergy);
        }
        return worst;
    });

    checks.run("amplitude_closed_form", 1e-10, [&] {
        double worst = 0.0;
        for (size_t h = 0; h < hits.size(); ++h) {
            const double predicted = scale * harmonic_frequency(spec, hits[h]).amplitudeA;
            worst = std::max(worst, rel(nm[h].amplitude, predicted));
        }
        return worst;
    });

    checks.run("action_closed_vs_quadrature", 1e-8, [&] {
        double worst = 0.0;
        for (size_t h = 0; h < hits.size(); ++h) {
            const double closed = scale * action_zero_t(spec, hits[h]);
            worst = std::max(worst, rel(closed, numeric_action_oracle(engine[h], spec)));
        }
        return worst;
    });

    checks.run("kinetic_equals_action", 1e-8, [&] {
        double worst = 0.0;
        for (const auto& traj : engine)
            worst = std::max(worst, rel(kinetic_action_quadrature(traj, spec),
                                        numeric_action_oracle(traj, spec)));
        return worst;
    });

    if (!opt.quick) {
        checks.run("action_finite_beta_vs_brute", 1e-8, [&] {
            const double beta = 5.0 / w0;
            const long mm = matsubara_mmax_for(beta, w0, 2e-9);
            return rel(action_finite_beta(spec, hits[0], beta),
                       matsubara_sum_oracle(spec, hits[0], beta, mm));
        });
    }

    checks.run("action_uncoupled_tanh", 1e-8, [&] {
        SystemSpec bare = spec;
        bare.validated = false;
        std::fill(bare.couplings.begin(), bare.couplings.end(), 0.0);
        bare = validate_system(bare);
        double worst = 0.0;
        for (double bw : {1.0, 5.0, 20.0}) {
            const double got = action_finite_beta(bare, 1, bw / w0);
            worst = std::max(worst, rel(got, a * a * w0 * std::tanh(0.5 * bw)));
        }
        return worst;
    });

    checks.run("finite_beta_to_zero_t", 1e-6, [&] {
        double worst = 0.0;
        for (int i : hits)
            worst = std::max(worst, rel(action_finite_beta(spec, i, 60.0 / w0),
                                        action_zero_t(spec, i)));
        return worst;
    });

    checks.run("epsilon_closed_vs_path", 1e-6, [&] {
        const double beta = 5.0 / w0;
        double worst = 0.0;
        for (size_t h = 0; h < hits.size(); ++h)
            worst = std::max(worst, rel(scale * epsilon_finite(spec, hits[h], beta),
                                        epsilon_from_path(engine[h], spec, beta)));
        return worst;
    });

    checks.run("epsilon_zero_beta_identity", 1e-10, [&] {
        double worst = 0.0;
        for (int i : hits) {
            const double predicted = 4.0 * arithmetic_frequency(spec, i)
                                         * harmonic_frequency(spec, i).omegaH;
            worst = std::max(worst, rel(epsilon_finite(spec, i, 0.0), predicted));
        }
        return worst;
    });

    checks.run("epsilon_uncoupled_closed", 1e-12, [&] {
        SystemSpec bare = spec;
        bare.validated = false;
        std::fill(bare.couplings.begin(), bare.couplings.end(), 0.0);
        bare = validate_system(bare);
        const double beta = 3.0 / w0;
        return rel(epsilon_finite(bare, 1, beta),
                   4.0 * w0 * w0 * std::exp(-beta * w0));
    });

    checks.run("rate_n1_closed_form", 1e-12, [&] {
        SystemSpec one;
        one.omega0 = w0;
        one.omegaC = w0;
        one.wallA = 2.0 / std::sqrt(w0);            // S_0 = w0 a^2 = 4
        const double rho = 0.1;                     // g^2/(wc w0)
        one.couplings = {std::sqrt(rho) * w0 * w0}; // lambda^4 = rho (w0 wc)^2
        one = validate_system(one);
        const double got = rate_modification_exact(one, std::nullopt,
                                                   SpectrumMode::RWA).ensembleR;
        return rel(got, rate_modification_single(rho, one.bareAction));
    });

    checks.run("rate_slope_expansion", 1e-4, [&] {
        double worst = 0.0;
        const double h = 1e-5;
        for (double s0 : {2.0, 4.0}) {
            const double slope = (rate_modification_single(h, s0)
                                  - rate_modification_single(-h, s0)) / (2.0 * h);
            worst = std::max(worst, std::abs(slope - (s0 - 1.0)));
        }
        return worst;
    });

    checks.run("cumulant_vs_exact_equal_couplings", 1e-6, [&] {
        const int n = 1000;
        const double g2 = 1e-4 * w0 * w0; // N<g^2> = 0.1 w0 wc
        SystemSpec many;
        many.omega0 = w0;
        many.omegaC = w0;
        many.wallA = a;
        many.couplings.assign(n, std::sqrt(g2) * w0);
        many = validate_system(many);
        const double exact = rate_modification_exact(many, 4.0, SpectrumMode::RWA).ensembleR;
        const double cum = rate_modification_cumulant(coupling_moments(many), many, 4.0).r;
        return rel(cum, exact);
    });

    checks.run("high_t_uncoupled_exact", 0.0, [&] {
        SystemSpec bare = spec;
        bare.validated = false;
        std::fill(bare.couplings.begin(), bare.couplings.end(), 0.0);
        bare = validate_system(bare);
        const double beta = 0.7 / w0;
        const auto ht = high_t_action(bare, beta);
        double worst = 0.0;
        for (const auto& p : ht.perSystem) {
            worst = std::max(worst, std::abs(p.action - beta * bare.barrierEnergy));
            worst = std::max(worst, std::abs(p.ratio - 1.0));
            worst = std::max(worst, std::abs(p.prefactor - w0));
        }
        return worst;
    });

    checks.run("high_t_vs_m0_matsubara", 1e-8, [&] {
        const double beta = 0.01 / w0;
        const auto ht = high_t_action(spec, beta);
        double worst = 0.0;
        for (int i : hits)
            worst = std::max(worst, rel(matsubara_sum_oracle(spec, i, beta, 0),
                                        ht.perSystem[static_cast<size_t>(i - 1)].action));
        return worst;
    });

    checks.run("hessian_signature", 0.0, [&] {
        SystemSpec two;
        two.omega0 = w0;
        two.omegaC = w0;
        two.wallA = a;
        two.couplings = {0.05 * w0 * w0, 0.05 * w0 * w0};
        two = validate_system(two);
        const auto single = barrier_hessian_analysis(two, 8, {1});
        const auto both = barrier_hessian_analysis(two, 8, {1, 2});
        return static_cast<double>(std::abs(single.negativeCount - 1)
                                   + std::abs(both.negativeCount - 2));
    });

    {
        std::vector<int> ns(50);
        for (int i = 0; i < 50; ++i) ns[static_cast<size_t>(i)] = i + 1;
        EpsilonRatioBounds bounds;
        bool ok = true;
        try {
            bounds = epsilon_ratio_bounds(spec, 1, 5.0 / w0, ns);
            for (double v : bounds.values)
                if (!std::isfinite(v) || v <= 0.0) ok = false;
        } catch (const std::exception&) {
            ok = false;
        }
        checks.run("epsilon_ratio_bounded(min=" + fmt6(bounds.minValue)
                       + ",max=" + fmt6(bounds.maxValue) + ")",
                   0.0, [&] { return ok ? 0.0 : 1.0; });
    }

    checks.run("mc_degenerate_consistency", 1e-12, [&] {
        CouplingEnsemble ens;
        ens.kind = CouplingEnsemble::Kind::Uniform;
        ens.lo = ens.hi = 2e-3 * w0 * w0;
        ens.count = 50;
        ens.seed = opt.seed;
        SystemSpec tmpl = spec;
        const auto mc = monte_carlo_ensemble(ens, tmpl, 4.0, 64, SpectrumMode::RWA);
        SystemSpec fixed;
        fixed.omega0 = spec.omega0;
        fixed.omegaC = spec.omegaC;
        fixed.wallA = a;
        fixed.couplings.assign(50, std::sqrt(ens.lo) * std::sqrt(w0 * spec.omegaC));
        fixed = validate_system(fixed);
        const double exact = rate_modification_exact(fixed, 4.0, SpectrumMode::RWA).ensembleR;
        return std::abs(mc.rStdErr) + rel(mc.rMean, exact);
    });

    return reports;
}

} // namespace poltun::oracle
