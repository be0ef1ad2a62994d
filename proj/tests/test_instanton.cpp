#include <doctest.h>

#include <cmath>

#include "poltun/instanton.hpp"
#include "poltun/io.hpp"
#include "poltun/oracle.hpp"
#include "test_util.hpp"

using namespace poltun;

namespace {

SystemSpec make(double w0, double wc, double a, std::vector<double> c) {
    SystemSpec s;
    s.omega0 = w0;
    s.omegaC = wc;
    s.wallA = a;
    s.couplings = std::move(c);
    return validate_system(s);
}

std::vector<double> uniform_grid(double lo, double hi, int n) {
    std::vector<double> g(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k)
        g[static_cast<size_t>(k)] = lo + (hi - lo) * k / (n - 1.0);
    return g;
}

} // namespace

TEST_CASE("polaritonic response function") {
    const SystemSpec bare = make(1, 1, 1, {0.0});
    CHECK(chi_p(bare, 0.0) == doctest::Approx(1.0).epsilon(1e-15));

    const SystemSpec spec = make(1, 1, 1, {0.2}); // N<lambda^4> = 0.04
    CHECK(chi_p(spec, 0.0) == doctest::Approx(1.0416666666666667).epsilon(1e-15));

    // high-frequency asymptote chi_P w^4 -> 1
    const double w = 3.0e3;
    CHECK(chi_p(spec, w) * w * w * w * w == doctest::Approx(1.0).epsilon(1e-6));

    // misuse guard: an unvalidated-but-flagged spec can push the denominator negative
    SystemSpec rigged = spec;
    rigged.couplings = {2.0};
    CHECK_THROWS_AS(chi_p(rigged, 0.0), DivergentResponse);
}

TEST_CASE("harmonic frequency collapses to w0 for a dark bouncer") {
    const SystemSpec spec = io::preset_system("fig3params"); // coupling 2 is zero
    const auto hf = harmonic_frequency(spec, 2);
    CHECK(hf.omegaH == 1.0);
    CHECK(hf.amplitudeA == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("harmonic frequency under the RWA: 1 - g^2/(w0 wc)") {
    // g^2/(w0 wc) = 0.1
    const SystemSpec spec = make(1, 1, 2, {std::sqrt(0.1)});
    CHECK(harmonic_frequency(spec, 1, SpectrumMode::RWA).omegaH
          == doctest::Approx(0.9).epsilon(1e-14));
}

TEST_CASE("harmonic frequency for the N = 6 preset, pinned by the eigen-sum oracle") {
    const auto hf = harmonic_frequency(io::preset_system("fig3params"), 1);
    CHECK(hf.omegaH == doctest::Approx(0.99593560883570141).epsilon(1e-13));
}

TEST_CASE("uncoupled instanton is the bare bounce, translated") {
    const SystemSpec spec = make(1.0, 1.4, 2.0, {0.0});
    const double tau1 = 0.7;
    const auto grid = uniform_grid(tau1 - 8, tau1 + 8, 401);
    const auto traj = instanton_path(spec, 1, grid, tau1);
    CHECK(traj.amplitude == doctest::Approx(2.0 * spec.wallA * spec.omega0).epsilon(1e-15));
    for (size_t k = 0; k < grid.size(); ++k) {
        const double expected = spec.wallA * std::exp(-std::abs(grid[k] - tau1));
        CHECK(traj.values[k][1] == doctest::Approx(expected).epsilon(1e-14));
        CHECK(traj.values[k][0] == 0.0);
    }
}

TEST_CASE("hit quadrature touches the wall exactly") {
    auto eng = testutil::test_engine(10);
    for (int rep = 0; rep < 20; ++rep) {
        const SystemSpec spec = testutil::random_stable_spec(eng);
        const int hit = 1 + static_cast<int>(oracle::uniform01(eng) * (spec.n() - 0.001));
        const auto traj = instanton_path(spec, hit, {0.0});
        const auto phi = traj.evaluate(0.0);
        CHECK(std::abs(phi[static_cast<size_t>(hit)] - spec.wallA) <= 1e-12 * spec.wallA);
    }
}

TEST_CASE("instanton matches the normal-mode oracle pointwise on the N = 6 preset") {
    const SystemSpec spec = io::preset_system("fig3params");
    const auto grid = default_instanton_grid(spec);
    const auto traj = instanton_path(spec, 1, grid);
    const auto ref = oracle::normal_mode_path_oracle(spec, 1, grid);
    double worst = 0.0;
    for (size_t k = 0; k < grid.size(); ++k)
        for (size_t c = 0; c < traj.values[k].size(); ++c)
            worst = std::max(worst, std::abs(traj.values[k][c] - ref.values[k][c]));
    CHECK(worst <= 1e-10 * spec.wallA);
}

TEST_CASE("a dark bouncer leaves cavity and neighbours untouched") {
    const SystemSpec spec = make(1, 1, 1.5, {0.2, 0.0, -0.1});
    const auto grid = uniform_grid(-6, 6, 201);
    const auto traj = instanton_path(spec, 2, grid);
    for (size_t k = 0; k < grid.size(); ++k) {
        CHECK(traj.values[k][0] == 0.0);
        CHECK(traj.values[k][1] == 0.0);
        CHECK(traj.values[k][3] == 0.0);
        CHECK(traj.values[k][2]
              == doctest::Approx(spec.wallA * std::exp(-std::abs(grid[k]))).epsilon(1e-14));
    }
}

TEST_CASE("velocity kick sits only on the bouncing quadrature") {
    const SystemSpec spec = io::preset_system("fig3params");
    const auto traj = instanton_path(spec, 1, {0.0});
    const auto left = traj.derivative(0.0, -1);
    const auto right = traj.derivative(0.0, +1);
    CHECK(left[1] - right[1] == doctest::Approx(traj.amplitude).epsilon(1e-10));
    for (size_t c : {size_t(0), size_t(2), size_t(3), size_t(4), size_t(5), size_t(6)})
        CHECK(std::abs(left[c] - right[c]) <= 1e-12 * traj.amplitude);
}

TEST_CASE("cavity response is linear in the bouncing coupling at fixed spectrum") {
    // same N<lambda^4>, lambda_1^2 scaled: x/(A lambda_1^2) and the dragged
    // part of every other quadrature are invariant
    const double l4sum = 0.02;
    const double rest = 0.05;
    const auto build = [&](double l1sq) {
        const double other = std::sqrt((l4sum - l1sq * l1sq - rest * rest));
        return make(1, 1.2, 1, {l1sq, rest, other});
    };
    const SystemSpec specA = build(0.08);
    const SystemSpec specB = build(0.11);
    const auto tA = instanton_path(specA, 1, {0.0});
    const auto tB = instanton_path(specB, 1, {0.0});
    for (double tau : {-2.0, -0.5, 0.0, 1.0, 3.5}) {
        const double xA = tA.evaluate(tau)[0] / (tA.amplitude * 0.08);
        const double xB = tB.evaluate(tau)[0] / (tB.amplitude * 0.11);
        CHECK(xA == doctest::Approx(xB).epsilon(1e-12));
        // q_2 carries lambda_1^2 lambda_2^2 f(tau): divide out the couplings
        const double qA = tA.evaluate(tau)[2] / (tA.amplitude * 0.08 * rest);
        const double qB = tB.evaluate(tau)[2] / (tB.amplitude * 0.11 * rest);
        CHECK(qA == doctest::Approx(qB).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("argument validation across the engine") {
    const SystemSpec spec = io::preset_system("fig3params");
    CHECK_THROWS_AS(instanton_path(spec, 0, {0.0}), InvalidParameter);
    CHECK_THROWS_AS(instanton_path(spec, 7, {0.0}), InvalidParameter);
    CHECK_THROWS_AS(harmonic_frequency(spec, -1), InvalidParameter);
    CHECK_THROWS_AS(fourier_coefficients(spec, 1, -2.0, 16), InvalidParameter);
    CHECK_THROWS_AS(fourier_coefficients(spec, 1, 10.0, 0), InvalidParameter);
    CHECK_THROWS_AS(action_finite_beta(spec, 1, 0.0), InvalidParameter);
}

TEST_CASE("Fourier coefficients vanish with the coupling, bare static response survives") {
    const SystemSpec spec = make(1, 1, 2, {0.0, 0.1});
    const auto fs = fourier_coefficients(spec, 1, 20.0, 64);
    for (int m = 0; m <= fs.mMax; ++m)
        CHECK(std::abs(fs.coefficient(m)[0]) == 0.0); // x_m = 0 when lambda_hit = 0
    // m = 0 static term of the bouncing quadrature: (A/beta)/w0^2
    CHECK(std::real(fs.coefficient(0)[1])
          == doctest::Approx(fs.amplitude / 20.0).epsilon(1e-13));
}

TEST_CASE("Fourier reality and quadratic decay") {
    const SystemSpec spec = io::preset_system("fig3params");
    const auto fs = fourier_coefficients(spec, 1, 30.0, 400);
    const auto plus = fs.coefficient(7);
    const auto minus = fs.coefficient(-7);
    for (size_t c = 0; c < plus.size(); ++c)
        CHECK(minus[c] == std::conj(plus[c]));
    // |q1_m| (w0^2 + w_m^2) -> A/beta
    const double wm = 2.0 * M_PI * 400 / 30.0;
    CHECK(std::abs(fs.coefficient(400)[1]) * (1.0 + wm * wm)
          == doctest::Approx(fs.amplitude / 30.0).epsilon(1e-3));
}

TEST_CASE("finite-beta kick amplitude reproduces 2 a w_H as beta grows") {
    const SystemSpec spec = io::preset_system("fig3params");
    const auto fs = fourier_coefficients(spec, 1, 50.0, 800);
    CHECK(fs.synthesize(0.0)[1] == doctest::Approx(spec.wallA).epsilon(1e-12));
    CHECK(fs.amplitude
          == doctest::Approx(harmonic_frequency(spec, 1).amplitudeA).epsilon(1e-10));
}

TEST_CASE("synthesis with the zero-temperature amplitude still hits the wall") {
    const SystemSpec spec = io::preset_system("fig3params");
    const double a0 = harmonic_frequency(spec, 1).amplitudeA;
    const auto fs = fourier_coefficients(spec, 1, 50.0, 800, 0.25, a0);
    CHECK(std::abs(fs.synthesize(0.25)[1] - spec.wallA) <= 1e-6 * spec.wallA);
}

TEST_CASE("synthesized path matches the zero-temperature instanton at large beta") {
    const SystemSpec spec = io::preset_system("fig3params");
    const auto fs = fourier_coefficients(spec, 1, 50.0, 2000);
    const auto traj = instanton_path(spec, 1, {0.0});
    for (double tau : {-3.0, -1.0, 0.0, 0.5, 2.0}) {
        const auto synth = fs.synthesize(tau);
        const auto exact = traj.evaluate(tau);
        for (size_t c = 0; c < synth.size(); ++c)
            CHECK(std::abs(synth[c] - exact[c]) <= 1e-7 * spec.wallA);
    }
}

TEST_CASE("zero-temperature action: dark bouncer and RWA closed forms") {
    const SystemSpec spec = io::preset_system("fig3params");
    CHECK(action_zero_t(spec, 2) == 4.0); // S_0 exactly

    const SystemSpec one = make(1, 1, 2, {std::sqrt(0.1)}); // g^2 ratio 0.1, S_0 = 4
    CHECK(action_zero_t(one, 1, SpectrumMode::RWA) == doctest::Approx(3.6).epsilon(1e-14));

    CHECK(action_zero_t(spec, 1) == doctest::Approx(3.9837424353428056).epsilon(1e-13));
}

TEST_CASE("uncoupled finite-beta action is a^2 w0 tanh(beta w0 / 2)") {
    const SystemSpec spec = make(1.3, 0.9, 1.7, {0.0, 0.0});
    const double w0 = spec.omega0, a = spec.wallA;
    for (double bw : {1.0, 5.0, 20.0}) {
        const double beta = bw / w0;
        CHECK(action_finite_beta(spec, 1, beta)
              == doctest::Approx(a * a * w0 * std::tanh(0.5 * bw)).epsilon(1e-12));
    }
    // beta -> 0: S -> beta E_b
    const double beta = 1e-4 / w0;
    CHECK(action_finite_beta(spec, 1, beta)
          == doctest::Approx(beta * spec.barrierEnergy).epsilon(1e-8));
}

TEST_CASE("finite-beta action converges monotonically to the zero-T limit") {
    const SystemSpec spec = io::preset_system("fig3params");
    const double s8 = action_zero_t(spec, 1);
    // the adaptive Matsubara cutoff holds the tail below 1e-9 of the sum, so
    // monotone decrease is only visible until the gap reaches that floor
    const double floor = 8e-9 * s8;
    double prev = std::abs(action_finite_beta(spec, 1, 10.0) - s8);
    for (double beta : {20.0, 30.0, 40.0, 60.0}) {
        const double gap = std::abs(action_finite_beta(spec, 1, beta) - s8);
        CHECK((gap <= prev || (gap <= floor && prev <= floor)));
        prev = gap;
    }
    CHECK(std::abs(action_finite_beta(spec, 1, 60.0) - s8) <= 1e-6 * s8);
    CHECK(std::abs(action_finite_beta(spec, 1, 50.0) - s8) <= 1e-8 * s8);
}

TEST_CASE("explicit Matsubara cutoff must satisfy the tail bound") {
    const SystemSpec spec = io::preset_system("fig3params");
    CHECK_THROWS_AS(action_finite_beta(spec, 1, 40.0, 2), TruncationNotConverged);
    // an explicit cutoff of 4000 is far past the adaptive one; both sit
    // within the documented 1e-9 tail tolerance of each other
    CHECK(action_finite_beta(spec, 1, 40.0, 4000)
          == doctest::Approx(action_finite_beta(spec, 1, 40.0)).epsilon(1e-8));
}

TEST_CASE("instanton conserves zero energy") {
    const SystemSpec bare = make(1, 1, 2, {0.0});
    const auto gridB = default_instanton_grid(bare);
    const auto pe = path_energy(instanton_path(bare, 1, gridB), bare);
    for (double e : pe.energy) CHECK(std::abs(e) <= 1e-14 * bare.barrierEnergy);

    const SystemSpec spec = io::preset_system("fig3params");
    const auto grid = default_instanton_grid(spec);
    const auto traj = instanton_path(spec, 1, grid);
    const auto pf = path_energy(traj, spec);
    CHECK(pf.tau.size() == grid.size() - 1); // kink node skipped
    for (double e : pf.energy) CHECK(std::abs(e) <= 1e-10 * spec.barrierEnergy);
}

TEST_CASE("perturbing one component breaks the zero-energy balance") {
    const SystemSpec spec = io::preset_system("fig3params");
    auto traj = instanton_path(spec, 1, default_instanton_grid(spec));
    for (auto& t : traj.terms[0]) t.coef *= 1.1;
    for (size_t k = 0; k < traj.tauGrid.size(); ++k)
        traj.values[k] = traj.evaluate(traj.tauGrid[k]);
    const auto pe = path_energy(traj, spec);
    double worst = 0.0;
    for (double e : pe.energy) worst = std::max(worst, std::abs(e));
    CHECK(worst > 1e-4 * spec.barrierEnergy);
}

TEST_CASE("closed-form kinetic integral equals the action") {
    auto eng = testutil::test_engine(11);
    for (int rep = 0; rep < 20; ++rep) {
        const SystemSpec spec = testutil::random_stable_spec(eng);
        const auto traj = instanton_path(spec, 1, {0.0});
        CHECK(kinetic_action_closed(traj)
              == doctest::Approx(action_zero_t(spec, 1)).epsilon(1e-10));
    }
}

TEST_CASE("graded grid obeys its own contract") {
    const auto grid = graded_grid(0.5, 1e-3, 1.06, 0.05, 12.0);
    const auto mid = std::find(grid.begin(), grid.end(), 0.5);
    REQUIRE(mid != grid.end());
    const size_t kink = static_cast<size_t>(mid - grid.begin());
    CHECK(kink % 4 == 0);
    CHECK((grid.size() - 1 - kink) % 4 == 0);
    CHECK(grid.front() <= 0.5 - 12.0);
    CHECK(grid.back() >= 0.5 + 12.0);
    for (size_t k = 0; k + 2 < grid.size(); ++k) {
        const double r = (grid[k + 2] - grid[k + 1]) / (grid[k + 1] - grid[k]);
        CHECK(r + 1e-12 >= 1.0 / 1.1);
        CHECK(r - 1e-12 <= 1.1);
    }
}

TEST_CASE("Fourier coefficients satisfy the imaginary-time equations of motion") {
    // (wc^2 + w_m^2) x_m + sum_i l_i^2 q_im = 0
    // (w0^2 + w_m^2) q_im + l_i^2 x_m = (A/beta) e^{-i w_m tau1} [i = hit]
    const SystemSpec spec = io::preset_system("fig3params");
    const double beta = 17.0, tau1 = 0.4;
    const auto fs = fourier_coefficients(spec, 3, beta, 200, tau1);
    const double scaleRef = fs.amplitude / beta;
    for (int m : {0, 1, 2, 7, 58, 200}) {
        const double wm = 2.0 * M_PI * m / beta;
        const auto row = fs.coefficient(m);
        const std::complex<double> source =
            (fs.amplitude / beta) * std::exp(std::complex<double>(0.0, -wm * tau1));

        std::complex<double> cav = (spec.omegaC * spec.omegaC + wm * wm) * row[0];
        for (int i = 1; i <= spec.n(); ++i)
            cav += spec.couplings[static_cast<size_t>(i - 1)] * row[static_cast<size_t>(i)];
        CHECK(std::abs(cav) <= 1e-12 * scaleRef);

        for (int i = 1; i <= spec.n(); ++i) {
            std::complex<double> matter =
                (spec.omega0 * spec.omega0 + wm * wm) * row[static_cast<size_t>(i)]
                + spec.couplings[static_cast<size_t>(i - 1)] * row[0];
            if (i == 3) matter -= source;
            CHECK(std::abs(matter) <= 1e-12 * scaleRef);
        }
    }
}
