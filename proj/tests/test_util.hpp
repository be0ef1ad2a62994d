#pragma once

#include <random>
#include <vector>

#include "poltun/oracle.hpp"
#include "poltun/system.hpp"

namespace testutil {

using namespace poltun;

// Deterministic random stable specs with a comfortable stability margin
// (N<lambda^4> <= 0.5 w0^2 wc^2, so w- stays well away from zero).
inline SystemSpec random_stable_spec(std::mt19937_64& eng, int maxN = 8) {
    using oracle::uniform01;
    SystemSpec s;
    s.omega0 = 0.5 + 1.5 * uniform01(eng);
    s.omegaC = 0.5 + 1.5 * uniform01(eng);
    s.wallA = 0.5 + 2.5 * uniform01(eng);
    const int n = 1 + static_cast<int>(uniform01(eng) * maxN * 0.999);
    const double budget = 0.5 * s.omega0 * s.omega0 * s.omegaC * s.omegaC;
    s.couplings.resize(static_cast<size_t>(n));
    for (auto& c : s.couplings) {
        const double u = uniform01(eng);
        if (u < 0.15) {
            c = 0.0; // keep the dark edge case in the mix
        } else {
            const double mag = std::sqrt(budget * uniform01(eng) / n);
            c = (uniform01(eng) < 0.5) ? -mag : mag;
        }
    }
    return validate_system(s);
}

inline std::mt19937_64 test_engine(std::uint64_t salt = 0) {
    return oracle::stream_engine(20220428u, salt);
}

} // namespace testutil
