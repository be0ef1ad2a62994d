#pragma once

// Descriptor parsing, named parameter presets, and figure-ready output
// formatting shared by the command line tool and the tests.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "poltun/oracle.hpp"
#include "poltun/rate.hpp"
#include "poltun/system.hpp"

namespace poltun::io {

// {"omega0": f, "omegaC": f, "wallA": f, "couplings": [f, ...],
//  "couplingDistribution": {"kind": "uniform"|"gaussian"|"twoPoint"|"explicit", ...}}
struct SystemInput {
    SystemSpec spec; // not yet validated; couplings may be empty when a
                     // distribution is given
    std::optional<oracle::CouplingEnsemble> distribution;
};

SystemInput parse_system_json(const nlohmann::json& j);
SystemInput load_system_file(const std::string& path);
nlohmann::json system_to_json(const SystemSpec& spec);

// Named parameter sets used throughout the examples and the verification
// battery:
//   fig2 / fig3params: N = 6 on resonance, lambda_1^2/w0^2 = 0.1,
//                      lambda_{i>1}^2/w0^2 in {0, +-0.1, +-0.2}, a = 2
//   fig5:              N = 1 on resonance, g^2/w0^2 = 0.01, a = 2
//   uncoupled:         three dark systems, a = 2
SystemSpec preset_system(const std::string& name);
std::vector<std::string> preset_names();

// 17 significant digits, enough to round-trip a double
std::string fmt17(double v);

// UTF-8, LF line endings, header row, one CSV line per row
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows);

std::string trajectory_csv(const Trajectory& traj, bool decompose,
                           double omega0);

nlohmann::json spectrum_to_json(const PolaritonSpectrum& ps);
nlohmann::json breakdown_to_json(const RateBreakdown& rb,
                                 const HighTResult* highT = nullptr);
nlohmann::json reports_to_json(const std::vector<oracle::OracleReport>& reports);

// Minimal static line chart: one polyline per column of `series` against x.
std::string svg_chart(const std::vector<double>& x,
                      const std::vector<std::vector<double>>& series,
                      const std::vector<std::string>& labels);

} // namespace poltun::io
