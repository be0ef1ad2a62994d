#include "poltun/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace poltun::io {

using nlohmann::json;

namespace {

double require_number(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number())
        throw InvalidParameter(std::string("system descriptor: missing numeric field '") + key + "'");
    return j[key].get<double>();
}

oracle::CouplingEnsemble parse_distribution(const json& j, int defaultCount) {
    oracle::CouplingEnsemble ens;
    const std::string kind = j.value("kind", "");
    if (kind == "uniform") {
        ens.kind = oracle::CouplingEnsemble::Kind::Uniform;
        ens.lo = require_number(j, "lo");
        ens.hi = require_number(j, "hi");
    } else if (kind == "gaussian") {
        ens.kind = oracle::CouplingEnsemble::Kind::Gaussian;
        ens.mean = require_number(j, "mean");
        ens.sd = require_number(j, "sd");
    } else if (kind == "twoPoint") {
        ens.kind = oracle::CouplingEnsemble::Kind::TwoPoint;
        ens.v1 = require_number(j, "v1");
        ens.v2 = require_number(j, "v2");
        ens.p = require_number(j, "p");
    } else if (kind == "explicit") {
        ens.kind = oracle::CouplingEnsemble::Kind::Explicit;
        if (!j.contains("values") || !j["values"].is_array())
            throw InvalidParameter("couplingDistribution: explicit kind needs 'values'");
        ens.explicitG2 = j["values"].get<std::vector<double>>();
    } else {
        throw InvalidParameter("couplingDistribution: unknown kind '" + kind + "'");
    }
    ens.count = j.value("count", defaultCount);
    if (j.contains("seed")) ens.seed = j["seed"].get<std::uint64_t>();
    return ens;
}

} // namespace

SystemInput parse_system_json(const json& j) {
    SystemInput in;
    in.spec.omega0 = require_number(j, "omega0");
    in.spec.omegaC = require_number(j, "omegaC");
    in.spec.wallA = require_number(j, "wallA");
    if (j.contains("couplings")) {
        if (!j["couplings"].is_array())
            throw InvalidParameter("system descriptor: 'couplings' must be an array");
        in.spec.couplings = j["couplings"].get<std::vector<double>>();
    }
    if (j.contains("couplingDistribution"))
        in.distribution = parse_distribution(j["couplingDistribution"],
                                             static_cast<int>(in.spec.couplings.size()));
    if (in.spec.couplings.empty() && !in.distribution)
        throw InvalidParameter("system descriptor: needs couplings or a couplingDistribution");
    return in;
}

SystemInput load_system_file(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw InvalidParameter("cannot open system file: " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw InvalidParameter(std::string("malformed JSON in ") + path + ": " + e.what());
    }
    return parse_system_json(j);
}

json system_to_json(const SystemSpec& spec) {
    return json{{"omega0", spec.omega0},
                {"omegaC", spec.omegaC},
                {"wallA", spec.wallA},
                {"couplings", spec.couplings}};
}

SystemSpec preset_system(const std::string& name) {
    SystemSpec s;
    s.omega0 = 1.0;
    s.omegaC = 1.0;
    s.wallA = 2.0; // E_b = 2, S_0 = 4
    if (name == "fig2" || name == "fig3" || name == "fig3params") {
        s.couplings = {0.1, 0.0, 0.1, -0.1, 0.2, -0.2};
    } else if (name == "fig5") {
        s.couplings = {0.1}; // g^2/w0^2 = 0.01, RWA splitting 0.2 w0
    } else if (name == "uncoupled") {
        s.couplings = {0.0, 0.0, 0.0};
    } else {
        throw InvalidParameter("unknown preset '" + name + "'");
    }
    return validate_system(s);
}

std::vector<std::string> preset_names() {
    return {"fig2", "fig3params", "fig5", "uncoupled"};
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (size_t c = 0; c < header.size(); ++c) {
        if (c) out += ',';
        out += header[c];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += fmt17(row[c]);
        }
        out += '\n';
    }
    return out;
}

std::string trajectory_csv(const Trajectory& traj, bool decompose, double omega0) {
    const size_t nComp = traj.terms.size();
    std::vector<std::string> header{"tau", "x"};
    for (size_t i = 1; i < nComp; ++i) header.push_back("q" + std::to_string(i));
    const std::string hit = std::to_string(traj.hitIndex);
    if (decompose) {
        header.push_back("q" + hit + "_bare");
        header.push_back("q" + hit + "_coupling");
    }
    std::vector<std::vector<double>> rows;
    rows.reserve(traj.tauGrid.size());
    for (size_t k = 0; k < traj.tauGrid.size(); ++k) {
        std::vector<double> row;
        row.reserve(nComp + 3);
        row.push_back(traj.tauGrid[k]);
        for (double v : traj.values[k]) row.push_back(v);
        if (decompose) {
            const double bare = traj.amplitude / (2.0 * omega0)
                * std::exp(-omega0 * std::abs(traj.tauGrid[k] - traj.hitTime));
            row.push_back(bare);
            row.push_back(traj.values[k][static_cast<size_t>(traj.hitIndex)] - bare);
        }
        rows.push_back(std::move(row));
    }
    return csv_table(header, rows);
}

json spectrum_to_json(const PolaritonSpectrum& ps) {
    return json{{"omegaPlus", ps.omegaPlus},
                {"omegaMinus", ps.omegaMinus},
                {"delta", ps.delta},
                {"rabiSplitting", ps.rabiSplitting()},
                {"darkCount", ps.darkCount},
                {"darkFrequency", ps.darkFrequency},
                {"mode", ps.mode == SpectrumMode::Exact ? "exact" : "rwa"}};
}

json breakdown_to_json(const RateBreakdown& rb, const HighTResult* highT) {
    json per = json::array();
    for (const auto& p : rb.perSystem) {
        json row{{"i", p.index},
                 {"omegaH", p.omegaH},
                 {"omegaA", p.omegaA},
                 {"action", p.action},
                 {"factor", p.factor}};
        if (highT) {
            const auto& h = highT->perSystem[static_cast<size_t>(p.index - 1)];
            row["highTRatio"] = h.ratio;
            row["highTAction"] = h.action;
            row["highTPrefactor"] = h.prefactor;
        }
        per.push_back(row);
    }
    json out{{"mode", rb.mode == SpectrumMode::Exact ? "exact" : "rwa"},
             {"s0", rb.s0},
             {"perSystem", per},
             {"ensembleR", rb.ensembleR}};
    if (highT) out["beta"] = highT->beta;
    return out;
}

json reports_to_json(const std::vector<oracle::OracleReport>& reports) {
    json arr = json::array();
    for (const auto& r : reports)
        arr.push_back(json{{"check", r.checkName},
                           {"maxError", r.maxError},
                           {"tolerance", r.tolerance},
                           {"pass", r.pass}});
    return arr;
}

std::string svg_chart(const std::vector<double>& x,
                      const std::vector<std::vector<double>>& series,
                      const std::vector<std::string>& labels) {
    const int w = 640, h = 440, pad = 50;
    double xmin = x.front(), xmax = x.back();
    double ymin = series[0][0], ymax = ymin;
    for (const auto& s : series)
        for (double v : s) {
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;
    const auto px = [&](double v) { return pad + (v - xmin) / (xmax - xmin) * (w - 2 * pad); };
    const auto py = [&](double v) { return h - pad - (v - ymin) / (ymax - ymin) * (h - 2 * pad); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << w << ' ' << h << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << w - 2 * pad
       << "\" height=\"" << h - 2 * pad << "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (size_t s = 0; s < series.size(); ++s) {
        os << "<polyline fill=\"none\" stroke=\"" << colors[s % 8] << "\" stroke-width=\"1.5\" points=\"";
        for (size_t k = 0; k < x.size(); ++k)
            os << px(x[k]) << ',' << py(series[s][k]) << ' ';
        os << "\"/>\n";
        os << "<text x=\"" << pad + 8 << "\" y=\"" << pad + 16 + 16 * static_cast<int>(s)
           << "\" fill=\"" << colors[s % 8] << "\" font-size=\"12\">" << labels[s] << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace poltun::io
