// poltun - polaritonic tunneling rate calculator
//
// Subcommands: spectrum, instanton, rate, sweep, verify.  All output is
// figure-ready CSV or JSON; fixed seeds give byte-identical files.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "poltun/instanton.hpp"
#include "poltun/io.hpp"
#include "poltun/oracle.hpp"
#include "poltun/rate.hpp"
#include "poltun/system.hpp"

namespace {

using nlohmann::json;
using namespace poltun;

struct SystemOptions {
    std::string file;
    std::string preset;
    double omega0 = 0.0, omegaC = 0.0, wallA = 0.0;
    std::string couplings;

    void attach(CLI::App* cmd) {
        auto* f = cmd->add_option("--system", file, "system descriptor JSON file");
        auto* p = cmd->add_option("--preset", preset, "named preset (fig2, fig3params, fig5, uncoupled)");
        auto* w = cmd->add_option("--omega0", omega0, "matter frequency");
        cmd->add_option("--omegaC", omegaC, "cavity frequency");
        cmd->add_option("--wallA", wallA, "wall position a");
        cmd->add_option("--couplings", couplings, "comma-separated lambda_i^2 values");
        f->excludes(p);
        f->excludes(w);
        p->excludes(w);
    }

    bool given() const { return !file.empty() || !preset.empty() || omega0 > 0.0; }

    io::SystemInput resolve() const {
        if (!file.empty())
            return io::load_system_file(file);
        if (!preset.empty())
            return io::SystemInput{io::preset_system(preset), std::nullopt};
        if (omega0 > 0.0) {
            SystemSpec s;
            s.omega0 = omega0;
            s.omegaC = omegaC;
            s.wallA = wallA;
            std::stringstream ss(couplings);
            std::string tok;
            while (std::getline(ss, tok, ','))
                if (!tok.empty()) s.couplings.push_back(std::stod(tok));
            return io::SystemInput{std::move(s), std::nullopt};
        }
        throw InvalidParameter("no system given: use --system, --preset, or inline flags");
    }

    SystemSpec resolveValidated() const {
        auto in = resolve();
        return in.spec.validated ? in.spec : validate_system(in.spec);
    }
};

void write_output(const std::string& target, const std::string& text) {
    if (target.empty()) {
        std::cout << text;
        return;
    }
    std::filesystem::path path(target);
    if (path.is_relative()) {
        if (const char* dir = std::getenv("POLTUN_OUTPUT_DIR"))
            path = std::filesystem::path(dir) / path;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw InvalidParameter("cannot write to " + path.string());
    f << text;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(std::stod(tok));
    return out;
}

std::vector<double> linear_range(double from, double to, int steps) {
    if (steps < 1 || to < from)
        throw InvalidParameter("empty sweep range");
    std::vector<double> out(static_cast<size_t>(steps));
    for (int i = 0; i < steps; ++i)
        out[static_cast<size_t>(i)] =
            (steps == 1) ? from : from + (to - from) * i / (steps - 1.0);
    return out;
}

SpectrumMode parse_mode(const std::string& m) {
    if (m == "exact") return SpectrumMode::Exact;
    if (m == "rwa" || m == "RWA") return SpectrumMode::RWA;
    throw InvalidParameter("mode must be 'exact' or 'rwa'");
}

int run(int argc, char** argv) {
    CLI::App app{"poltun - cavity-modified tunneling rates from analytic instantons"};
    app.require_subcommand(1);
    app.fallthrough(); // -o/--format/--mode may follow the subcommand

    std::string output;
    std::string format = "csv";
    std::string mode = "exact";
    app.add_option("-o,--output", output,
                   "output file (relative paths resolve under POLTUN_OUTPUT_DIR)")
        ->capture_default_str();
    app.add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_option("--mode", mode, "polariton frequencies: exact or rwa")
        ->check(CLI::IsMember({"exact", "rwa"}))
        ->capture_default_str();

    // ---- spectrum ----
    auto* spectrum = app.add_subcommand("spectrum", "polariton frequencies and detuning");
    SystemOptions spectrumSys;
    spectrumSys.attach(spectrum);
    spectrum->callback([&] {
        const SystemSpec spec = spectrumSys.resolveValidated();
        const PolaritonSpectrum ps = polariton_spectrum(spec, parse_mode(mode));
        if (format == "json") {
            write_output(output, io::spectrum_to_json(ps).dump(2) + "\n");
        } else {
            write_output(output, io::csv_table(
                {"omegaPlus", "omegaMinus", "delta", "rabiSplitting", "darkCount", "darkFrequency"},
                {{ps.omegaPlus, ps.omegaMinus, ps.delta, ps.rabiSplitting(),
                  static_cast<double>(ps.darkCount), ps.darkFrequency}}));
        }
    });

    // ---- instanton ----
    auto* instanton = app.add_subcommand("instanton", "imaginary-time bounce trajectory");
    SystemOptions instSys;
    instSys.attach(instanton);
    int hit = 1, points = 1001;
    double tau1 = 0.0;
    std::optional<double> tauMin, tauMax;
    bool decompose = false;
    instanton->add_option("--hit", hit, "bouncing quadrature (1-based)")->capture_default_str();
    instanton->add_option("--tau1", tau1, "hitting time")->capture_default_str();
    instanton->add_option("--tau-min", [&tauMin](const auto& v) { tauMin = std::stod(v[0]); return true; },
                          "grid start");
    instanton->add_option("--tau-max", [&tauMax](const auto& v) { tauMax = std::stod(v[0]); return true; },
                          "grid end");
    instanton->add_option("--points", points, "grid points")->capture_default_str();
    instanton->add_flag("--decompose", decompose,
                        "add bare-bounce and coupling columns for the bouncing quadrature");
    instanton->callback([&] {
        const SystemSpec spec = instSys.resolveValidated();
        const PolaritonSpectrum ps = polariton_spectrum(spec);
        const double spread = 10.0 / std::min(ps.omegaMinus, spec.omega0);
        const double lo = tauMin.value_or(tau1 - spread);
        const double hi = tauMax.value_or(tau1 + spread);
        if (points < 2 || !(lo < hi))
            throw InvalidParameter("instanton: bad grid request");
        if (tau1 < lo || tau1 > hi)
            throw InvalidParameter("instanton: tau1 lies outside the grid");
        std::vector<double> grid(static_cast<size_t>(points));
        for (int k = 0; k < points; ++k)
            grid[static_cast<size_t>(k)] = lo + (hi - lo) * k / (points - 1.0);
        const Trajectory traj = instanton_path(spec, hit, grid, tau1);
        if (format == "json") {
            json j{{"hitIndex", traj.hitIndex},
                   {"hitTime", traj.hitTime},
                   {"amplitude", traj.amplitude},
                   {"tau", traj.tauGrid}};
            json comps = json::array();
            for (size_t c = 0; c < traj.terms.size(); ++c) {
                std::vector<double> col(traj.tauGrid.size());
                for (size_t k = 0; k < col.size(); ++k) col[k] = traj.values[k][c];
                comps.push_back(col);
            }
            j["components"] = comps;
            write_output(output, j.dump(2) + "\n");
        } else {
            write_output(output, io::trajectory_csv(traj, decompose, spec.omega0));
        }
    });

    // ---- rate ----
    auto* rate = app.add_subcommand("rate", "tunneling rate modification");
    SystemOptions rateSys;
    rateSys.attach(rate);
    std::optional<double> s0Override, rateBeta;
    int samples = 0;
    std::uint64_t seed = 1;
    rate->add_option("--s0", [&s0Override](const auto& v) { s0Override = std::stod(v[0]); return true; },
                     "override the bare action S_0");
    rate->add_option("--beta", [&rateBeta](const auto& v) { rateBeta = std::stod(v[0]); return true; },
                     "also report the high-temperature comparison at this beta");
    rate->add_option("--samples", samples, "Monte Carlo samples for a coupling distribution");
    rate->add_option("--seed", seed, "Monte Carlo seed")->capture_default_str();
    rate->callback([&] {
        auto in = rateSys.resolve();
        if (in.distribution && in.spec.couplings.empty() && samples <= 0)
            throw InvalidParameter("rate: a coupling distribution needs --samples > 0");
        if (in.distribution && samples > 0) {
            auto ens = *in.distribution;
            ens.seed = seed;
            SystemSpec tmpl = in.spec;
            tmpl.couplings.clear();
            const double s0 = s0Override.value_or(
                tmpl.omega0 * tmpl.wallA * tmpl.wallA); // S_0 = w0 a^2
            const auto mc = oracle::monte_carlo_ensemble(ens, tmpl, s0, samples,
                                                         parse_mode(mode));
            if (format == "json") {
                write_output(output, json{{"rMean", mc.rMean},
                                          {"rStdErr", mc.rStdErr},
                                          {"samples", mc.samples},
                                          {"rejected", mc.rejected},
                                          {"seed", seed}}.dump(2) + "\n");
            } else {
                write_output(output, io::csv_table(
                    {"rMean", "rStdErr", "samples", "rejected"},
                    {{mc.rMean, mc.rStdErr, static_cast<double>(mc.samples),
                      static_cast<double>(mc.rejected)}}));
            }
            return;
        }
        const SystemSpec spec = in.spec.validated ? in.spec : validate_system(in.spec);
        const auto rb = rate_modification_exact(spec, s0Override, parse_mode(mode));
        std::optional<HighTResult> ht;
        if (rateBeta) ht = high_t_action(spec, *rateBeta);
        if (format == "json") {
            write_output(output,
                         io::breakdown_to_json(rb, ht ? &*ht : nullptr).dump(2) + "\n");
        } else {
            std::vector<std::string> header{"i", "omegaH", "omegaA", "action", "factor", "rEnsemble"};
            if (ht) {
                header.push_back("highTRatio");
                header.push_back("highTAction");
                header.push_back("highTPrefactor");
            }
            std::vector<std::vector<double>> rows;
            for (const auto& p : rb.perSystem) {
                std::vector<double> row{static_cast<double>(p.index), p.omegaH, p.omegaA,
                                        p.action, p.factor, rb.ensembleR};
                if (ht) {
                    const auto& h = ht->perSystem[static_cast<size_t>(p.index - 1)];
                    row.push_back(h.ratio);
                    row.push_back(h.action);
                    row.push_back(h.prefactor);
                }
                rows.push_back(std::move(row));
            }
            write_output(output, io::csv_table(header, rows));
        }
    });

    // ---- sweep ----
    auto* sweep = app.add_subcommand("sweep", "CSV over a swept parameter");
    SystemOptions sweepSys;
    sweepSys.attach(sweep);
    std::string param = "g2ratio";
    double from = 0.0, to = 0.3;
    int steps = 61;
    std::string s0List = "1,2,4,8";
    std::string nList = "10,100,1000";
    double collective = 0.25;
    double sweepS0 = 4.0, sweepG2 = 0.1;
    std::string svgFile;
    sweep->add_option("--param", param, "g2ratio | N | S0 | beta")
        ->check(CLI::IsMember({"g2ratio", "N", "S0", "beta"}))
        ->capture_default_str();
    sweep->add_option("--from", from, "range start")->capture_default_str();
    sweep->add_option("--to", to, "range end")->capture_default_str();
    sweep->add_option("--steps", steps, "number of points")->capture_default_str();
    sweep->add_option("--s0-list", s0List, "S_0 values, one output column each (g2ratio sweep)")
        ->capture_default_str();
    sweep->add_option("--n-list", nList, "ensemble sizes (N sweep)")->capture_default_str();
    sweep->add_option("--collective", collective, "fixed N<g^2>/(w0 wc) for the N sweep")
        ->capture_default_str();
    sweep->add_option("--s0", sweepS0, "fixed S_0 (N and beta sweeps)")->capture_default_str();
    sweep->add_option("--g2ratio", sweepG2, "fixed g^2/(wc w0) (S0 sweep)")->capture_default_str();
    sweep->add_option("--svg", svgFile, "also write a line chart to this SVG file");
    sweep->callback([&] {
        std::vector<std::string> header;
        std::vector<std::vector<double>> rows;
        if (param == "g2ratio") {
            const auto s0s = parse_list(s0List);
            if (s0s.empty()) throw InvalidParameter("sweep: empty --s0-list");
            header.push_back("g2ratio");
            for (double s0 : s0s) {
                std::ostringstream name;
                name << "r_s0_" << s0;
                header.push_back(name.str());
            }
            for (double g2 : linear_range(from, to, steps)) {
                std::vector<double> row{g2};
                for (double s0 : s0s) row.push_back(rate_modification_single(g2, s0));
                rows.push_back(std::move(row));
            }
        } else if (param == "N") {
            SystemSpec tmpl;
            if (sweepSys.given()) {
                tmpl = sweepSys.resolveValidated();
            } else {
                tmpl.omega0 = tmpl.omegaC = 1.0;
                tmpl.wallA = 2.0;
            }
            header = {"N", "r", "scaledDeviation"};
            for (double nval : parse_list(nList)) {
                const int n = static_cast<int>(nval);
                if (n < 1) throw InvalidParameter("sweep: N must be positive");
                const double w0wc = tmpl.omega0 * tmpl.omegaC;
                SystemSpec s = tmpl;
                s.validated = false;
                s.couplings.assign(static_cast<size_t>(n),
                                   w0wc * std::sqrt(collective / n));
                s = validate_system(s);
                const double r = rate_modification_exact(s, sweepS0, parse_mode(mode)).ensembleR;
                rows.push_back({static_cast<double>(n), r, n * std::abs(r - 1.0)});
            }
        } else if (param == "S0") {
            header = {"s0", "r", "rLinearized"};
            for (double s0 : linear_range(from, to, steps))
                rows.push_back({s0, rate_modification_single(sweepG2, s0),
                                rate_single_linearized(sweepG2, s0)});
        } else { // beta
            const SystemSpec spec = sweepSys.resolveValidated();
            header = {"beta", "actionFiniteBeta", "actionZeroT", "actionHighT"};
            for (double b : linear_range(from, to, steps)) {
                if (!(b > 0.0)) throw InvalidParameter("sweep: beta must be positive");
                rows.push_back({b, action_finite_beta(spec, 1, b),
                                action_zero_t(spec, 1),
                                high_t_action(spec, b).perSystem[0].action});
            }
        }
        write_output(output, io::csv_table(header, rows));
        if (!svgFile.empty()) {
            std::vector<double> x;
            std::vector<std::vector<double>> series(header.size() - 1);
            for (const auto& row : rows) {
                x.push_back(row[0]);
                for (size_t c = 1; c < row.size(); ++c)
                    series[c - 1].push_back(row[c]);
            }
            write_output(svgFile, io::svg_chart(
                x, series, {header.begin() + 1, header.end()}));
        }
    });

    // ---- verify ----
    auto* verify = app.add_subcommand("verify", "run the oracle cross-check battery");
    SystemOptions verifySys;
    verifySys.attach(verify);
    std::optional<double> tolOverride;
    bool quick = false;
    std::uint64_t verifySeed = 982451653;
    verify->add_option("--tolerance",
                       [&tolOverride](const auto& v) { tolOverride = std::stod(v[0]); return true; },
                       "override every check tolerance");
    verify->add_flag("--quick", quick, "skip the slowest cross-checks");
    verify->add_option("--seed", verifySeed, "seed for stochastic checks")->capture_default_str();
    int verifyExit = 0;
    verify->callback([&] {
        oracle::VerifyOptions opt;
        if (tolOverride) opt.toleranceOverride = *tolOverride;
        opt.quick = quick;
        opt.seed = verifySeed;

        std::vector<std::pair<std::string, SystemSpec>> specs;
        if (verifySys.given()) {
            specs.emplace_back("spec", verifySys.resolveValidated());
        } else {
            specs.emplace_back("fig3params", io::preset_system("fig3params"));
            specs.emplace_back("uncoupled", io::preset_system("uncoupled"));
            specs.emplace_back("fig5", io::preset_system("fig5"));
        }
        std::vector<oracle::OracleReport> all;
        for (const auto& [name, spec] : specs) {
            auto reports = oracle::run_verification(spec, opt);
            for (auto& r : reports) {
                r.checkName = name + ":" + r.checkName;
                std::cerr << (r.pass ? "pass" : "FAIL") << "  " << r.checkName
                          << "  err=" << r.maxError << "  tol=" << r.tolerance
                          << "  (" << r.runtimeSeconds << " s)\n";
                all.push_back(r);
            }
        }
        write_output(output, io::reports_to_json(all).dump(2) + "\n");
        for (const auto& r : all)
            if (!r.pass) verifyExit = 1;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    return verifyExit;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
