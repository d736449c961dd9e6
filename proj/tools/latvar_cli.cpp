// latvar: command-line front end for the lattice spectral toolkit.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "latvar/latvar.hpp"
#include "latvar/potential_spec.hpp"
#include "latvar/report.hpp"
#include "latvar/scoreboard.hpp"

#ifndef LATVAR_CORPUS_DIR
#define LATVAR_CORPUS_DIR ""
#endif

namespace {

using namespace latvar;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitHypothesis = 2;
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;

/// Bad flag values that CLI11 cannot see (grids, lists, ranges).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Common {
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::string format = "json";
    std::string output;
    std::string cache_dir;
};

struct PotentialArgs {
    std::string spec;
    std::string family;
    std::int64_t n0 = 1;
    double lambda = 1.0;
    double beta = 1.0;
    double c = 1.0;
    double alpha = 1.0;
    bool alternate = false;
    std::int64_t base = 2;
    std::int64_t k_max = 1;
    std::string values_file;
    std::string domain = "half_line:1000";
};

PotentialSpec build_spec(const PotentialArgs& a) {
    if (!a.spec.empty()) {
        if (a.spec.front() == '{') {
            json j;
            try {
                j = json::parse(a.spec);
            } catch (const json::parse_error& e) {
                throw SpecError("", std::string("invalid inline JSON: ") + e.what());
            }
            return PotentialSpec::parse(j);
        }
        return PotentialSpec::load(a.spec);
    }
    if (a.family.empty()) throw UsageError("either --spec or --family is required");
    json j{{"family", a.family}, {"domain", domain_from_string(a.domain)}};
    json p = json::object();
    if (a.family == "single-site" || a.family == "dipole") p = {{"n0", a.n0}, {"lambda", a.lambda}};
    if (a.family == "alternating") p = {{"beta", a.beta}};
    if (a.family == "power-law") p = {{"C", a.c}, {"alpha", a.alpha}, {"alternate", a.alternate}};
    if (a.family == "staircase") p = {{"base", a.base}, {"k_max", a.k_max}};
    if (a.family == "sparse-3d") p = {{"lambda", a.lambda}};
    if (a.family == "custom") p = {{"values_file", a.values_file.empty() ? "none" : a.values_file}};
    j["params"] = p;
    return PotentialSpec::parse(j);
}

void add_potential_options(CLI::App* sub, PotentialArgs& a) {
    sub->add_option("--spec", a.spec, "Potential spec: JSON file or inline JSON object");
    sub->add_option("--family", a.family, "Builtin family")
        ->check(CLI::IsMember({"zero", "single-site", "dipole", "alternating", "power-law", "staircase", "sparse-3d",
                               "custom"}));
    sub->add_option("--n0", a.n0, "Site of the single-site or dipole potential");
    sub->add_option("--lambda", a.lambda, "Coupling of single-site, dipole and sparse-3d potentials");
    sub->add_option("--beta", a.beta, "Coupling of beta (-1)^n / n");
    sub->add_option("--C", a.c, "Amplitude of C n^-alpha");
    sub->add_option("--alpha", a.alpha, "Exponent of C n^-alpha");
    sub->add_flag("--alternate", a.alternate, "Multiply C n^-alpha by (-1)^n");
    sub->add_option("--base", a.base, "Staircase base N");
    sub->add_option("--k-max", a.k_max, "Number of staircase steps");
    sub->add_option("--values-file", a.values_file, "CSV of index,value rows for the custom family, or none");
    sub->add_option("--domain", a.domain, "half_line:N, whole_line:L[:R] or box:h1,h2,...")->capture_default_str();
}

std::vector<std::int64_t> parse_int_list(const std::string& s, const std::string& what) {
    std::vector<std::int64_t> out;
    std::stringstream ss(s);
    for (std::string part; std::getline(ss, part, ',');) {
        try {
            std::size_t pos = 0;
            const double x = std::stod(part, &pos);
            if (pos != part.size() || x != std::floor(x)) throw std::invalid_argument(part);
            out.push_back(static_cast<std::int64_t>(x));
        } catch (const std::exception&) {
            throw UsageError(what + ": bad entry '" + part + "'");
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i)
        if (out[i] < 1 || (i > 0 && out[i] <= out[i - 1]))
            throw UsageError(what + " must be positive and increasing");
    if (out.empty()) throw UsageError(what + " is empty");
    return out;
}

/// a:b:step, inclusive of b up to rounding.
std::vector<double> parse_grid(const std::string& s) {
    std::vector<double> parts;
    std::stringstream ss(s);
    for (std::string p; std::getline(ss, p, ':');) {
        try {
            parts.push_back(std::stod(p));
        } catch (const std::exception&) {
            throw UsageError("--lambda-grid: bad number '" + p + "'");
        }
    }
    if (parts.size() != 3 || !(parts[2] > 0) || parts[1] < parts[0])
        throw UsageError("--lambda-grid must be a:b:step with a <= b and step > 0");
    const auto count = static_cast<std::int64_t>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
    std::vector<double> g;
    for (std::int64_t k = 0; k <= count; ++k) g.push_back(parts[0] + static_cast<double>(k) * parts[2]);
    return g;
}

void emit(const Common& c, const std::string& text) {
    if (c.output.empty() || c.output == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(c.output, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file '" + c.output + "'");
    out << text;
    if (!out) throw std::runtime_error("write to '" + c.output + "' failed");
}

void emit_report(const Common& c, const json& report, const std::string& csv = "") {
    if (c.format == "csv")
        emit(c, csv.empty() ? flatten_csv(report) : csv);
    else
        emit(c, to_json_text(report));
}

json envelope(const std::string& command, const PotentialSpec* spec) {
    json j{{"command", command}, {"version", kReportVersion}};
    if (spec) j["potential"] = spec->to_json();
    return j;
}

HalfLinePotential require_half_line(const PotentialSpec& s) {
    auto hl = s.half_line();
    if (!hl) throw SpecError("/domain/kind", "this command needs a half-line potential");
    return *hl;
}

std::int64_t window_size(const PotentialSpec& s, std::int64_t override_n) {
    if (override_n > 0) return override_n;
    if (s.domain.is_null()) throw SpecError("/domain", "a truncation size is needed: give a domain or --n");
    return static_cast<std::int64_t>(s.window().size());
}

struct Options {
    Common common;
    PotentialArgs pot;
    double tolerance = 1e-8;
    std::size_t dense_cap = kDefaultDenseCap;
    std::int64_t n = 0;
    std::string tail = "auto";
    std::string lambda_grid;
    std::string mode = "pair";
    std::int64_t center = 0;
    std::int64_t radius = 8;
    bool cutoff = false;
    double a = 1.0;
    std::size_t m = 1;
    std::string criterion = "inverse-linear";
    std::string truncations = "1000,10000,100000,1000000";
    std::string nk;
    std::int64_t beta_from = 1;
    bool whole_line = false;
    double gamma = 0.3;
    double growth_factor = 2.0;
    int nu = 3;
    int resolution = 256;
    std::int64_t axis_max = 10;
    std::string offsets;
    std::size_t sites = 5;
    std::int64_t transverse = 10;
    std::int64_t margin = 10;
    int iters = 200000;
    std::string which = "all";
    bool quick = false;
    std::string corpus = LATVAR_CORPUS_DIR;
    int green_resolution = 0;
    std::string config;
};

int cmd_spectrum(const Options& o) {
    const auto spec = build_spec(o.pot);
    const auto v = spec.build();
    const auto r = eigenvalues_outside_band(LatticeOperator(v), o.tolerance, o.common.workers, o.dense_cap);
    auto j = envelope("spectrum", &spec);
    j["report"] = to_json(r);
    emit_report(o.common, j, spectrum_csv(r));
    return kExitOk;
}

int cmd_oscillate(const Options& o) {
    const auto spec = build_spec(o.pot);
    const auto n = window_size(spec, o.n);
    const auto mode = o.tail == "truncated" ? TailMode::Truncated : TailMode::Auto;
    std::vector<std::optional<double>> grid;
    if (o.lambda_grid.empty())
        grid.push_back(std::nullopt);
    else
        for (double x : parse_grid(o.lambda_grid)) grid.push_back(x);
    const auto name = spec.coupling_name();
    if (!o.lambda_grid.empty() && name.empty())
        throw UsageError("--lambda-grid: family '" + spec.family + "' has no coupling parameter");
    std::vector<BoundStateCount> counts(grid.size());
    std::vector<PotentialSpec> specs;
    for (const auto& g : grid) specs.push_back(g ? spec.with_coupling(*g) : spec);
    std::vector<HalfLinePotential> pots;
    for (const auto& s : specs) pots.push_back(require_half_line(s));
    parallel_for(grid.size(), o.common.workers, [&](std::size_t i) { counts[i] = count_bound_states(pots[i], n, mode); });
    json rows = json::array();
    std::ostringstream csv;
    csv << "coupling,above,below,above_2n,below_2n,stable\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto r = to_json(counts[i]);
        r["coupling"] = grid[i] ? json(*grid[i]) : json(nullptr);
        rows.push_back(r);
        csv << (grid[i] ? csv_number(*grid[i]) : "") << "," << counts[i].above << "," << counts[i].below << ","
            << counts[i].above_2n << "," << counts[i].below_2n << "," << (counts[i].stable ? "true" : "false") << "\n";
    }
    auto j = envelope("oscillate", &spec);
    j["coupling_parameter"] = name;
    j["tail"] = o.tail;
    j["rows"] = rows;
    emit_report(o.common, j, csv.str());
    return kExitOk;
}

int cmd_certify(const Options& o) {
    const auto spec = build_spec(o.pot);
    const auto v = spec.build();
    auto j = envelope("certify", &spec);
    j["mode"] = o.mode;
    if (o.mode == "essential") {
        try {
            j["report"] = to_json(essential_spectrum_certificates(v, o.a, o.m));
            j["hypotheses_hold"] = true;
        } catch (const QualifyingSitesExhausted& e) {
            j["hypotheses_hold"] = false;
            j["error"] = e.what();
            emit_report(o.common, j);
            return kExitHypothesis;
        }
        emit_report(o.common, j);
        return kExitOk;
    }
    const auto& d = v.domain();
    TrialFunction phi(d);
    if (d.dim() == 1) {
        phi = tent_at(d, o.center, o.radius, o.radius);
    } else if (d.dim() == 2) {
        phi = log_trial_2d(o.radius).materialize(d, Site{o.center, 0});
    } else {
        throw UsageError("certify --mode pair supports one- and two-dimensional domains");
    }
    const LatticeOperator op(v);
    const auto cert = o.cutoff ? trial_pair(phi, op, CutoffF::from_potential(v)) : trial_pair(phi, op);
    j["report"] = to_json(cert);
    emit_report(o.common, j);
    return cert.positive() ? kExitOk : kExitHypothesis;
}

int cmd_compare(const Options& o) {
    const auto spec = build_spec(o.pot);
    ComparisonVerdict verdict;
    if (auto hl = spec.half_line()) {
        verdict = v_squared_comparison(*hl, window_size(spec, o.n), o.m);
    } else {
        verdict = v_squared_comparison(spec.build(), o.m, o.tolerance, o.dense_cap);
    }
    auto j = envelope("compare-v2", &spec);
    j["report"] = to_json(verdict);
    emit_report(o.common, j);
    if (!verdict.holds) {
        std::cerr << "latvar: comparison verdict is false; this contradicts the theorem\n";
        return kExitInternal;
    }
    return kExitOk;
}

int cmd_bargmann(const Options& o) {
    const auto spec = build_spec(o.pot);
    const auto v = spec.build();
    const auto r = bargmann_check(v);
    auto j = envelope("bargmann", &spec);
    j["report"] = to_json(r);
    j["decay_bounds"] = to_json(decay_bound_check(v));
    emit_report(o.common, j);
    if (!r.consistent) {
        std::cerr << "latvar: bound states found although sum n|V(n)| <= 1\n";
        return kExitInternal;
    }
    return r.predicts_no_bound_states ? kExitOk : kExitHypothesis;
}

int cmd_infinitude(const Options& o) {
    const auto spec = build_spec(o.pot);
    const auto truncs = parse_int_list(o.truncations, "--truncations");
    auto j = envelope("infinitude", &spec);
    if (o.whole_line) {
        PotentialSpec half = spec;
        half.domain = json{{"kind", "half_line"}, {"n", 1}};
        const auto hl = require_half_line(half);
        const auto w = whole_line_counts([hl](std::int64_t n) { return n == 0 ? 0.0 : hl(std::abs(n)); }, truncs,
                                         o.common.workers);
        j["report"] = to_json(w);
        emit_report(o.common, j);
        return kExitOk;
    }
    const auto crit = criterion_from_string(o.criterion);
    if (!crit) throw UsageError("--criterion must be averaged-positive, averaged-square or inverse-linear");
    const auto hl = require_half_line(spec);
    std::vector<std::int64_t> nk;
    if (!o.nk.empty()) nk = parse_int_list(o.nk, "--nk");
    const auto e = infinitude_check(hl, *crit, truncs, nk, o.beta_from, o.common.workers);
    j["report"] = to_json(e);
    emit_report(o.common, j);
    return e.hypotheses_hold ? kExitOk : kExitHypothesis;
}

int cmd_moments(const Options& o) {
    const auto truncs = parse_int_list(o.truncations, "--truncations");
    MomentReport r;
    json j;
    if (!o.pot.spec.empty() || !o.pot.family.empty()) {
        const auto spec = build_spec(o.pot);
        r = moment_divergence_experiment(require_half_line(spec), o.pot.c, o.pot.alpha, o.gamma, truncs,
                                         o.common.workers, o.growth_factor);
        j = envelope("moments", &spec);
    } else {
        r = moment_divergence_experiment(o.pot.c, o.pot.alpha, o.gamma, truncs, o.common.workers, o.growth_factor);
        j = envelope("moments", nullptr);
    }
    j["report"] = to_json(r);
    emit_report(o.common, j, moments_csv(r));
    if (!r.decay_verified) return kExitHypothesis;
    return r.below_threshold ? kExitOk : kExitHypothesis;
}

std::optional<std::filesystem::path> cache_dir(const Common& c) {
    if (!c.cache_dir.empty()) return std::filesystem::path(c.cache_dir);
    return GreenTable::cache_dir_from_env();
}

int cmd_greens(const Options& o) {
    GreenTable table(o.nu, o.resolution, o.common.workers);
    const auto dir = cache_dir(o.common);
    if (dir) table.load(*dir / GreenTable::cache_file_name(o.nu, o.resolution));
    for (std::int64_t m = 0; m <= o.axis_max; ++m) table.axis(m);
    if (!o.offsets.empty()) {
        std::stringstream ss(o.offsets);
        for (std::string item; std::getline(ss, item, ';');) {
            std::vector<std::int64_t> s;
            std::stringstream is(item);
            for (std::string x; std::getline(is, x, ',');) {
                try {
                    s.push_back(std::stoll(x));
                } catch (const std::exception&) {
                    throw UsageError("--offsets: bad coordinate '" + x + "'");
                }
            }
            if (static_cast<int>(s.size()) != o.nu) throw UsageError("--offsets: each offset needs nu coordinates");
            table.entry(s);
        }
    }
    if (dir) {
        std::filesystem::create_directories(*dir);
        table.save(*dir / GreenTable::cache_file_name(o.nu, o.resolution));
    }
    auto j = envelope("greens", nullptr);
    j["report"] = to_json(table);
    emit_report(o.common, j, green_csv(table));
    return kExitOk;
}

int cmd_bs(const Options& o) {
    GreenTable table(o.nu, o.resolution, o.common.workers);
    const auto dir = cache_dir(o.common);
    if (dir) table.load(*dir / GreenTable::cache_file_name(o.nu, o.resolution));
    auto j = envelope("bs", nullptr);
    j["parameters"] = {{"nu", o.nu}, {"lambda", o.pot.lambda}, {"sites", o.sites}, {"resolution", o.resolution}};
    SparseCounterexample ex;
    try {
        ex = sparse_counterexample(o.nu, o.sites, o.pot.lambda, table);
    } catch (const CouplingTooLarge& e) {
        j["hypotheses_hold"] = false;
        j["error"] = e.what();
        j["critical_lambda"] = e.critical_lambda;
        emit_report(o.common, j);
        return kExitHypothesis;
    }
    if (dir) {
        std::filesystem::create_directories(*dir);
        table.save(*dir / GreenTable::cache_file_name(o.nu, o.resolution));
    }
    const auto box = ex.verification_box(o.transverse, o.margin);
    const auto top =
        operator_norm_power_iteration(LatticeOperator(ex.on(box)), 2.0 * o.nu + ex.value, o.iters, o.common.seed);
    j["hypotheses_hold"] = true;
    j["report"] = to_json(ex);
    j["green_max_error"] = table.max_error();
    j["green_converged"] = table.converged();
    j["verification_box"] = box.describe();
    j["power_iteration"] = to_json(top);
    j["no_spectrum_above_band"] = ex.bs.schur_bound < 1.0 && top.estimate <= 2.0 * o.nu + 1e-6;
    emit_report(o.common, j);
    return kExitOk;
}

int cmd_examples(const Options& o) {
    auto j = envelope("examples", nullptr);
    json list = json::array();
    bool ok = true;
    auto add = [&](const CheckResult& c) {
        ok = ok && c.status != "fail";
        list.push_back(to_json(c));
    };
    if (o.which == "single-site" || o.which == "all") add(check_single_site_threshold(20));
    if (o.which == "dipole" || o.which == "all") add(check_dipole_threshold(50));
    if (o.which == "staircase" || o.which == "all") add(check_staircase());
    if (o.which == "altex" || o.which == "all") add(check_alternating_borderline(1000000));
    j["examples"] = list;
    emit_report(o.common, j);
    return ok ? kExitOk : kExitInternal;
}

int cmd_scoreboard(const Options& o) {
    ScoreboardOptions so;
    so.quick = o.quick;
    so.seed = o.common.seed;
    so.workers = o.common.workers;
    so.corpus_dir = o.corpus;
    so.green_resolution = o.green_resolution;
    auto j = envelope("scoreboard", nullptr);
    j["report"] = run_scoreboard(so);
    emit_report(o.common, j);
    return j["report"]["summary"]["fail"].get<std::size_t>() == 0 ? kExitOk : kExitInternal;
}

int run_cli(std::vector<std::string> args);

/// RunConfig: {"command", "potential_spec" (path or object), "truncations",
/// "tolerance", "output", "format", "seed", "workers", "params": {flag: value}}
int cmd_run(const Options& o) {
    std::ifstream in(o.config);
    if (!in) throw SpecError("", "cannot open run config '" + o.config + "'");
    json c;
    try {
        c = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SpecError("", std::string("invalid JSON: ") + e.what());
    }
    if (!c.is_object()) throw SpecError("", "run config must be an object");
    static const std::vector<std::string> commands{"spectrum", "oscillate", "certify", "compare-v2", "bargmann",
                                                   "infinitude", "moments",  "greens",  "bs",         "examples",
                                                   "scoreboard"};
    if (!c.contains("command") || !c["command"].is_string()) throw SpecError("/command", "missing or not a string");
    const auto command = c["command"].get<std::string>();
    if (std::find(commands.begin(), commands.end(), command) == commands.end())
        throw SpecError("/command", "unknown command '" + command + "'");
    static const std::vector<std::string> keys{"command", "potential_spec", "truncations", "tolerance", "output",
                                               "format",  "seed",           "workers",     "params"};
    for (auto it = c.begin(); it != c.end(); ++it)
        if (std::find(keys.begin(), keys.end(), it.key()) == keys.end())
            throw SpecError("/" + it.key(), "unknown run config key");
    std::vector<std::string> args{"latvar", command};
    if (c.contains("potential_spec")) {
        const auto& p = c["potential_spec"];
        if (p.is_string()) {
            auto path = p.get<std::string>();
            const auto slash = o.config.find_last_of('/');
            if (!path.empty() && path[0] != '/' && slash != std::string::npos) path = o.config.substr(0, slash) + "/" + path;
            args.insert(args.end(), {"--spec", path});
        } else if (p.is_object()) {
            PotentialSpec::parse(p);
            args.insert(args.end(), {"--spec", p.dump()});
        } else {
            throw SpecError("/potential_spec", "expected a path or an object");
        }
    }
    if (c.contains("truncations")) {
        const auto& t = c["truncations"];
        if (!t.is_array() || t.empty()) throw SpecError("/truncations", "expected a nonempty array");
        std::string list;
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (!t[i].is_number_integer() || t[i].get<std::int64_t>() < 1 ||
                (i > 0 && t[i].get<std::int64_t>() <= t[i - 1].get<std::int64_t>()))
                throw SpecError("/truncations/" + std::to_string(i), "truncations must be positive and increasing");
            list += (i ? "," : "") + std::to_string(t[i].get<std::int64_t>());
        }
        if (command == "infinitude" || command == "moments")
            args.insert(args.end(), {"--truncations", list});
        else if (command == "oscillate" && t.size() == 1)
            args.insert(args.end(), {"--n", list});
        else
            throw SpecError("/truncations", "not used by '" + command + "'");
    }
    if (c.contains("tolerance")) {
        if (!c["tolerance"].is_number() || !(c["tolerance"].get<double>() > 0))
            throw SpecError("/tolerance", "must be a positive number");
        args.insert(args.end(), {"--tolerance", detail::format_double(c["tolerance"].get<double>())});
    }
    auto scalar = [](const json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_number_float()) return detail::format_double(v.get<double>());
        return v.dump();
    };
    for (const char* key : {"output", "format", "seed", "workers"})
        if (c.contains(key)) args.insert(args.end(), {std::string("--") + key, scalar(c[key])});
    if (c.contains("params")) {
        if (!c["params"].is_object()) throw SpecError("/params", "expected an object");
        for (auto it = c["params"].begin(); it != c["params"].end(); ++it) {
            std::string flag = "--" + it.key();
            std::replace(flag.begin(), flag.end(), '_', '-');
            if (it->is_boolean()) {
                if (it->get<bool>()) args.push_back(flag);
            } else if (it->is_array() || it->is_object()) {
                throw SpecError("/params/" + it.key(), "expected a scalar");
            } else {
                args.insert(args.end(), {flag, scalar(*it)});
            }
        }
    }
    return run_cli(args);
}

int run_cli(std::vector<std::string> args) {
    CLI::App app{"Spectral toolkit for discrete Schroedinger and Jacobi operators: bound states outside the band, "
                 "variational certificates, oscillation counts and lattice Green functions."};
    app.name("latvar");
    app.fallthrough();
    app.require_subcommand(1);
    Options o;
    app.add_option("--seed", o.common.seed, "Seed for every random draw")->capture_default_str();
    app.add_option("--workers", o.common.workers, "Worker threads")->check(CLI::Range(1u, 256u))->capture_default_str();
    app.add_option("--format", o.common.format, "Report format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    app.add_option("--output", o.common.output, "Report file (stdout when omitted)");
    app.add_option("--cache-dir", o.common.cache_dir, "Green table cache directory (default $LATVAR_CACHE_DIR)");

    auto* spectrum = app.add_subcommand(
        "spectrum", "Eigenvalues outside [-2nu, 2nu] by Sturm bisection or dense QL (min-max principle, band bound)");
    add_potential_options(spectrum, o.pot);
    spectrum->add_option("--tolerance", o.tolerance, "Eigenvalues must clear the band by more than this")
        ->check(CLI::PositiveNumber);
    spectrum->add_option("--dense-cap", o.dense_cap, "Largest box solved densely");

    auto* oscillate = app.add_subcommand(
        "oscillate", "Bound-state counts from Sturm oscillation theory: sign changes of the energy +-2 solution "
                     "(single-site threshold 1/n0, dipole threshold)");
    add_potential_options(oscillate, o.pot);
    oscillate->add_option("--n", o.n, "Truncation size (default: the domain size)");
    oscillate->add_option("--tail", o.tail, "auto extends finitely supported V by the free solution")
        ->check(CLI::IsMember({"auto", "truncated"}));
    oscillate->add_option("--lambda-grid", o.lambda_grid, "Coupling sweep a:b:step");

    auto* certify = app.add_subcommand(
        "certify", "Trial-pair certificates: positivity of the Delta functional, and the essential-spectrum theorem "
                   "for lim sup |V| >= a (tent and logarithmic trial functions)");
    add_potential_options(certify, o.pot);
    certify->add_option("--mode", o.mode, "pair or essential")->check(CLI::IsMember({"pair", "essential"}));
    certify->add_option("--center", o.center, "Centre of the trial function (first coordinate)");
    certify->add_option("--radius", o.radius, "Tent half-width or logarithmic radius L")->check(CLI::PositiveNumber);
    certify->add_flag("--cutoff", o.cutoff, "Use the cutoff F = min(1, 2nu/|V|)");
    certify->add_option("--a", o.a, "Lower bound a on |V| at the certified sites")->check(CLI::PositiveNumber);
    certify->add_option("--m", o.m, "Number of certificates");

    auto* compare = app.add_subcommand(
        "compare-v2", "V^2 comparison theorem: eigenvalues of H0 + V^2/(4nu) above 2nu force eigenvalues of H0 + V "
                      "outside the band");
    add_potential_options(compare, o.pot);
    compare->add_option("--m", o.m, "Family size for the disjoint-support certificates");
    compare->add_option("--n", o.n, "Truncation size (default: the domain size)");
    compare->add_option("--tolerance", o.tolerance, "Box eigenvalue tolerance")->check(CLI::PositiveNumber);
    compare->add_option("--dense-cap", o.dense_cap, "Largest box solved densely");

    auto* bargmann = app.add_subcommand(
        "bargmann", "Bargmann-type bound: sum n|V(n)| <= 1 excludes bound states; decay bounds V <= 1/n and "
                    "|V| <= 2 n^-1/2 without bound states");
    add_potential_options(bargmann, o.pot);

    auto* infinitude = app.add_subcommand(
        "infinitude", "Criteria for infinitely many bound states: |V(n)| >= beta/n with beta > 1, and the averaged "
                      "criteria with constants 48 and 8 sqrt 3");
    add_potential_options(infinitude, o.pot);
    infinitude->add_option("--criterion", o.criterion, "inverse-linear, averaged-positive or averaged-square");
    infinitude->add_option("--truncations", o.truncations, "Increasing truncation ladder")->capture_default_str();
    infinitude->add_option("--nk", o.nk, "Sites n_k for the averaged criteria");
    infinitude->add_option("--beta-from", o.beta_from, "First n in the estimate of beta");
    infinitude->add_flag("--whole-line", o.whole_line, "Whole-line counts by Dirichlet decoupling at the origin");

    auto* moments = app.add_subcommand(
        "moments", "Moment divergence theorem: sum (|E_j| - 2)^gamma diverges for |V| >= C n^-alpha and "
                   "gamma < (1 - alpha)/(2 alpha)");
    add_potential_options(moments, o.pot);
    moments->add_option("--gamma", o.gamma, "Moment exponent")->check(CLI::PositiveNumber);
    moments->add_option("--truncations", o.truncations, "Increasing truncation ladder")->capture_default_str();
    moments->add_option("--growth-factor", o.growth_factor, "Required last/first growth");

    auto* greens = app.add_subcommand(
        "greens", "Band-edge lattice Green function G_nu(n) = <delta_n, (2nu - H0)^-1 delta_0> (Watson integral), "
                  "cached by (nu, resolution)");
    greens->add_option("--nu", o.nu, "Dimension >= 3");
    greens->add_option("--resolution", o.resolution, "Quadrature points per axis (multiple of 4)");
    greens->add_option("--axis-max", o.axis_max, "Tabulate G(m, 0, ..., 0) for m <= this");
    greens->add_option("--offsets", o.offsets, "Extra offsets 'a,b,c;d,e,f'");

    auto* bs = app.add_subcommand(
        "bs", "Birman-Schwinger principle: a sparse potential with lim sup V > 0 and no spectrum above 2nu "
              "(nu >= 3), checked by the Schur bound and power iteration");
    bs->add_option("--nu", o.nu, "Dimension >= 3");
    bs->add_option("--lambda", o.pot.lambda, "Coupling; V = min(1, lambda) on the chosen sites");
    bs->add_option("--sites", o.sites, "Number of sites");
    bs->add_option("--resolution", o.resolution, "Green function quadrature resolution");
    bs->add_option("--transverse", o.transverse, "Half-width of the verification box across the ray");
    bs->add_option("--margin", o.margin, "Sites past the ray ends along the ray");
    bs->add_option("--iters", o.iters, "Power iteration cap");

    auto* examples = app.add_subcommand(
        "examples", "Explicit examples: single-site and dipole thresholds, the staircase potential with "
                    "n V(n) -> (1-1/N)/(1+1/N), the alternating borderline beta = +-1");
    examples->add_option("--which", o.which, "single-site, dipole, staircase, altex or all")
        ->check(CLI::IsMember({"single-site", "dipole", "staircase", "altex", "all"}));

    auto* scoreboard = app.add_subcommand("scoreboard", "Runs every theorem check and reports pass/fail/unstable");
    scoreboard->add_flag("--quick", o.quick, "Smaller ladders and suites");
    scoreboard->add_option("--corpus", o.corpus, "Directory of potential specs")->capture_default_str();
    scoreboard->add_option("--green-resolution", o.green_resolution, "Override the Green quadrature resolution");

    auto* run = app.add_subcommand("run", "Runs a command described by a RunConfig JSON file");
    run->add_option("--config", o.config, "RunConfig file")->required();

    std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }
    try {
        if (*spectrum) return cmd_spectrum(o);
        if (*oscillate) return cmd_oscillate(o);
        if (*certify) return cmd_certify(o);
        if (*compare) return cmd_compare(o);
        if (*bargmann) return cmd_bargmann(o);
        if (*infinitude) return cmd_infinitude(o);
        if (*moments) return cmd_moments(o);
        if (*greens) return cmd_greens(o);
        if (*bs) return cmd_bs(o);
        if (*examples) return cmd_examples(o);
        if (*scoreboard) return cmd_scoreboard(o);
        if (*run) return cmd_run(o);
    } catch (const SpecError& e) {
        std::cerr << "latvar: malformed spec at " << e.what() << "\n";
        return kExitData;
    } catch (const UsageError& e) {
        std::cerr << "latvar: " << e.what() << "\n";
        return kExitUsage;
    } catch (const PreconditionError& e) {
        std::cerr << "latvar: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "latvar: internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return run_cli(args);
}
