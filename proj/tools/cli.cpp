#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "biparam/error.hpp"
#include "biparam/io.hpp"
#include "biparam/maximal.hpp"
#include "biparam/paraproducts.hpp"
#include "biparam/singular.hpp"
#include "biparam/stopping.hpp"
#include "biparam/stratify.hpp"
#include "biparam/symbols.hpp"
#include "biparam/tiles.hpp"

namespace biparam::cli {

namespace {

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) {
        return {};
    }
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& key, const std::string& text)
{
    // Accepts plain numbers and simple fractions such as 1/3.
    const auto slash = text.find('/');
    try {
        std::size_t used = 0;
        if (slash != std::string::npos) {
            const double a = parse_number(key, text.substr(0, slash));
            const double b = parse_number(key, text.substr(slash + 1));
            require(b != 0.0, "zero denominator in '" + key + "'");
            return a / b;
        }
        const std::string t = trim(text);
        if (t == "inf") {
            return INFINITY;
        }
        const double v = std::stod(t, &used);
        require(used == t.size(), "");
        return v;
    } catch (const std::logic_error&) {
        throw InvalidArgument("'" + key + "' expects a number, got '" + text + "'");
    }
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, sep)) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

const std::map<std::string, std::map<std::string, std::string>>& defaults_table()
{
    static const std::map<std::string, std::map<std::string, std::string>> table{
        {"check-symbol",
         {{"symbol", "one_param_cm_demo"}, {"table", ""}, {"mode", "one_param"}, {"order", "3"},
          {"half_width", "16"}, {"step", "0.25"}, {"exclusion", "8"}}},
        {"kato-ponce",
         {{"dim", "1"}, {"n", "2048"}, {"length", "1"}, {"width", "0.005"}, {"alpha", "1"}, {"beta", ""},
          {"p", "2"}, {"q", "2"}, {"r", "1"}, {"lambdas", "1,2,4"}}},
        {"squarefns", {{"n", "64"}, {"length", "1"}, {"mode", "MS"}, {"max_freq", "auto"}}},
        {"tiles-stopping", {{"n", "256"}, {"length", "1"}, {"j", "1"}, {"max_freq", "auto"}}},
        {"tiles-use-bound",
         {{"n", "256"}, {"length", "1"}, {"instances", "10"}, {"theta", "1/3,1/3,1/3"}, {"max_freq", "auto"}}},
        {"stratify", {{"n", "64"}, {"length", "2"}, {"c", "auto"}, {"n_start", "auto"}, {"max_freq", "auto"}}},
        {"journe", {{"n", "256"}, {"rectangles", "8"}, {"depth", "3"}, {"eps", "0.5"}}},
        {"counterexample", {{"op", "bd"}, {"n", "16..512"}, {"p", "2"}, {"q", "2"}, {"r", "1"}, {"samples", "3"}}},
        {"bht-crosscheck", {{"dim", "1"}, {"n", "64"}, {"length", "1"}, {"max_freq", "auto"}, {"tol", "1e-6"}}},
    };
    return table;
}

const std::map<std::string, std::string> kCommon{
    {"out", ""}, {"seed", "1"}, {"threads", "1"}, {"plot", "0"}};

int auto_max_freq(const ExperimentConfig& c, int n, int fallback)
{
    const std::string& v = c.get("max_freq");
    if (v == "auto") {
        return fallback;
    }
    const int m = c.get_int("max_freq");
    require(m >= 0 && 2 * m < n, "max_freq must satisfy 0 <= max_freq < N/2");
    return m;
}

GridGeometry geometry_of(const ExperimentConfig& c, int dim)
{
    GridGeometry g{dim, c.get_int("n"), c.values.count("length") ? c.get_double("length") : 1.0};
    validate(g);
    return g;
}

GridFunction random_function(const GridGeometry& g, int seed, int max_freq)
{
    return make_grid_function(g, Generator{"band_limited_random",
                                           {{"seed", static_cast<double>(seed)}, {"max_freq", static_cast<double>(max_freq)}}});
}

// What a subcommand hands back: the main CSV, optional extras and summary lines for the manifest.
struct Outcome {
    CsvTable table;
    std::vector<std::pair<std::string, std::string>> summary;
    std::vector<std::pair<std::string, GridFunction>> grids;  // suffix, BPGF payload
    std::string plot_x, plot_y;
    bool plot_log_x = false;
    int exit_code = ok;
    std::string failure;
};

Outcome run_check_symbol(const ExperimentConfig& c)
{
    Symbol m;
    if (!c.get("table").empty()) {
        const GridFunction t = read_bpgf(c.get("table"));
        const auto& g = t.geometry();
        require(g.dim == 2, "a symbol table must be a 2D BPGF grid (N x N over (xi, eta))");
        Eigen::VectorXcd flat(g.size());
        for (Eigen::Index r = 0; r < g.rows(); ++r) {
            for (Eigen::Index col = 0; col < g.cols(); ++col) {
                flat(r * g.cols() + col) = t.samples()(r, col);
            }
        }
        m = sampled_symbol(GridGeometry{1, g.n, g.length}, 2, flat, "table");
    } else {
        m = build_symbol(c.get("symbol"));
    }
    const std::string mode = c.get("mode");
    require(mode == "one_param" || mode == "two_param", "mode must be one_param or two_param");
    DecayOptions opt;
    opt.half_width = c.get_int("half_width");
    opt.step = c.get_double("step");
    opt.exclusion_cells = c.get_int("exclusion");
    const DecayReport rep =
        verify_decay(m, mode == "one_param" ? DecayMode::one_param : DecayMode::two_param, c.get_int("order"), opt);
    Outcome o;
    o.table.header = {"order", "constant", "pass"};
    for (const auto& e : rep.entries) {
        std::string ord;
        for (std::size_t i = 0; i < e.order.size(); ++i) {
            ord += (i ? "-" : "") + std::to_string(e.order[i]);
        }
        o.table.add_row({ord, format_double(e.constant), e.pass ? "1" : "0"});
    }
    o.summary.emplace_back("symbol", m.name);
    o.summary.emplace_back("all_pass", rep.all_pass() ? "1" : "0");
    return o;
}

Outcome run_kato_ponce(const ExperimentConfig& c)
{
    const int dim = c.get_int("dim");
    require(dim == 1 || dim == 2, "dim must be 1 or 2");
    const GridGeometry g = geometry_of(c, dim);
    KatoPonceConfig kc;
    kc.alpha = c.get_double("alpha");
    if (dim == 2) {
        kc.beta = c.get("beta").empty() ? kc.alpha : c.get_double("beta");
    }
    kc.r = c.get_double("r");
    kc.exponents = {{c.get_double("p"), c.get_double("q")}};
    const auto lambdas = c.get_list("lambdas");
    const KatoPonceReport rep = kato_ponce_report(kato_ponce_family(g, c.get_double("width"), lambdas), kc);
    Outcome o;
    o.table = rep.to_csv();
    double lo = INFINITY, hi = 0.0;
    for (const auto& r : rep.rows) {
        lo = std::min(lo, r.ratio);
        hi = std::max(hi, r.ratio);
    }
    o.summary.emplace_back("max_ratio", format_double(rep.max_ratio));
    o.summary.emplace_back("dilation_spread", format_double(lo > 0.0 ? hi / lo - 1.0 : 0.0));
    return o;
}

HybridMode parse_mode(const std::string& s)
{
    for (HybridMode m : {HybridMode::MM, HybridMode::MS, HybridMode::SM, HybridMode::SS}) {
        if (s == to_string(m)) {
            return m;
        }
    }
    throw InvalidArgument("mode must be one of MM, MS, SM, SS");
}

Outcome run_squarefns(const ExperimentConfig& c)
{
    const GridGeometry g = geometry_of(c, 2);
    const int mf = auto_max_freq(c, g.n, g.n / 4);
    const int seed = c.get_int("seed");
    const auto f1 = random_function(g, seed, mf), f2 = random_function(g, seed + 1, mf),
               f3 = random_function(g, seed + 2, mf);
    const auto a = bitile_coefficients(f1, 1), b = bitile_coefficients(f2, 2), t3 = bitile_coefficients(f3, 3);
    const HybridMode mode = parse_mode(c.get("mode"));
    const BiCoefficientTable* pick = mode == HybridMode::SM ? &b : (mode == HybridMode::SS ? &t3 : &a);
    const HybridOutput h = mode == HybridMode::MM ? mm_maximal(f1) : hybrid_square(*pick, mode);
    const auto cert = pointwise_majorization(a, b, t3);
    Outcome o;
    o.table.header = {"cell", "lhs", "rhs", "slack"};
    for (Eigen::Index i = 0; i < cert.lhs.size(); ++i) {
        const double l = cert.lhs(i), r = cert.rhs(i);
        o.table.add_row({std::to_string(i), format_double(l), format_double(r), format_double(r - l)});
    }
    o.grids.emplace_back("." + std::string(to_string(mode)) + ".bpgf", h.as_function());
    o.summary.emplace_back("min_slack", format_double(cert.min_slack));
    o.summary.emplace_back("majorization_holds", cert.holds ? "1" : "0");
    if (!cert.holds) {
        o.exit_code = numeric_failure;
        o.failure = "pointwise majorization failed: min slack " + format_double(cert.min_slack);
    }
    return o;
}

Outcome run_tiles_stopping(const ExperimentConfig& c)
{
    const GridGeometry g = geometry_of(c, 1);
    const int j = c.get_int("j");
    require(j >= 1 && j <= 3, "j must be 1, 2 or 3");
    const auto f = random_function(g, c.get_int("seed"), auto_max_freq(c, g.n, g.n / 2 - 1));
    const auto table = tile_coefficients(f, j);
    const auto tiles = enumerate_tiles(0, table.k_max);
    const auto d = stopping_partition(table, tiles);
    Outcome o;
    o.table = d.to_csv(g.length);
    o.summary.emplace_back("size", format_double(d.size));
    o.summary.emplace_back("energy", format_double(d.energy));
    o.summary.emplace_back("strata", std::to_string(d.strata.size()));
    o.summary.emplace_back("c_stop", format_double(d.c_stop));
    return o;
}

Outcome run_tiles_use(const ExperimentConfig& c)
{
    const GridGeometry g = geometry_of(c, 1);
    const auto th = c.get_list("theta");
    require(th.size() == 3, "theta needs three entries");
    const std::array<double, 3> theta{th[0], th[1], th[2]};
    const int count = c.get_int("instances");
    require(count >= 1, "instances must be positive");
    const int mf = auto_max_freq(c, g.n, g.n / 2 - 1);
    const auto tiles = enumerate_tiles(0, max_tile_scale(g.n));
    Outcome o;
    o.table.header = {"instance", "lhs", "rhs", "ratio"};
    double lo = INFINITY, hi = 0.0;
    for (int i = 0; i < count; ++i) {
        const int s = c.get_int("seed") + 3 * i;
        const auto a = tile_coefficients(random_function(g, s, mf), 1);
        const auto b = tile_coefficients(random_function(g, s + 1, mf), 2);
        const auto t3 = tile_coefficients(random_function(g, s + 2, mf), 3);
        const auto u = size_energy_estimate({&a, &b, &t3}, tiles, theta);
        o.table.add_row({std::to_string(i), format_double(u.lhs), format_double(u.rhs), format_double(u.ratio)});
        lo = std::min(lo, u.ratio);
        hi = std::max(hi, u.ratio);
    }
    o.summary.emplace_back("c_use", format_double(hi));
    o.summary.emplace_back("max_over_min", format_double(lo > 0.0 ? hi / lo : INFINITY));
    return o;
}

Outcome run_stratify(const ExperimentConfig& c)
{
    const GridGeometry g = geometry_of(c, 2);
    const int mf = auto_max_freq(c, g.n, std::min(20, g.n / 2 - 1));
    const int seed = c.get_int("seed");
    const auto a = bitile_coefficients(random_function(g, seed, mf), 1);
    const auto b = bitile_coefficients(random_function(g, seed + 1, mf), 2);
    const auto t3 = bitile_coefficients(random_function(g, seed + 2, mf), 3);
    const StratifyParameters auto_p = stratify_parameters(a, b, t3);
    const double cc = c.get("c") == "auto" ? auto_p.c : c.get_double("c");
    const int ns = c.get("n_start") == "auto" ? auto_p.n_start : c.get_int("n_start");
    const auto tiles = enumerate_bitiles(0, a.k_max);
    const auto res = stratify_levels(a, b, t3, tiles, cc, ns);
    Outcome o;
    o.table = res.to_csv(tiles);
    o.summary.emplace_back("c", format_double(cc));
    o.summary.emplace_back("n_start", std::to_string(ns));
    o.summary.emplace_back("certificate", res.certificate ? "1" : "0");
    o.summary.emplace_back("min_margin", std::to_string(res.min_margin));
    o.summary.emplace_back("growth_constant", format_double(res.growth_constant));
    if (!res.certificate) {
        o.exit_code = numeric_failure;
        o.failure = "overlap certificate failed";
    }
    return o;
}

Outcome run_journe(const ExperimentConfig& c)
{
    const auto inst = random_journe_instance(c.get_int("n"), static_cast<std::uint64_t>(c.get_int("seed")),
                                             c.get_int("rectangles"), c.get_int("depth"));
    const auto res = journe_maximal(inst.geometry, inst.tiles, inst.omega, inst.omega_tilde, c.get_double("eps"));
    Outcome o;
    o.table = res.to_csv(inst.geometry);
    o.summary.emplace_back("c_j", format_double(res.c_j));
    o.summary.emplace_back("rectangles", std::to_string(res.maximal.size()));
    return o;
}

Outcome run_counterexample(const ExperimentConfig& c)
{
    const std::string op = c.get("op");
    const auto sizes = c.get_sizes("n");
    Outcome o;
    o.plot_x = "lnN";
    o.plot_y = "ratio";
    if (op == "s") {
        const auto sg = sine_growth(sizes);
        o.table.header = {"N", "value", "ratio", "lnN"};
        for (const auto& r : sg.rows) {
            o.table.add_row({std::to_string(r.n), format_double(r.value), format_double(r.ratio), format_double(r.ln_n)});
        }
        o.plot_y = "value";
        o.summary.emplace_back("slope", format_double(sg.fit.slope));
        o.summary.emplace_back("slope_over_pi", format_double(sg.fit.slope / std::numbers::pi));
        o.summary.emplace_back("c1", format_double(sg.c1));
        o.summary.emplace_back("c2", format_double(sg.c2));
        return o;
    }
    const auto cert = divergence_certificate(parse_divergence_operator(op), sizes, c.get_double("p"), c.get_double("q"),
                                             c.get_double("r"), c.get_int("samples"), c.get_int("threads"));
    o.table.header = {"N", "value", "ratio", "lnN"};
    for (const auto& r : cert.rows) {
        o.table.add_row({std::to_string(r.n), format_double(r.value), format_double(r.ratio), format_double(r.ln_n)});
    }
    o.summary.emplace_back("slope", format_double(cert.fit.slope));
    o.summary.emplace_back("slope_se", format_double(cert.fit.slope_se));
    o.summary.emplace_back("t_stat", format_double(cert.fit.t_stat));
    o.summary.emplace_back("diverges", cert.diverges() ? "1" : "0");
    o.summary.emplace_back("flat", cert.flat() ? "1" : "0");
    return o;
}

Outcome run_bht_crosscheck(const ExperimentConfig& c)
{
    const int dim = c.get_int("dim");
    require(dim == 1 || dim == 2, "dim must be 1 or 2");
    const GridGeometry g = geometry_of(c, dim);
    const int limit = g.n / 4 - 1;
    const int mf = auto_max_freq(c, g.n, limit);
    require(mf <= limit, "bht-crosscheck needs max_freq < N/4 so that no frequency wraps");
    const int seed = c.get_int("seed");
    const auto f = random_function(g, seed, mf), h = random_function(g, seed + 1, mf);
    const auto quad = make_pv_quadrature(g);
    std::vector<cplx> time;
    Field freq;
    if (dim == 1) {
        std::vector<double> xs;
        for (int i = 0; i < g.n; ++i) {
            xs.push_back(f.coordinate(i));
        }
        time = bht_eval(f, h, xs, quad);
        freq = bht_spectral(f, h).samples();
    } else {
        std::vector<std::pair<Eigen::Index, Eigen::Index>> pts;
        for (Eigen::Index r = 0; r < g.n; ++r) {
            for (Eigen::Index col = 0; col < g.n; ++col) {
                pts.emplace_back(r, col);
            }
        }
        time = double_bht_eval(f, h, pts, quad);
        freq = double_bht_spectral(f, h).samples();
    }
    Outcome o;
    o.table.header = {"index", "time", "frequency", "abs_diff"};
    double worst = 0.0;
    for (std::size_t i = 0; i < time.size(); ++i) {
        const cplx v = dim == 1 ? freq(static_cast<Eigen::Index>(i), 0)
                                : freq(static_cast<Eigen::Index>(i) / g.n, static_cast<Eigen::Index>(i) % g.n);
        const double d = std::abs(time[i] - v);
        worst = std::max(worst, d);
        o.table.add_row({std::to_string(i), format_double(std::abs(time[i])), format_double(std::abs(v)), format_double(d)});
    }
    o.summary.emplace_back("max_abs_diff", format_double(worst));
    if (worst > c.get_double("tol")) {
        o.exit_code = numeric_failure;
        o.failure = "time and frequency evaluations differ by " + format_double(worst);
    }
    return o;
}

std::string manifest_text(const ExperimentConfig& c, const Outcome& o, double seconds)
{
    std::ostringstream m;
    m << "subcommand = " << c.subcommand << "\n";
    m << "version = " << BIPARAM_VERSION << "\n";
    for (const auto& [k, v] : c.values) {
        m << "config." << k << " = " << v << "\n";
    }
    for (const auto& [k, v] : o.summary) {
        m << "result." << k << " = " << v << "\n";
    }
    m << "exit_code = " << o.exit_code << "\n";
    m << "wall_seconds = " << format_double(seconds) << "\n";
    return m.str();
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw InvalidArgument("cannot write '" + path + "'");
    }
    f << text;
}

} // namespace

const std::string& ExperimentConfig::get(const std::string& key) const
{
    const auto it = values.find(key);
    if (it == values.end()) {
        throw InvalidArgument("missing configuration key '" + key + "'");
    }
    return it->second;
}

int ExperimentConfig::get_int(const std::string& key) const
{
    const double v = parse_number(key, get(key));
    require(std::isfinite(v) && v == std::floor(v) && std::abs(v) < 2e9, "'" + key + "' expects an integer");
    return static_cast<int>(v);
}

double ExperimentConfig::get_double(const std::string& key) const
{
    return parse_number(key, get(key));
}

std::vector<double> ExperimentConfig::get_list(const std::string& key) const
{
    std::vector<double> out;
    for (const auto& item : split(get(key), ',')) {
        out.push_back(parse_number(key, item));
    }
    require(!out.empty(), "'" + key + "' expects a non-empty list");
    return out;
}

std::vector<int> ExperimentConfig::get_sizes(const std::string& key) const
{
    const std::string& v = get(key);
    const auto dots = v.find("..");
    std::vector<int> out;
    if (dots != std::string::npos) {
        const double lo = parse_number(key, v.substr(0, dots)), hi = parse_number(key, v.substr(dots + 2));
        require(lo >= 1 && hi >= lo && lo == std::floor(lo) && hi == std::floor(hi), "'" + key + "' range must be a..b");
        for (double n = lo; n <= hi; n *= 2) {
            out.push_back(static_cast<int>(n));
        }
    } else {
        for (double x : get_list(key)) {
            require(x >= 1 && x == std::floor(x), "'" + key + "' entries must be positive integers");
            out.push_back(static_cast<int>(x));
        }
    }
    return out;
}

std::map<std::string, std::string> parse_config_text(const std::string& text)
{
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        require(eq != std::string::npos, "config line " + std::to_string(lineno) + " is not key = value");
        const std::string key = trim(line.substr(0, eq));
        require(!key.empty(), "config line " + std::to_string(lineno) + " has an empty key");
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

std::vector<std::string> subcommands()
{
    std::vector<std::string> out;
    for (const auto& [k, v] : defaults_table()) {
        out.push_back(k);
    }
    return out;
}

std::map<std::string, std::string> subcommand_defaults(const std::string& subcommand)
{
    const auto it = defaults_table().find(subcommand);
    if (it == defaults_table().end()) {
        throw InvalidArgument("unknown subcommand '" + subcommand + "'");
    }
    auto out = kCommon;
    out.insert(it->second.begin(), it->second.end());
    out["out"] = subcommand + ".csv";
    return out;
}

int run_experiment(const ExperimentConfig& config, std::ostream& out, std::ostream& err)
{
    const auto start = std::chrono::steady_clock::now();
    try {
        const auto allowed = subcommand_defaults(config.subcommand);
        for (const auto& [k, v] : config.values) {
            require(allowed.count(k) > 0, "unknown key '" + k + "' for " + config.subcommand);
        }
        require(config.get_int("threads") >= 1, "threads must be at least 1");
        const std::string& s = config.subcommand;
        Outcome o;
        if (s == "check-symbol") o = run_check_symbol(config);
        else if (s == "kato-ponce") o = run_kato_ponce(config);
        else if (s == "squarefns") o = run_squarefns(config);
        else if (s == "tiles-stopping") o = run_tiles_stopping(config);
        else if (s == "tiles-use-bound") o = run_tiles_use(config);
        else if (s == "stratify") o = run_stratify(config);
        else if (s == "journe") o = run_journe(config);
        else if (s == "counterexample") o = run_counterexample(config);
        else if (s == "bht-crosscheck") o = run_bht_crosscheck(config);
        const std::string path = config.get("out");
        write_csv(path, o.table);
        for (const auto& [suffix, grid] : o.grids) {
            write_bpgf(path + suffix, grid);
        }
        if (config.get("plot") == "1" && !o.plot_x.empty()) {
            write_text(path + ".gp", plot_script(path, o.plot_x, o.plot_y, false));
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        write_text(path + ".manifest", manifest_text(config, o, secs));
        for (const auto& [k, v] : o.summary) {
            out << k << " = " << v << "\n";
        }
        if (o.exit_code != ok) {
            err << "error: " << o.failure << "\n";
        }
        return o.exit_code;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return validation_error;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << "\n";
        return numeric_failure;
    }
}

namespace {

struct Schema {
    std::string name;
    std::vector<std::string> columns;  // prefix; kato-ponce has a variable tail
    bool prefix_only = false;
};

const std::vector<Schema>& schemas()
{
    static const std::vector<Schema> s{
        {"growth", {"N", "value", "ratio", "lnN"}},
        {"kato-ponce", {"family_member_id", "lhs"}, true},
        {"decay", {"order", "constant", "pass"}},
        {"majorization", {"cell", "lhs", "rhs", "slack"}},
        {"stopping", {"stratum_n", "tree_id", "left", "right", "member_count"}},
        {"use-bound", {"instance", "lhs", "rhs", "ratio"}},
        {"stratify", {"k1", "l1", "k2", "l2", "n1", "n2", "n3"}},
        {"journe", {"x0", "x1", "y0", "y1", "d"}},
        {"crosscheck", {"index", "time", "frequency", "abs_diff"}},
    };
    return s;
}

const Schema* match_schema(const std::vector<std::string>& header)
{
    for (const auto& s : schemas()) {
        if (header.size() < s.columns.size() || (!s.prefix_only && header.size() != s.columns.size())) {
            continue;
        }
        if (std::equal(s.columns.begin(), s.columns.end(), header.begin())) {
            return &s;
        }
    }
    return nullptr;
}

std::vector<double> column(const CsvTable& t, const std::string& name)
{
    const auto it = std::find(t.header.begin(), t.header.end(), name);
    const auto idx = static_cast<std::size_t>(it - t.header.begin());
    std::vector<double> out;
    for (const auto& row : t.rows) {
        out.push_back(parse_number(name, row[idx]));
    }
    return out;
}

std::vector<std::pair<std::string, double>> summarize(const Schema& s, const CsvTable& t)
{
    std::vector<std::pair<std::string, double>> m{{"rows", static_cast<double>(t.rows.size())}};
    auto max_of = [](const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); };
    auto min_of = [](const std::vector<double>& v) { return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end()); };
    if (s.name == "growth" && t.rows.size() >= 3) {
        const auto fit = fit_line(column(t, "lnN"), column(t, "ratio"));
        m.emplace_back("slope", fit.slope);
        m.emplace_back("slope_se", fit.slope_se);
        m.emplace_back("t_stat", fit.t_stat);
    } else if (s.name == "kato-ponce" || s.name == "use-bound") {
        m.emplace_back("max_ratio", max_of(column(t, "ratio")));
        m.emplace_back("min_ratio", min_of(column(t, "ratio")));
    } else if (s.name == "decay") {
        m.emplace_back("all_pass", min_of(column(t, "pass")));
    } else if (s.name == "majorization") {
        m.emplace_back("min_slack", min_of(column(t, "slack")));
    } else if (s.name == "stopping") {
        m.emplace_back("strata", static_cast<double>(std::set<double>(column(t, "stratum_n").begin(),
                                                                      column(t, "stratum_n").end()).size()));
    } else if (s.name == "journe") {
        m.emplace_back("max_d", max_of(column(t, "d")));
    } else if (s.name == "crosscheck") {
        m.emplace_back("max_abs_diff", max_of(column(t, "abs_diff")));
    }
    return m;
}

} // namespace

int run_report(const std::vector<std::string>& paths, const std::string& out_path, std::ostream& out, std::ostream& err)
{
    try {
        CsvTable summary;
        summary.header = {"file", "schema", "metric", "value"};
        const Schema* first = nullptr;
        std::vector<std::string> first_header;
        for (const auto& p : paths) {
            const CsvTable t = read_csv(p);
            const Schema* s = match_schema(t.header);
            if (s == nullptr) {
                throw InvalidArgument("'" + p + "' does not match any known CSV schema (header starts with '" +
                                      (t.header.empty() ? std::string() : t.header.front()) + "')");
            }
            if (first == nullptr) {
                first = s;
                first_header = t.header;
            } else if (t.header != first_header) {
                std::size_t i = 0;
                while (i < t.header.size() && i < first_header.size() && t.header[i] == first_header[i]) {
                    ++i;
                }
                const std::string col = i < t.header.size() ? t.header[i] : first_header[i];
                throw InvalidArgument("mixed schemas: column '" + col + "' of '" + p + "' does not match '" +
                                      paths.front() + "'");
            }
            for (const auto& [k, v] : summarize(*s, t)) {
                summary.add_row({p, s->name, k, format_double(v)});
            }
        }
        if (out_path.empty()) {
            out << summary.to_string();
        } else {
            write_csv(out_path, summary);
        }
        return ok;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return validation_error;
    }
}

namespace {

std::string description(const std::string& name)
{
    static const std::map<std::string, std::string> text{
        {"check-symbol", "derivative-decay report of a multiplier symbol"},
        {"kato-ponce", "fractional Leibniz ratios on a dilated Gaussian family"},
        {"squarefns", "MM, MS, SM or SS of a random function, with a majorisation summary"},
        {"tiles-stopping", "stopping-time decomposition of a random 1D coefficient table"},
        {"tiles-use-bound", "size-energy estimate over random instances"},
        {"stratify", "level-set stratification of the full bi-tile system"},
        {"journe", "maximal rectangles of a random union, grouped by dilation class"},
        {"counterexample", "log-growth certificate (op = bd, v2, control, or s for S(N))"},
        {"bht-crosscheck", "bilinear Hilbert transform, time side against frequency side"},
    };
    const auto it = text.find(name);
    return it == text.end() ? name : it->second;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Bi-parameter paraproduct and time-frequency experiments", "biparam"};
    app.require_subcommand(1);
    std::map<std::string, std::map<std::string, std::string>> flags;
    std::map<std::string, std::string> config_files;
    std::map<std::string, std::vector<std::string>> sets;
    for (const auto& name : subcommands()) {
        auto* sub = app.add_subcommand(name, description(name));
        sub->add_option("--config", config_files[name], "key = value file");
        sub->add_option("--set", sets[name], "key=value override (repeatable)");
        for (const auto& [key, def] : subcommand_defaults(name)) {
            const std::string shown = def.empty() ? "(unset)" : def;
            sub->add_option("--" + key, flags[name][key], "default " + shown);
        }
    }
    std::vector<std::string> report_inputs;
    std::string report_out;
    auto* report = app.add_subcommand("report", "merge CSV outputs into one summary table");
    report->add_option("inputs", report_inputs, "CSV files");
    report->add_option("--out", report_out, "summary CSV (stdout when omitted)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        for (auto* sub : app.get_subcommands()) {
            if (e.get_name() == "CallForHelp") {
                out << sub->help();
                return ok;
            }
        }
        err << "error: " << e.what() << "\n";
        return validation_error;
    }
    auto* chosen = app.get_subcommands().front();
    if (chosen == report) {
        return run_report(report_inputs, report_out, out, err);
    }
    ExperimentConfig config;
    config.subcommand = chosen->get_name();
    try {
        config.values = subcommand_defaults(config.subcommand);
        const std::string& file = config_files[config.subcommand];
        if (!file.empty()) {
            std::ifstream in(file);
            require(static_cast<bool>(in), "cannot read config file '" + file + "'");
            std::stringstream text;
            text << in.rdbuf();
            for (const auto& [k, v] : parse_config_text(text.str())) {
                require(config.values.count(k) > 0, "unknown key '" + k + "' in " + file);
                config.values[k] = v;
            }
        }
        if (const char* env = std::getenv("BIPARAM_THREADS"); env != nullptr && *env != '\0') {
            config.values["threads"] = env;
        }
        for (const auto& [k, v] : flags[config.subcommand]) {
            if (chosen->count("--" + k) > 0) {
                config.values[k] = v;
            }
        }
        for (const auto& kv : sets[config.subcommand]) {
            const auto eq = kv.find('=');
            require(eq != std::string::npos, "--set expects key=value");
            const std::string k = trim(kv.substr(0, eq));
            require(config.values.count(k) > 0, "unknown key '" + k + "'");
            config.values[k] = trim(kv.substr(eq + 1));
        }
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return validation_error;
    }
    return run_experiment(config, out, err);
}

} // namespace biparam::cli
