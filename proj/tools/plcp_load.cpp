// plcp_load: load PMFs, rate coverage and the analytic-vs-simulation checks
// as CSV or JSON tables.
//
// Exit codes: 0 ok, 1 validation failed, 2 usage error, 3 numerical failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "plcp/plcp.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace plcp;

constexpr const char* kVersion = "1.0.0";

enum Exit : int
{
    kOk = 0,
    kValidationFailed = 1,
    kUsage = 2,
    kNumerical = 3,
};

struct UsageError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct RunConfig
{
    std::string command;
    NetworkParams params;
    std::size_t m_max = 80;
    std::size_t samples = 100000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::vector<double> thresholds{0.0, 1e5, 3e5, 7e5, 1.5e6, 3e6};
    std::string out;
    std::string format = "csv";
    bool validate = false;
    bool exact = false;
    std::optional<double> tolerance;
    // Negative-control hook: scales the perimeter density.
    double perimeter_norm_scale = 1.0;
};

std::string fmt(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// A table with `#` metadata; rendered as CSV or mirrored into JSON.
struct Table
{
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add_meta(std::string k, std::string v) { meta.emplace_back(std::move(k), std::move(v)); }
    void add_meta(std::string k, double v) { meta.emplace_back(std::move(k), fmt(v)); }

    void write_csv(std::ostream& os) const
    {
        for (const auto& [k, v] : meta)
            os << "# " << k << '=' << v << '\n';
        for (std::size_t i = 0; i < columns.size(); ++i)
            os << (i ? "," : "") << columns[i];
        os << '\n';
        for (const auto& r : rows)
        {
            for (std::size_t i = 0; i < r.size(); ++i)
                os << (i ? "," : "") << fmt(r[i]);
            os << '\n';
        }
    }

    json to_json() const
    {
        json j;
        json m = json::object();
        for (const auto& [k, v] : meta)
            m[k] = v;
        j["metadata"] = m;
        j["columns"] = columns;
        json rs = json::array();
        for (const auto& r : rows)
        {
            json row = json::object();
            for (std::size_t i = 0; i < r.size(); ++i)
                row[columns[i]] = std::isfinite(r[i]) ? json(r[i]) : json(fmt(r[i]));
            rs.push_back(row);
        }
        j["rows"] = rs;
        return j;
    }
};

void emit(const RunConfig& cfg, const std::string& text)
{
    if (cfg.out.empty() || cfg.out == "-")
    {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f)
        throw UsageError("cannot open output file " + cfg.out);
    f << text;
}

void emit_table(const RunConfig& cfg, const Table& t)
{
    std::ostringstream os;
    if (cfg.format == "json")
        os << t.to_json().dump(2) << '\n';
    else
        t.write_csv(os);
    emit(cfg, os.str());
}

void add_common_meta(Table& t, const RunConfig& cfg)
{
    t.add_meta("plcp_load", kVersion);
    t.add_meta("command", cfg.command);
    t.add_meta("lambda_b_per_km2", cfg.params.lambda_b);
    t.add_meta("mu_l_per_km", cfg.params.mu_l);
    t.add_meta("lambda_v_per_km", cfg.params.lambda_v);
    t.add_meta("m_max", std::to_string(cfg.m_max));
    t.add_meta("samples", std::to_string(cfg.samples));
    t.add_meta("seed", std::to_string(cfg.seed));
}

LoadConfig load_config(const RunConfig& cfg)
{
    LoadConfig lc;
    lc.laws.perimeter_norm_scale = cfg.perimeter_norm_scale;
    return lc;
}

SimOptions sim_options(const RunConfig& cfg)
{
    SimOptions o;
    o.threads = cfg.threads;
    return o;
}

void warn_tail(const char* what, double tail)
{
    if (tail > 1e-4)
        std::cerr << "warning: " << what << " tail mass " << fmt(tail) << " beyond m_max exceeds 1e-4; raise --m-max\n";
}

int finish_validation(const RunConfig& cfg, double measured, double tol, const char* what)
{
    if (!cfg.validate)
        return kOk;
    if (measured < tol)
        return kOk;
    std::cerr << "validation failed: " << what << " = " << fmt(measured) << " >= " << fmt(tol) << '\n';
    return kValidationFailed;
}

int cmd_pmf(const RunConfig& cfg, bool tagged_cell)
{
    const auto lc = load_config(cfg);
    std::optional<Pmf> exact;
    Pmf disc;
    if (tagged_cell)
        disc = pmf_tagged(cfg.params, std::max<std::size_t>(cfg.m_max, 1), lc);
    else
    {
        disc = pmf_typical(cfg.params, cfg.m_max, TypicalMethod::disc, lc);
        if (cfg.exact)
            exact = pmf_typical(cfg.params, cfg.m_max, TypicalMethod::exact, lc);
    }
    warn_tail(tagged_cell ? "tagged PMF" : "typical PMF", disc.tail_mass);

    std::optional<SimReport> sim;
    if (cfg.samples > 0)
        sim = tagged_cell ? simulate_tagged_load(cfg.params, cfg.samples, {cfg.seed, 0}, sim_options(cfg))
                          : simulate_typical_load(cfg.params, cfg.samples, {cfg.seed, 0}, sim_options(cfg));

    Table t;
    add_common_meta(t, cfg);
    t.add_meta("mean_analytic", disc.mean());
    t.add_meta("tail_mass_analytic", disc.tail_mass);
    double tv = std::numeric_limits<double>::quiet_NaN();
    if (exact)
        t.add_meta("tv_exact_disc", total_variation(*exact, disc));
    if (sim)
    {
        tv = total_variation(disc, sim->empirical_pmf);
        t.add_meta("mean_empirical", sim->mean);
        t.add_meta("discarded_truncated", std::to_string(sim->n_discarded_truncated));
        t.add_meta("tv_analytic_empirical", tv);
    }

    t.columns.push_back("m");
    if (exact)
        t.columns.push_back("p_analytic_exact");
    t.columns.push_back("p_analytic_disc");
    if (sim)
    {
        t.columns.push_back("p_empirical");
        t.columns.push_back("abs_diff");
    }
    for (std::size_t m = 0; m < disc.probs.size(); ++m)
    {
        std::vector<double> row{static_cast<double>(m)};
        if (exact)
            row.push_back(exact->at(m));
        row.push_back(disc.probs[m]);
        if (sim)
        {
            const double e = sim->empirical_pmf.at(m);
            row.push_back(e);
            row.push_back(std::abs(disc.probs[m] - e));
        }
        t.rows.push_back(std::move(row));
    }
    emit_table(cfg, t);
    if (cfg.validate)
        return finish_validation(cfg, tv, cfg.tolerance.value_or(tagged_cell ? 0.03 : 0.02), "TV(analytic, empirical)");
    return kOk;
}

int cmd_rate_coverage(const RunConfig& cfg)
{
    if (cfg.m_max < 1)
        throw UsageError("--m-max must be >= 1 for rate-coverage");
    auto thresholds = cfg.thresholds;
    std::sort(thresholds.begin(), thresholds.end());
    const auto lc = load_config(cfg);
    const auto pmf = pmf_tagged(cfg.params, cfg.m_max, lc);
    warn_tail("tagged PMF", pmf.tail_mass);

    RateQuery q;
    q.bandwidth_B = cfg.params.bandwidth_B;
    q.pathloss_alpha = cfg.params.alpha_pl;
    q.m_max = cfg.m_max;
    std::vector<double> analytic;
    for (double T : thresholds)
    {
        q.rate_threshold_T = T;
        analytic.push_back(rate_coverage(pmf, cfg.params.lambda_b, q).value);
    }
    for (std::size_t i = 1; i < analytic.size(); ++i)
        if (analytic[i] > analytic[i - 1] + 1e-12)
            throw NumericalError("rate coverage not monotone in T between " + fmt(thresholds[i - 1]) + " and " +
                                 fmt(thresholds[i]));

    std::optional<SimReport> sim;
    if (cfg.samples > 0)
        sim = simulate_rate_coverage(cfg.params, q, cfg.samples, {cfg.seed, 0}, sim_options(cfg));

    Table t;
    add_common_meta(t, cfg);
    t.add_meta("alpha", cfg.params.alpha_pl);
    t.add_meta("bandwidth_hz", cfg.params.bandwidth_B);
    double worst = 0.0;
    t.columns = {"T_bps", "Rc_analytic"};
    if (sim)
        t.columns.push_back("Rc_empirical");
    t.columns.push_back("tail_mass");
    for (std::size_t i = 0; i < thresholds.size(); ++i)
    {
        std::vector<double> row{thresholds[i], analytic[i]};
        if (sim)
        {
            const double e = sim->rate_coverage(thresholds[i]);
            row.push_back(e);
            worst = std::max(worst, std::abs(e - analytic[i]));
        }
        row.push_back(pmf.tail_mass);
        t.rows.push_back(std::move(row));
    }
    if (sim)
    {
        t.add_meta("max_abs_diff", worst);
        t.add_meta("discarded_truncated", std::to_string(sim->n_discarded_truncated));
    }
    emit_table(cfg, t);
    if (cfg.validate)
    {
        if (!sim)
            return kOk;
        return finish_validation(cfg, worst, cfg.tolerance.value_or(0.03), "max |Rc_analytic - Rc_empirical|");
    }
    return kOk;
}

// --- validate ---------------------------------------------------------------

struct Check
{
    std::string name;
    double value;
    double target;
    double tolerance;
    bool gating = true;

    bool pass() const { return std::isfinite(value) && std::abs(value - target) <= tolerance; }
};

int cmd_validate(const RunConfig& cfg)
{
    const auto& p = cfg.params;
    const auto lc = load_config(cfg);
    const double lb = p.lambda_b, sl = std::sqrt(lb);
    constexpr double inf = std::numeric_limits<double>::infinity();
    const auto qc = QuadratureConfig{}.with_rel(1e-10).with_abs(1e-13);
    auto mass = [&](auto f, double scale) { return integral(f, 0.0, inf, qc.with_scale(scale)); };

    const ChordLaw chord(lb);
    std::vector<Check> checks;
    // The chord law is tabulated on a bounded support.
    auto chord_mass = [&](auto f) { return integral(f, 0.0, chord.support_max()); };
    checks.push_back({"norm_f_C", chord_mass([&](double c) { return chord.pdf(c); }), 1.0, 2e-3});
    checks.push_back({"norm_f_U", mass([&](double u) { return perimeter_pdf(lb, u, lc.laws); }, 4.0 / sl), 1.0, 2e-3});
    checks.push_back({"norm_f_Z", mass([&](double z) { return area_pdf(lb, z, lc.laws); }, 1.0 / lb), 1.0, 2e-3});
    checks.push_back({"norm_f_C0", chord_mass([&](double c) { return zero_chord_pdf(chord, c); }), 1.0, 2e-3});
    checks.push_back({"norm_f_Zprime", mass([&](double z) { return zero_area_pdf(lb, z, lc.laws); }, 1.0 / lb), 1.0, 2e-3});
    checks.push_back({"norm_f_Rt", mass([&](double r) { return typical_radius_pdf(lb, r, lc.laws); }, 0.5 / sl), 1.0, 2e-3});
    checks.push_back({"norm_f_Rz", mass([&](double r) { return zero_radius_pdf(lb, r, lc.laws); }, 0.5 / sl), 1.0, 2e-3});
    checks.push_back({"mean_area", mass([&](double z) { return z * area_pdf(lb, z, lc.laws); }, 1.0 / lb), 1.0 / lb,
                      0.005 / lb});
    checks.push_back({"mean_perimeter", mass([&](double u) { return u * perimeter_pdf(lb, u, lc.laws); }, 4.0 / sl),
                      4.0 / sl, 0.04 / sl});
    const double ec = std::numbers::pi / (4.0 * sl);
    checks.push_back({"mean_chord", chord.mean(), ec, 0.005 * ec});
    checks.push_back({"coverage_alpha4_beta1", coverage_probability(lb, 4.0, 1.0), 1.0 / (1.0 + std::numbers::pi / 4.0),
                      1e-3});

    const auto disc = pmf_typical(p, cfg.m_max, TypicalMethod::disc, lc);
    // The exact PMF mixes over f_U; under a perturbed f_U it may not be a
    // sub-probability vector, which the normalization checks already flag.
    double tv_exact = std::numeric_limits<double>::quiet_NaN();
    try
    {
        tv_exact = total_variation(pmf_typical(p, cfg.m_max, TypicalMethod::exact, lc), disc);
    }
    catch (const NumericalError&)
    {
    }
    const auto tag = pmf_tagged(p, std::max<std::size_t>(cfg.m_max, 1), lc);
    const double mean_load = p.lambda_v * p.mu_l / lb;
    checks.push_back({"mean_load_analytic", disc.mean(), mean_load, 0.02 * mean_load});
    // Reported, not gating: the exact transform ignores the dependence between
    // a cell's chords and its size.
    checks.push_back({"tv_exact_disc", tv_exact, 0.0, 0.03, false});

    if (cfg.samples > 0)
    {
        SimOptions o = sim_options(cfg);
        o.keep_chords = true;
        const auto typ = simulate_typical_load(p, cfg.samples, {cfg.seed, 0}, o);
        o.keep_chords = false;
        const auto zc = simulate_tagged_load(p, cfg.samples, {cfg.seed, 1}, o);
        checks.push_back({"mean_load_empirical", typ.mean, mean_load, 0.02 * mean_load});
        checks.push_back({"ks_chord", ks_distance(typ.chord_samples, [&](double c) { return chord.cdf(c); }), 0.0, 0.015});
        checks.push_back({"tv_typical_disc_empirical", total_variation(disc, typ.empirical_pmf), 0.0, 0.02});
        checks.push_back({"tv_tagged_empirical", total_variation(tag, zc.empirical_pmf), 0.0, 0.03});
        checks.push_back({"p0_tagged_empirical", zc.empirical_pmf.at(0), 0.0, 0.0});
    }
    checks.push_back({"p0_tagged_analytic", tag.at(0), 0.0, 0.0});

    bool ok = true;
    json report;
    report["plcp_load"] = kVersion;
    report["command"] = "validate";
    report["params"] = {{"lambda_b", p.lambda_b}, {"mu_l", p.mu_l}, {"lambda_v", p.lambda_v}, {"m_max", cfg.m_max},
                        {"samples", cfg.samples}, {"seed", cfg.seed}};
    json arr = json::array();
    for (const auto& c : checks)
    {
        if (c.gating && !c.pass())
            ok = false;
        arr.push_back({{"name", c.name},
                       {"value", std::isfinite(c.value) ? json(c.value) : json(fmt(c.value))},
                       {"target", c.target},
                       {"tolerance", c.tolerance},
                       {"gating", c.gating},
                       {"pass", c.pass()}});
    }
    report["checks"] = arr;
    report["pass"] = ok;
    emit(cfg, report.dump(2) + "\n");
    if (!ok)
    {
        for (const auto& c : checks)
            if (c.gating && !c.pass())
                std::cerr << "check failed: " << c.name << " = " << fmt(c.value) << " (target " << fmt(c.target)
                          << " +/- " << fmt(c.tolerance) << ")\n";
        return kValidationFailed;
    }
    return kOk;
}

void add_param_options(CLI::App* sub, RunConfig& cfg)
{
    sub->add_option("--lambda-b", cfg.params.lambda_b, "Base-station density [km^-2]")->capture_default_str();
    sub->add_option("--mu-l", cfg.params.mu_l, "Road length density [km^-1]")->capture_default_str();
    sub->add_option("--lambda-v", cfg.params.lambda_v, "Vehicle density on each road [km^-1]")->capture_default_str();
    sub->add_option("--alpha", cfg.params.alpha_pl, "Path-loss exponent (> 2)")->capture_default_str();
    sub->add_option("--bandwidth", cfg.params.bandwidth_B, "Bandwidth B [Hz]")->capture_default_str();
    sub->add_option("--m-max", cfg.m_max, "Largest load value tabulated")->capture_default_str();
    sub->add_option("--samples", cfg.samples, "Monte-Carlo replications (0: analytic only)")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
    sub->add_option("--threads", cfg.threads, "Worker threads (0: all cores)")->capture_default_str();
    sub->add_option("--out", cfg.out, "Output file (default: stdout)");
    sub->add_option("--format", cfg.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    sub->add_option("--perturb-perimeter-norm", cfg.perimeter_norm_scale)->group("");
}

} // namespace

int main(int argc, char** argv)
{
    RunConfig cfg;
    CLI::App app{"Load on cellular base stations from vehicular users on Poisson roads.\n"
                 "Units: lengths km, densities km^-1 / km^-2, bandwidth Hz, rates bits/s.",
                 "plcp_load"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    auto* typ = app.add_subcommand("pmf-typical", "PMF of the load on the typical base station");
    auto* tag = app.add_subcommand("pmf-tagged", "PMF of the load on the base station serving the typical user");
    auto* rate = app.add_subcommand("rate-coverage", "Rate coverage of the typical receiver");
    auto* val = app.add_subcommand("validate", "Run the analytic-vs-simulation check suite (JSON report)");
    for (auto* s : {typ, tag, rate, val})
        add_param_options(s, cfg);
    for (auto* s : {typ, tag, rate})
    {
        s->add_flag("--validate", cfg.validate, "Exit 1 if the analytic/empirical distance exceeds the tolerance");
        s->add_option("--tolerance", cfg.tolerance, "Validation tolerance (default 0.02 / 0.03 / 0.03)");
    }
    typ->add_flag("--exact", cfg.exact, "Add the exact (perimeter-mixed) PMF column");
    rate->add_option("--thresholds", cfg.thresholds, "Rate thresholds T [bits/s]")->delimiter(',')->capture_default_str();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try
    {
        cfg.params.validate();
        if (!(cfg.perimeter_norm_scale > 0.0))
            throw UsageError("perimeter normalization scale must be > 0");
        for (double T : cfg.thresholds)
            if (!(T >= 0.0) || !std::isfinite(T))
                throw UsageError("thresholds must be finite and >= 0");
        if (cfg.validate && cfg.samples == 0 && !rate->parsed())
            throw UsageError("--validate needs --samples > 0");

        if (typ->parsed())
        {
            cfg.command = "pmf-typical";
            return cmd_pmf(cfg, false);
        }
        if (tag->parsed())
        {
            cfg.command = "pmf-tagged";
            return cmd_pmf(cfg, true);
        }
        if (rate->parsed())
        {
            cfg.command = "rate-coverage";
            return cmd_rate_coverage(cfg);
        }
        cfg.command = "validate";
        return cmd_validate(cfg);
    }
    catch (const std::invalid_argument& e)
    {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    }
    catch (const UsageError& e)
    {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    }
    catch (const QuadratureError& e)
    {
        std::cerr << "numerical failure: " << e.what() << " (abscissa " << fmt(e.abscissa()) << ", best estimate "
                  << fmt(e.best_estimate()) << ")\n";
        return kNumerical;
    }
    catch (const NumericalError& e)
    {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
    catch (const std::exception& e)
    {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
}
