#include "fapprox/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace fapprox {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void appendf(std::string& out, const char* fmt, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    out += buf;
}

std::uint64_t method_salt(Method m) { return static_cast<std::uint64_t>(m) + 1; }

const char* alpha_rule_name(AlphaRule r) {
    switch (r) {
        case AlphaRule::line_search: return "line_search";
        case AlphaRule::error_ratio_normalized: return "error_ratio_normalized";
        case AlphaRule::error_ratio_absolute: return "error_ratio_absolute";
    }
    return "line_search";
}

AlphaRule alpha_rule_from_name(const std::string& s) {
    if (s == "line_search") return AlphaRule::line_search;
    if (s == "error_ratio_normalized") return AlphaRule::error_ratio_normalized;
    if (s == "error_ratio_absolute") return AlphaRule::error_ratio_absolute;
    throw std::invalid_argument("config: unknown alpha_rule '" + s + "'");
}

const char* kind_name(BasisKind k) {
    return k == BasisKind::gaussian ? "gaussian" : "sigmoid";
}

BasisKind kind_from_name(const std::string& s) {
    if (s == "gaussian") return BasisKind::gaussian;
    if (s == "sigmoid") return BasisKind::sigmoid;
    throw std::invalid_argument("config: unknown basis kind '" + s + "'");
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const char* where) {
    if (!j.is_object())
        throw std::invalid_argument(std::string("config: ") + where +
                                    " must be an object");
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (item.key() == a) {
                ok = true;
                break;
            }
        if (!ok)
            throw std::invalid_argument("config: unknown key '" + item.key() +
                                        "' in " + where);
    }
}

template <class T>
void read_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) j.at(key).get_to(out);
}

json box_to_json(const ParameterBox& b) {
    return json{{"w_lo", b.w_lo}, {"w_hi", b.w_hi}, {"b_lo", b.b_lo}, {"b_hi", b.b_hi}};
}

void box_from_json(const json& j, const char* where, ParameterBox& b) {
    check_keys(j, {"w_lo", "w_hi", "b_lo", "b_hi"}, where);
    read_if(j, "w_lo", b.w_lo);
    read_if(j, "w_hi", b.w_hi);
    read_if(j, "b_lo", b.b_lo);
    read_if(j, "b_hi", b.b_hi);
}

void require_ascending(const std::vector<int>& ns, const char* what) {
    if (ns.empty())
        throw std::invalid_argument(std::string(what) + " must not be empty");
    for (std::size_t k = 0; k < ns.size(); ++k) {
        if (ns[k] < 1)
            throw std::invalid_argument(std::string(what) + " entries must be >= 1");
        if (k > 0 && ns[k] <= ns[k - 1])
            throw std::invalid_argument(std::string(what) +
                                        " must be strictly ascending");
    }
}

}  // namespace

const char* method_name(Method m) {
    switch (m) {
        case Method::greedy: return "greedy";
        case Method::random: return "random";
        case Method::mc_direct: return "mc_direct";
        case Method::mlp_full: return "mlp_full";
        case Method::mlp_linear: return "mlp_linear";
    }
    return "greedy";
}

Method method_from_name(const std::string& name) {
    for (Method m : {Method::greedy, Method::random, Method::mc_direct,
                     Method::mlp_full, Method::mlp_linear})
        if (name == method_name(m)) return m;
    throw std::invalid_argument("unknown method '" + name + "'");
}

void ExperimentPlan::validate() const {
    if (trials < 1) throw std::invalid_argument("plan: trials must be >= 1");
    if (n_max < 1) throw std::invalid_argument("plan: n_max must be >= 1");
    if (grid_points < 2) throw std::invalid_argument("plan: grid must be >= 2");
    greedy.validate();
    random_box.validate();
    if (!(cond_threshold > 0.0))
        throw std::invalid_argument("plan: cond_threshold must be positive");
    if (mlp_trials < 0) throw std::invalid_argument("plan: mlp trials must be >= 0");
    require_ascending(mlp_ns, "plan: mlp ns");
    if (mlp_epoch_cap < 0)
        throw std::invalid_argument("plan: mlp epoch_cap must be >= 0");
    if (!(mc_alpha > 0.0) || !(mc_omega > 0.0))
        throw std::invalid_argument("plan: mc alpha and omega must be positive");
    if (!std::isfinite(mc_x)) throw std::invalid_argument("plan: mc x must be finite");
    require_ascending(mc_ns, "plan: mc ns");
}

int ExperimentPlan::effective_mlp_trials() const {
    return mlp_trials > 0 ? mlp_trials : std::min(trials, 24);
}

std::vector<int> ExperimentPlan::sizes_for(Method m) const {
    switch (m) {
        case Method::greedy:
        case Method::random: {
            std::vector<int> ns(n_max);
            for (int n = 1; n <= n_max; ++n) ns[n - 1] = n;
            return ns;
        }
        case Method::mlp_full: {
            std::vector<int> ns;
            for (int n : mlp_ns)
                if (n <= n_max) ns.push_back(n);
            if (ns.empty()) ns.push_back(n_max);
            return ns;
        }
        case Method::mlp_linear: return {n_max};
        case Method::mc_direct: return mc_ns;
    }
    return {};
}

ExperimentPlan parse_plan_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    check_keys(j, {"trials", "n_max", "seed", "grid", "greedy", "random", "mlp", "mc"},
               "the top level");
    ExperimentPlan p;
    try {
        read_if(j, "trials", p.trials);
        read_if(j, "n_max", p.n_max);
        read_if(j, "seed", p.master_seed);
        read_if(j, "grid", p.grid_points);
        if (j.contains("greedy")) {
            const json& g = j.at("greedy");
            check_keys(g,
                       {"m_prime", "m_double_prime", "epsilon", "max_attempts", "box",
                        "alpha_rule", "kind"},
                       "greedy");
            read_if(g, "m_prime", p.greedy.m_prime);
            read_if(g, "m_double_prime", p.greedy.m_double_prime);
            read_if(g, "epsilon", p.greedy.epsilon);
            read_if(g, "max_attempts", p.greedy.max_attempts);
            if (g.contains("box"))
                box_from_json(g.at("box"), "greedy box", p.greedy.search_box);
            if (g.contains("alpha_rule"))
                p.greedy.alpha_rule =
                    alpha_rule_from_name(g.at("alpha_rule").get<std::string>());
            if (g.contains("kind"))
                p.greedy.kind = kind_from_name(g.at("kind").get<std::string>());
        }
        if (j.contains("random")) {
            const json& r = j.at("random");
            check_keys(r, {"box", "cond_threshold"}, "random");
            if (r.contains("box")) box_from_json(r.at("box"), "random box", p.random_box);
            read_if(r, "cond_threshold", p.cond_threshold);
        }
        if (j.contains("mlp")) {
            const json& m = j.at("mlp");
            check_keys(m, {"trials", "ns", "epoch_cap"}, "mlp");
            read_if(m, "trials", p.mlp_trials);
            read_if(m, "ns", p.mlp_ns);
            read_if(m, "epoch_cap", p.mlp_epoch_cap);
        }
        if (j.contains("mc")) {
            const json& m = j.at("mc");
            check_keys(m, {"alpha", "omega", "x", "ns"}, "mc");
            read_if(m, "alpha", p.mc_alpha);
            read_if(m, "omega", p.mc_omega);
            read_if(m, "x", p.mc_x);
            read_if(m, "ns", p.mc_ns);
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    p.validate();
    return p;
}

std::string render_plan_json(const ExperimentPlan& p) {
    json j;
    j["trials"] = p.trials;
    j["n_max"] = p.n_max;
    j["seed"] = p.master_seed;
    j["grid"] = p.grid_points;
    j["greedy"] = json{{"m_prime", p.greedy.m_prime},
                       {"m_double_prime", p.greedy.m_double_prime},
                       {"epsilon", p.greedy.epsilon},
                       {"max_attempts", p.greedy.max_attempts},
                       {"box", box_to_json(p.greedy.search_box)},
                       {"alpha_rule", alpha_rule_name(p.greedy.alpha_rule)},
                       {"kind", kind_name(p.greedy.kind)}};
    j["random"] = json{{"box", box_to_json(p.random_box)},
                       {"cond_threshold", p.cond_threshold}};
    j["mlp"] = json{{"trials", p.mlp_trials}, {"ns", p.mlp_ns},
                    {"epoch_cap", p.mlp_epoch_cap}};
    j["mc"] = json{{"alpha", p.mc_alpha}, {"omega", p.mc_omega}, {"x", p.mc_x},
                   {"ns", p.mc_ns}};
    return j.dump(2) + "\n";
}

TrainConfig mlp_full_config(int n) {
    TrainConfig c;
    if (n <= 8) {
        c.max_epochs = 15000;
        c.early_stop_bar_e = 2e-4;
    } else if (n <= 10) {
        c.max_epochs = 25000;
        c.restarts = 3;
        c.early_stop_bar_e = 5e-4;
    } else if (n <= 20) {
        c.max_epochs = 20000;
        c.restarts = 2;
        c.batch = 32;
        c.early_stop_bar_e = 1e-4;
    } else {
        c.max_epochs = 35000;
        c.early_stop_bar_e = 5e-4;
    }
    return c;
}

TrainConfig mlp_linear_config() {
    TrainConfig c;
    c.mode = TrainMode::linear_only;
    c.max_epochs = 8000;
    c.early_stop_patience = 10;
    return c;
}

namespace {

void run_one_trial(Method method, const GridFunction& f, const ExperimentPlan& plan,
                   TrialSeries& s, int t) {
    switch (method) {
        case Method::greedy: {
            GreedyConfig cfg = plan.greedy;
            cfg.max_steps = plan.n_max;
            Rng rng(s.seeds[t]);
            const GreedyTrace trace = run_greedy(cfg, f, rng);
            for (std::size_t k = 0; k < s.ns.size(); ++k)
                s.at(t, k) = trace.steps[k].bar_e;
            return;
        }
        case Method::random: {
            Rng rng(s.seeds[t]);
            const RandomBasisCurve curve = run_random_basis(
                plan.random_box, f, plan.n_max, plan.cond_threshold, rng);
            for (std::size_t k = 0; k < s.ns.size(); ++k)
                s.at(t, k) = curve.bar_e[k];
            return;
        }
        case Method::mc_direct: {
            for (std::size_t k = 0; k < s.ns.size(); ++k) {
                const int n = s.ns[k];
                Rng rng(child_seed(s.seeds[t], static_cast<std::uint64_t>(n), 0));
                const auto samples =
                    draw_mc_samples(n, 1, plan.mc_alpha, plan.mc_omega, rng);
                std::vector<double> f_at_y(samples.size());
                for (std::size_t i = 0; i < samples.size(); ++i)
                    f_at_y[i] = interp1(f, samples[i].y[0]);
                s.at(t, k) = normalized_error(mc_tabulate(samples, f_at_y, f.grid), f);
            }
            return;
        }
        case Method::mlp_full: {
            for (std::size_t k = 0; k < s.ns.size(); ++k) {
                const int n = s.ns[k];
                TrainConfig cfg = mlp_full_config(n);
                if (plan.mlp_epoch_cap > 0)
                    cfg.max_epochs = std::min(cfg.max_epochs, plan.mlp_epoch_cap);
                Rng rng(child_seed(s.seeds[t], static_cast<std::uint64_t>(n), 0));
                const TrainResult r = train_mlp(init_mlp(n, 1, rng), f, cfg, rng);
                s.at(t, k) = r.diverged ? kNaN : r.bar_e;
            }
            return;
        }
        case Method::mlp_linear: {
            const int n = s.ns[0];
            TrainConfig cfg = mlp_linear_config();
            if (plan.mlp_epoch_cap > 0)
                cfg.max_epochs = std::min(cfg.max_epochs, plan.mlp_epoch_cap);
            Rng rng(child_seed(s.seeds[t], static_cast<std::uint64_t>(n), 0));
            const TrainResult r = train_mlp(init_mlp_frozen_basis(n, 1, plan.random_box, rng),
                                            f, cfg, rng);
            s.at(t, 0) = r.diverged ? kNaN : r.bar_e;
            return;
        }
    }
}

}  // namespace

TrialSeries run_trials(Method method, const GridFunction& f,
                       const ExperimentPlan& plan) {
    plan.validate();
    const bool is_mlp = method == Method::mlp_full || method == Method::mlp_linear;
    const int trials = is_mlp ? plan.effective_mlp_trials() : plan.trials;

    TrialSeries s;
    s.method = method;
    s.ns = plan.sizes_for(method);
    s.trials = trials;
    s.seeds.resize(trials);
    for (int t = 0; t < trials; ++t)
        s.seeds[t] = child_seed(plan.master_seed, static_cast<std::uint64_t>(t),
                                method_salt(method));
    s.values.assign(static_cast<std::size_t>(trials) * s.ns.size(), kNaN);

#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < trials; ++t) {
        try {
            run_one_trial(method, f, plan, s, t);
        } catch (...) {
            // A failed trial keeps its NaN row; the series stays usable.
            for (std::size_t k = 0; k < s.ns.size(); ++k) s.at(t, k) = kNaN;
        }
    }
    return s;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty())
        throw std::invalid_argument("quantile_sorted: empty sample");
    if (q <= 0.0) return sorted.front();
    if (q >= 1.0) return sorted.back();
    const double h = static_cast<double>(sorted.size() - 1) * q;
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - lo) * (sorted[lo + 1] - sorted[lo]);
}

std::vector<BoxStats> boxplot_stats(const TrialSeries& s) {
    std::vector<BoxStats> out;
    out.reserve(s.ns.size());
    std::vector<double> v;
    for (std::size_t k = 0; k < s.ns.size(); ++k) {
        v.clear();
        for (int t = 0; t < s.trials; ++t) {
            const double x = s.at(t, k);
            if (!std::isnan(x)) v.push_back(x);
        }
        if (v.size() < 4)
            throw std::invalid_argument(
                "boxplot_stats: fewer than 4 values at n=" + std::to_string(s.ns[k]));
        std::sort(v.begin(), v.end());
        BoxStats b;
        b.n = s.ns[k];
        b.median = quantile_sorted(v, 0.5);
        b.box_lo = quantile_sorted(v, 0.25);
        b.box_hi = quantile_sorted(v, 0.75);
        b.whisker_lo = quantile_sorted(v, 0.125);
        b.whisker_hi = quantile_sorted(v, 0.875);
        for (double x : v)
            if (x < b.whisker_lo || x > b.whisker_hi) b.outliers.push_back(x);
        out.push_back(std::move(b));
    }
    return out;
}

std::string render_series_csv(const TrialSeries& s) {
    std::string out = "method,trial,seed,n,bar_e_n\n";
    const char* name = method_name(s.method);
    for (int t = 0; t < s.trials; ++t)
        for (std::size_t k = 0; k < s.ns.size(); ++k) {
            const double v = s.at(t, k);
            if (std::isnan(v)) continue;
            appendf(out, "%s,%d,%llu,%d,%.17g\n", name, t,
                    static_cast<unsigned long long>(s.seeds[t]), s.ns[k], v);
        }
    return out;
}

std::string render_stats_csv(const TrialSeries& s,
                             const std::vector<BoxStats>& stats) {
    std::string out =
        "method,n,median,box_lo,box_hi,whisker_lo,whisker_hi,n_outliers\n";
    const char* name = method_name(s.method);
    for (const BoxStats& b : stats)
        appendf(out, "%s,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%zu\n", name, b.n,
                b.median, b.box_lo, b.box_hi, b.whisker_lo, b.whisker_hi,
                b.outliers.size());
    return out;
}

TrialSeries parse_series_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "method,trial,seed,n,bar_e_n")
        throw std::invalid_argument("series csv: unexpected header");

    struct Row {
        int trial;
        std::uint64_t seed;
        int n;
        double value;
    };
    std::vector<Row> rows;
    std::string name;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::array<std::string, 5> field;
        std::size_t pos = 0;
        for (int i = 0; i < 5; ++i) {
            const std::size_t comma = line.find(',', pos);
            if ((comma == std::string::npos) != (i == 4))
                throw std::invalid_argument("series csv: malformed row '" + line + "'");
            field[i] = line.substr(pos, comma == std::string::npos ? comma : comma - pos);
            pos = comma + 1;
        }
        if (name.empty())
            name = field[0];
        else if (name != field[0])
            throw std::invalid_argument("series csv: mixed method names");
        Row r;
        r.trial = std::stoi(field[1]);
        r.seed = std::stoull(field[2]);
        r.n = std::stoi(field[3]);
        r.value = std::strtod(field[4].c_str(), nullptr);
        if (r.trial < 0 || r.n < 1)
            throw std::invalid_argument("series csv: malformed row '" + line + "'");
        rows.push_back(r);
    }

    TrialSeries s;
    s.method = name.empty() ? Method::greedy : method_from_name(name);
    std::vector<int> ns;
    int trials = 0;
    for (const Row& r : rows) {
        ns.push_back(r.n);
        trials = std::max(trials, r.trial + 1);
    }
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    s.ns = std::move(ns);
    s.trials = trials;
    s.seeds.assign(trials, 0);
    s.values.assign(static_cast<std::size_t>(trials) * s.ns.size(), kNaN);
    for (const Row& r : rows) {
        const std::size_t k =
            std::lower_bound(s.ns.begin(), s.ns.end(), r.n) - s.ns.begin();
        s.seeds[r.trial] = r.seed;
        s.at(r.trial, k) = r.value;
    }
    return s;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw std::runtime_error("read failed for '" + path + "'");
    return buf.str();
}

namespace {

struct LogMapper {
    double x0, y0, w, h;
    double n_hi;
    double lg_hi, lg_lo;

    double x(double n) const { return x0 + w * n / n_hi; }
    double y(double v) const {
        double lg = std::log10(std::max(v, 1e-300));
        lg = std::min(std::max(lg, lg_lo), lg_hi);
        return y0 + h * (lg_hi - lg) / (lg_hi - lg_lo);
    }
};

void collect_range(const std::vector<double>& vals, double& vmin, double& vmax) {
    for (double v : vals)
        if (v > 0.0 && std::isfinite(v)) {
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
}

}  // namespace

std::string render_svg(const std::vector<SvgSeries>& series,
                       const std::vector<int>& bound_ns,
                       const std::vector<double>& bound_bar) {
    if (series.empty()) throw std::invalid_argument("render_svg: no series");
    if (bound_ns.size() != bound_bar.size())
        throw std::invalid_argument("render_svg: bound arrays differ in length");

    const double W = 860, H = 460, L = 64, T = 18, R = 16, B = 42;
    double n_hi = 1, vmin = std::numeric_limits<double>::infinity(), vmax = 0;
    for (const SvgSeries& s : series)
        for (const BoxStats& b : s.stats) {
            n_hi = std::max(n_hi, static_cast<double>(b.n));
            collect_range({b.median, b.box_lo, b.box_hi, b.whisker_lo, b.whisker_hi},
                          vmin, vmax);
            collect_range(b.outliers, vmin, vmax);
        }
    for (int n : bound_ns) n_hi = std::max(n_hi, static_cast<double>(n));
    collect_range(bound_bar, vmin, vmax);
    if (!(vmax > 0.0)) {
        vmin = 1e-1;
        vmax = 1.0;
    }

    LogMapper m;
    m.x0 = L;
    m.y0 = T;
    m.w = W - L - R;
    m.h = H - T - B;
    m.n_hi = n_hi;
    m.lg_hi = std::ceil(std::log10(vmax));
    m.lg_lo = std::floor(std::log10(vmin));
    // Cap the span so one near-zero whisker cannot squash the plot.
    m.lg_lo = std::max(m.lg_lo, m.lg_hi - 8.0);
    if (m.lg_lo >= m.lg_hi) m.lg_lo = m.lg_hi - 1.0;

    std::string svg;
    appendf(svg,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" "
            "height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\" font-family=\"Helvetica, "
            "Arial, sans-serif\" font-size=\"12\">\n",
            W, H, W, H);
    appendf(svg, "<rect width=\"%.0f\" height=\"%.0f\" fill=\"#ffffff\"/>\n", W, H);

    // Decade gridlines and labels.
    for (int e = static_cast<int>(m.lg_lo); e <= static_cast<int>(m.lg_hi); ++e) {
        const double y = m.y(std::pow(10.0, e));
        appendf(svg,
                "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                "stroke=\"#dddddd\"/>\n",
                m.x0, y, m.x0 + m.w, y);
        appendf(svg,
                "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"end\" "
                "fill=\"#444444\">1e%d</text>\n",
                m.x0 - 6, y + 4, e);
    }
    // X ticks.
    const int xstep = std::max(1, static_cast<int>(n_hi) / 10);
    for (int n = 0; n <= static_cast<int>(n_hi); n += xstep) {
        const double x = m.x(n);
        appendf(svg,
                "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                "stroke=\"#dddddd\"/>\n",
                x, m.y0, x, m.y0 + m.h);
        appendf(svg,
                "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\" "
                "fill=\"#444444\">%d</text>\n",
                x, m.y0 + m.h + 16, n);
    }
    appendf(svg,
            "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
            "fill=\"none\" stroke=\"#999999\"/>\n",
            m.x0, m.y0, m.w, m.h);
    appendf(svg,
            "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\" "
            "fill=\"#222222\">n</text>\n",
            m.x0 + m.w / 2, H - 8);
    appendf(svg,
            "<text x=\"14\" y=\"%.2f\" text-anchor=\"middle\" fill=\"#222222\" "
            "transform=\"rotate(-90 14 %.2f)\">normalized error</text>\n",
            m.y0 + m.h / 2, m.y0 + m.h / 2);

    const std::size_t count = series.size();
    for (std::size_t si = 0; si < count; ++si) {
        const SvgSeries& s = series[si];
        const double dx =
            (static_cast<double>(si) - (static_cast<double>(count) - 1) / 2.0) * 5.0;
        for (const BoxStats& b : s.stats) {
            if (s.subsample_boxes && b.n % 5 != 0) continue;
            const double cx = m.x(b.n) + dx;
            const double ybl = m.y(b.box_lo), ybh = m.y(b.box_hi);
            const double ywl = m.y(b.whisker_lo), ywh = m.y(b.whisker_hi);
            appendf(svg,
                    "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                    "stroke=\"%s\"/>\n",
                    cx, ywh, cx, ywl, s.color.c_str());
            for (double yw : {ywl, ywh})
                appendf(svg,
                        "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                        "stroke=\"%s\"/>\n",
                        cx - 2.5, yw, cx + 2.5, yw, s.color.c_str());
            appendf(svg,
                    "<rect x=\"%.2f\" y=\"%.2f\" width=\"5.00\" height=\"%.2f\" "
                    "fill=\"%s\" fill-opacity=\"0.25\" stroke=\"%s\"/>\n",
                    cx - 2.5, ybh, std::max(ybl - ybh, 0.5), s.color.c_str(),
                    s.color.c_str());
            appendf(svg,
                    "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                    "stroke=\"%s\" stroke-width=\"1.5\"/>\n",
                    cx - 2.5, m.y(b.median), cx + 2.5, m.y(b.median), s.color.c_str());
            for (double o : b.outliers) {
                const double yo = m.y(o);
                appendf(svg,
                        "<path d=\"M %.2f %.2f h 5 M %.2f %.2f v 5\" stroke=\"%s\" "
                        "stroke-opacity=\"0.75\" fill=\"none\"/>\n",
                        cx - 2.5, yo, cx, yo - 2.5, s.color.c_str());
            }
        }
        std::string pts;
        for (const BoxStats& b : s.stats)
            appendf(pts, "%.2f,%.2f ", m.x(b.n), m.y(b.median));
        if (!pts.empty()) pts.pop_back();
        appendf(svg,
                "<polyline points=\"%s\" fill=\"none\" stroke=\"%s\" "
                "stroke-width=\"1.5\"/>\n",
                pts.c_str(), s.color.c_str());
    }

    if (!bound_ns.empty()) {
        std::string pts;
        for (std::size_t k = 0; k < bound_ns.size(); ++k)
            appendf(pts, "%.2f,%.2f ", m.x(bound_ns[k]), m.y(bound_bar[k]));
        pts.pop_back();
        appendf(svg,
                "<polyline points=\"%s\" fill=\"none\" stroke=\"#d62728\" "
                "stroke-width=\"1.5\"/>\n",
                pts.c_str());
    }

    double ly = m.y0 + 10;
    const double lx = m.x0 + m.w - 140;
    for (const SvgSeries& s : series) {
        appendf(svg,
                "<rect x=\"%.2f\" y=\"%.2f\" width=\"12\" height=\"12\" "
                "fill=\"%s\"/>\n",
                lx, ly - 10, s.color.c_str());
        appendf(svg, "<text x=\"%.2f\" y=\"%.2f\" fill=\"#222222\">%s</text>\n",
                lx + 18, ly, s.label.c_str());
        ly += 18;
    }
    if (!bound_ns.empty()) {
        appendf(svg,
                "<rect x=\"%.2f\" y=\"%.2f\" width=\"12\" height=\"12\" "
                "fill=\"#d62728\"/>\n",
                lx, ly - 10);
        appendf(svg, "<text x=\"%.2f\" y=\"%.2f\" fill=\"#222222\">rate bound</text>\n",
                lx + 18, ly);
    }
    svg += "</svg>\n";
    return svg;
}

std::vector<VarianceEstimate> run_mc_variance(const GridFunction& f,
                                              const ExperimentPlan& plan) {
    plan.validate();
    if (plan.trials < 30)
        throw std::invalid_argument("run_mc_variance: needs at least 30 trials");
    const std::vector<int> ns = plan.mc_ns;
    std::vector<std::vector<double>> estimates(ns.size(),
                                               std::vector<double>(plan.trials));

#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < plan.trials; ++t) {
        const std::uint64_t seed_t =
            child_seed(plan.master_seed, static_cast<std::uint64_t>(t),
                       method_salt(Method::mc_direct));
        for (std::size_t k = 0; k < ns.size(); ++k) {
            Rng rng(child_seed(seed_t, static_cast<std::uint64_t>(ns[k]), 0));
            const auto samples =
                draw_mc_samples(ns[k], 1, plan.mc_alpha, plan.mc_omega, rng);
            std::vector<double> f_at_y(samples.size());
            for (std::size_t i = 0; i < samples.size(); ++i)
                f_at_y[i] = interp1(f, samples[i].y[0]);
            estimates[k][t] = mc_eval_at(samples, f_at_y, &plan.mc_x);
        }
    }

    double pooled_var = 0.0;
    for (std::size_t k = 0; k < ns.size(); ++k) {
        const auto& v = estimates[k];
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= v.size();
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        pooled_var += var / (v.size() - 1);
    }
    pooled_var /= ns.size();
    if (!(pooled_var > 0.0))
        throw std::invalid_argument(
            "run_mc_variance: estimates show no spread at x (kernels likely "
            "miss it); use a smaller omega or another x");
    const double eps = 2.0 * std::sqrt(pooled_var);
    const double reference = interp1(f, plan.mc_x);

    std::vector<VarianceEstimate> out;
    out.reserve(ns.size());
    for (std::size_t k = 0; k < ns.size(); ++k)
        out.push_back(estimate_variance(estimates[k], ns[k], 1, plan.mc_omega,
                                        plan.mc_x, reference, eps));
    return out;
}

std::string render_variance_csv(const std::vector<VarianceEstimate>& table) {
    std::string out =
        "n,empirical_var,sigma_sq,gamma,epsilon,coverage_vs_mean,"
        "coverage_vs_target\n";
    for (const VarianceEstimate& v : table)
        appendf(out, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", v.n,
                v.empirical_var, v.sigma_sq, v.gamma, v.epsilon, v.coverage_vs_mean,
                v.coverage_vs_target);
    return out;
}

std::string render_summary_json(const ExperimentPlan& plan,
                                const std::vector<TrialSeries>& series,
                                double e0_sq) {
    std::vector<int> report_ns = {10, 25, 50, 100};
    if (std::find(report_ns.begin(), report_ns.end(), plan.n_max) ==
        report_ns.end())
        report_ns.push_back(plan.n_max);
    json j;
    j["config"] = json{{"trials", plan.trials},
                       {"mlp_trials", plan.effective_mlp_trials()},
                       {"n_max", plan.n_max},
                       {"seed", plan.master_seed},
                       {"grid", plan.grid_points}};
    json bound = json::array();
    const double mp_sq = plan.greedy.m_prime * plan.greedy.m_prime;
    for (int n : report_ns) {
        if (n > plan.n_max) continue;
        bound.push_back(json{{"n", n}, {"bar_e", mp_sq / (n * e0_sq + mp_sq)}});
    }
    j["bound"] = bound;
    json methods = json::array();
    for (const TrialSeries& s : series) {
        const auto stats = boxplot_stats(s);
        json medians = json::array();
        for (const BoxStats& b : stats)
            if (std::find(report_ns.begin(), report_ns.end(), b.n) != report_ns.end())
                medians.push_back(json{{"n", b.n}, {"median_bar_e", b.median}});
        methods.push_back(json{{"method", method_name(s.method)},
                               {"medians", medians}});
    }
    j["methods"] = methods;
    return j.dump(2) + "\n";
}

std::vector<std::string> run_compare(const GridFunction& f,
                                     const ExperimentPlan& plan,
                                     const std::string& out_dir) {
    plan.validate();
    if (plan.trials < 4 || plan.effective_mlp_trials() < 4)
        throw std::invalid_argument(
            "run_compare: box statistics need at least 4 trials per method");
    std::filesystem::create_directories(out_dir);

    struct Entry {
        Method method;
        const char* color;
        bool subsample;
    };
    const Entry entries[] = {{Method::greedy, "#1f77b4", true},
                             {Method::random, "#2ca02c", true},
                             {Method::mlp_full, "#9467bd", false},
                             {Method::mlp_linear, "#8c564b", false}};

    std::vector<std::string> paths;
    std::vector<TrialSeries> all;
    std::vector<SvgSeries> svg_series;
    for (const Entry& e : entries) {
        TrialSeries s = run_trials(e.method, f, plan);
        auto stats = boxplot_stats(s);
        const std::string base = std::string(out_dir) + "/" + method_name(e.method);
        write_text_file(base + ".csv", render_series_csv(s));
        paths.push_back(base + ".csv");
        write_text_file(base + "_stats.csv", render_stats_csv(s, stats));
        paths.push_back(base + "_stats.csv");
        svg_series.push_back(
            {method_name(e.method), e.color, std::move(stats), e.subsample});
        all.push_back(std::move(s));
    }

    const double e0_sq = norm_sq(f);
    const std::vector<double> raw_bound =
        bound_curve(e0_sq, plan.greedy.m_prime, plan.n_max);
    std::vector<int> bound_ns(plan.n_max);
    std::vector<double> bound_bar(plan.n_max);
    for (int n = 1; n <= plan.n_max; ++n) {
        bound_ns[n - 1] = n;
        bound_bar[n - 1] = raw_bound[n] / e0_sq;
    }

    const std::string svg_path = std::string(out_dir) + "/compare.svg";
    write_text_file(svg_path, render_svg(svg_series, bound_ns, bound_bar));
    paths.push_back(svg_path);

    const std::string summary_path = std::string(out_dir) + "/summary.json";
    write_text_file(summary_path, render_summary_json(plan, all, e0_sq));
    paths.push_back(summary_path);
    return paths;
}

}  // namespace fapprox
