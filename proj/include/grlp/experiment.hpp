// Experiment driver: configuration files, the two benchmark tables, the
// per-state curve exports and the randomized property run. Outputs are CSV
// (tables, curves) and JSON (reports, manifests); all numbers are printed
// with a fixed repeatable format so identical configs produce identical
// bytes.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "grlp/analysis.hpp"
#include "grlp/projection.hpp"
#include "grlp/properties.hpp"
#include "grlp/queue.hpp"

namespace grlp {

struct WRecipe {
    WKind kind = WKind::Aggregation;
    int m = 1;
    uint64_t seed = 0;
    bool seeded = false;
    bool identity = false; // selection of every constraint row
};

struct ExperimentConfig {
    std::string scenario = "custom"; // qs | ql | custom
    QueueConfig queue;
    std::string model_file; // dense model JSON, alternative to the queue
    bool use_queue = true;
    bool uniform_c = true;
    numvec zetas;
    std::vector<WRecipe> w_recipes;
    Box box;
    std::string feature_basis = "normalized"; // or "raw"
    int feature_count = 2;
    double vi_tol = 1e-9;
    std::string out_dir = "out";
    PropertyConfig properties;
};

namespace detail {

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

inline WKind parse_wkind(const std::string& s) {
    if (s == "aggregation") return WKind::Aggregation;
    if (s == "sampled_c") return WKind::SampledByC;
    if (s == "sampled_ideal") return WKind::SampledIdeal;
    if (s == "random") return WKind::Random;
    if (s == "selection" || s == "identity") return WKind::Selection;
    throw std::invalid_argument("config: unknown W kind '" + s + "'");
}

} // namespace detail

inline MdpModel load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: model file '" + path + "' not found");
    nlohmann::json j;
    in >> j;
    const double alpha = j.at("alpha").get<double>();
    const auto& trans = j.at("transitions");
    const auto& rewards = j.at("rewards");
    const int d = static_cast<int>(trans.size());
    check(d >= 1, "model file: no actions");
    const int n = static_cast<int>(trans.at(0).size());
    std::vector<Matrix> p(d, Matrix(n, n));
    std::vector<numvec> g(d, numvec(n));
    for (int a = 0; a < d; ++a) {
        for (int s = 0; s < n; ++s) {
            for (int t = 0; t < n; ++t) p[a](s, t) = trans.at(a).at(s).at(t).get<double>();
            g[a][s] = rewards.at(a).at(s).get<double>();
        }
    }
    return MdpModel::from_dense(p, g, alpha);
}

inline ExperimentConfig parse_config(const nlohmann::json& j) {
    ExperimentConfig cfg;
    cfg.scenario = j.value("scenario", std::string("custom"));
    if (j.contains("queue")) {
        const auto& q = j.at("queue");
        cfg.queue.n = q.at("states").get<int>();
        cfg.queue.p = q.at("arrival_p").get<double>();
        cfg.queue.q = q.at("service_q").get<numvec>();
        cfg.queue.alpha = q.at("alpha").get<double>();
        cfg.queue.k = q.value("features", 2);
        cfg.queue.m = q.value("aggregates", 5);
        cfg.queue.zeta = q.value("zeta", 0.9);
        cfg.queue.validate();
        cfg.use_queue = true;
        cfg.feature_count = cfg.queue.k;
    }
    if (j.contains("model_file")) {
        cfg.model_file = j.at("model_file").get<std::string>();
        cfg.use_queue = false;
        if (!std::filesystem::exists(cfg.model_file))
            throw std::invalid_argument("config: model file '" + cfg.model_file +
                                        "' does not exist");
    }
    check(j.contains("queue") || j.contains("model_file"),
          "config: either a queue section or a model_file is required");
    cfg.uniform_c = j.value("uniform_c", cfg.uniform_c);
    if (j.contains("zetas")) cfg.zetas = j.at("zetas").get<numvec>();
    if (cfg.zetas.empty()) cfg.zetas.push_back(cfg.queue.zeta);
    if (j.contains("feature_count")) cfg.feature_count = j.at("feature_count").get<int>();
    cfg.feature_basis = j.value("feature_basis", cfg.feature_basis);
    check(cfg.feature_basis == "normalized" || cfg.feature_basis == "raw",
          "config: feature_basis must be 'normalized' or 'raw'");
    cfg.vi_tol = j.value("vi_tol", cfg.vi_tol);
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    if (j.contains("box")) {
        const auto& b = j.at("box");
        cfg.box.halfwidth = b.at("halfwidth").get<double>();
        const std::string units = b.value("units", std::string("coefficient"));
        check(units == "coefficient" || units == "raw-power",
              "config: box units must be 'coefficient' or 'raw-power'");
        cfg.box.units =
            units == "raw-power" ? Box::Units::RawPower : Box::Units::Coefficient;
    }
    if (j.contains("w_recipes")) {
        for (const auto& r : j.at("w_recipes")) {
            WRecipe rec;
            const std::string kind = r.at("kind").get<std::string>();
            rec.kind = detail::parse_wkind(kind);
            rec.identity = (kind == "identity");
            rec.m = r.value("m", 1);
            if (r.contains("seed")) {
                rec.seed = r.at("seed").get<uint64_t>();
                rec.seeded = true;
            }
            const bool stochastic = rec.kind == WKind::SampledByC ||
                                    rec.kind == WKind::SampledIdeal ||
                                    rec.kind == WKind::Random;
            check(!stochastic || rec.seeded,
                  "config: stochastic W recipe '" + kind + "' requires an explicit seed");
            cfg.w_recipes.push_back(rec);
        }
    }
    if (j.contains("properties")) {
        const auto& p = j.at("properties");
        cfg.properties.trials = p.value("trials", cfg.properties.trials);
        cfg.properties.seed = p.value("seed", cfg.properties.seed);
        cfg.properties.max_states = p.value("max_states", cfg.properties.max_states);
        cfg.properties.max_actions = p.value("max_actions", cfg.properties.max_actions);
        cfg.properties.max_features = p.value("max_features", cfg.properties.max_features);
        cfg.properties.box_halfwidth =
            p.value("box_halfwidth", cfg.properties.box_halfwidth);
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config file '" + path + "' not found");
    nlohmann::json j;
    in >> j;
    return parse_config(j);
}

/// Resolved experiment inputs shared by the table and curve runs.
struct ExperimentInstance {
    MdpModel model;
    FeatureMatrix features;
    ValueFunction jstar;
};

inline ExperimentInstance resolve_instance(const ExperimentConfig& cfg) {
    ExperimentInstance inst;
    if (cfg.use_queue) {
        inst.model = build_queue_mdp(cfg.queue);
        inst.features = cfg.feature_basis == "raw"
                            ? raw_polynomial_features(cfg.queue.n, cfg.feature_count)
                            : polynomial_features(cfg.queue.n, cfg.feature_count);
    } else {
        inst.model = load_model_file(cfg.model_file);
        inst.features = polynomial_features(inst.model.num_states,
                                            std::min(cfg.feature_count,
                                                     inst.model.num_states));
    }
    inst.jstar = value_iteration(inst.model, cfg.vi_tol);
    return inst;
}

inline StateWeights scenario_weights(const ExperimentConfig& cfg, const MdpModel& model,
                                     double zeta) {
    return cfg.uniform_c ? StateWeights::uniform(model.num_states)
                         : geometric_c(model.num_states, zeta);
}

/// Materializes one W recipe against a resolved instance.
inline ConstraintAggregator build_recipe(const WRecipe& rec, const ExperimentConfig& cfg,
                                         const ExperimentInstance& inst, double zeta) {
    const int n = inst.model.num_states, d = inst.model.num_actions;
    const int nd = n * d;
    switch (rec.kind) {
    case WKind::Aggregation:
        return aggregation_w(n, d, rec.m);
    case WKind::Selection: {
        check(rec.identity, "config: explicit selection recipes are not supported");
        indvec rows(nd);
        for (int i = 0; i < nd; ++i) rows[i] = i;
        return selection_w(rows, nd);
    }
    case WKind::SampledByC: {
        StateWeights c = scenario_weights(cfg, inst.model, zeta);
        numvec row_weights(nd, 0.0);
        for (int a = 0; a < d; ++a)
            for (int s = 0; s < n; ++s)
                row_weights[static_cast<size_t>(a) * n + s] = c.c[s] / d;
        return sampled_w(row_weights, rec.m, rec.seed, WKind::SampledByC);
    }
    case WKind::SampledIdeal: {
        Policy ustar = greedy_policy(inst.model, inst.jstar);
        numvec pi = stationary_distribution(inst.model, ustar, 1e-10);
        numvec row_weights(nd, 0.0);
        for (int s = 0; s < n; ++s)
            row_weights[static_cast<size_t>(ustar[s]) * n + s] = pi[s];
        return sampled_w(row_weights, rec.m, rec.seed, WKind::SampledIdeal);
    }
    case WKind::Random:
        return random_w(nd, rec.m, rec.seed);
    }
    throw std::logic_error("unreachable recipe kind");
}

struct Table1Row {
    std::string w_kind;
    uint64_t seed;
    double e_t;
    bool box_clipped;
};

/// Aggregation-error table: one row per W recipe. Guarded to instances where
/// both projections are computable.
inline std::vector<Table1Row> run_table1(const ExperimentConfig& cfg) {
    const ExperimentInstance inst = resolve_instance(cfg);
    check(static_cast<long>(inst.model.num_states) * inst.model.num_actions <= 100000,
          "table1: scenario exceeds the n*d <= 1e5 guard");
    std::vector<Table1Row> rows;
    for (const WRecipe& rec : cfg.w_recipes) {
        ConstraintAggregator agg = build_recipe(rec, cfg, inst, cfg.zetas.front());
        EtBreakdown et = et_term(inst.model, inst.features, agg, cfg.box, inst.jstar);
        rows.push_back({rec.identity ? "identity" : to_string(agg.kind), rec.seed, et.e_t,
                        et.lub_clipped});
    }
    std::filesystem::create_directories(cfg.out_dir);
    std::ostringstream csv;
    csv << "w_kind,seed,e_t,box_clipped\n";
    for (const Table1Row& r : rows)
        csv << r.w_kind << ',' << r.seed << ',' << detail::format_number(r.e_t) << ','
            << (r.box_clipped ? 1 : 0) << '\n';
    detail::write_text(std::filesystem::path(cfg.out_dir) / "table1.csv", csv.str());
    return rows;
}

struct Table2Row {
    std::string w_kind;
    double zeta;
    uint64_t seed;
    double l1c_error;
    double objective;
    bool box_clipped;
};

/// Weighted-error table: one row per (W recipe, zeta).
inline std::vector<Table2Row> run_table2(const ExperimentConfig& cfg) {
    const ExperimentInstance inst = resolve_instance(cfg);
    std::vector<Table2Row> rows;
    for (const WRecipe& rec : cfg.w_recipes) {
        for (double zeta : cfg.zetas) {
            StateWeights c = scenario_weights(cfg, inst.model, zeta);
            ConstraintAggregator agg = build_recipe(rec, cfg, inst, zeta);
            WeightedFit fit = solve_grlp(inst.model, inst.features, agg, c, cfg.box);
            double objective = 0.0;
            for (int s = 0; s < inst.model.num_states; ++s)
                objective += c.c[s] * fit.values[s];
            rows.push_back({rec.identity ? "identity" : to_string(agg.kind), zeta, rec.seed,
                            weighted_l1_error(inst.jstar, fit.values, c), objective,
                            fit.status == LpStatus::BoxClipped});
        }
    }
    std::filesystem::create_directories(cfg.out_dir);
    std::ostringstream csv;
    csv << "w_kind,zeta,seed,l1c_error,objective,box_clipped\n";
    for (const Table2Row& r : rows)
        csv << r.w_kind << ',' << detail::format_number(r.zeta) << ',' << r.seed << ','
            << detail::format_number(r.l1c_error) << ','
            << detail::format_number(r.objective) << ',' << (r.box_clipped ? 1 : 0)
            << '\n';
    detail::write_text(std::filesystem::path(cfg.out_dir) / "table2.csv", csv.str());
    return rows;
}

namespace detail {

inline void write_curve(const std::filesystem::path& dir, const std::string& name,
                        const numvec& values, nlohmann::json& manifest) {
    std::ostringstream csv;
    csv << "state,value\n";
    for (size_t s = 0; s < values.size(); ++s)
        csv << s << ',' << format_number(-values[s]) << '\n';
    write_text(dir / (name + ".csv"), csv.str());
    manifest["emitted"].push_back(name + ".csv");
}

} // namespace detail

/// Writes the negated per-state curves. Small scenarios get the full set
/// (optimal, span-restricted, aggregated, both fixed points, both projections
/// of the anchor); large ones get the optimal curve plus the aggregated
/// solution and its greedy-policy value per zeta. A manifest records what was
/// emitted or omitted and why.
inline void emit_curves(const ExperimentConfig& cfg) {
    const ExperimentInstance inst = resolve_instance(cfg);
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    nlohmann::json manifest;
    manifest["emitted"] = nlohmann::json::array();
    manifest["omitted"] = nlohmann::json::array();

    detail::write_curve(dir, "jstar", inst.jstar, manifest);
    check(!cfg.w_recipes.empty(), "curves: at least one W recipe required");
    const WRecipe& rec = cfg.w_recipes.front();

    // the fixed-point curves iterate a full projection (n coordinate LPs)
    // hundreds of times, so they get a far tighter guard than a single
    // projection does
    const bool small =
        static_cast<long>(inst.model.num_states) * inst.model.num_actions <= 1000;
    if (small) {
        const double zeta = cfg.zetas.front();
        StateWeights c = scenario_weights(cfg, inst.model, zeta);
        ConstraintAggregator agg = build_recipe(rec, cfg, inst, zeta);
        WeightedFit alp = solve_alp(inst.model, inst.features, c, cfg.box);
        WeightedFit grlp = solve_grlp(inst.model, inst.features, agg, c, cfg.box);
        detail::write_curve(dir, "alp", alp.values, manifest);
        detail::write_curve(dir, "grlp", grlp.values, manifest);
        auto lub = [&](const numvec& v) {
            return lub_project(inst.model, inst.features, cfg.box, v).values;
        };
        auto alub = [&](const numvec& v) {
            return alub_project(inst.model, inst.features, agg, cfg.box, v).values;
        };
        detail::write_curve(
            dir, "lub_fixed_point",
            fixed_point(lub, inst.model.alpha, numvec(inst.model.num_states, 0.0), 1e-7),
            manifest);
        detail::write_curve(
            dir, "alub_fixed_point",
            fixed_point(alub, inst.model.alpha, numvec(inst.model.num_states, 0.0), 1e-7),
            manifest);
        EtBreakdown et = et_term(inst.model, inst.features, agg, cfg.box, inst.jstar);
        detail::write_curve(dir, "lub_of_anchor", et.lub_of_anchor, manifest);
        detail::write_curve(dir, "alub_of_anchor", et.alub_of_anchor, manifest);
    } else {
        manifest["omitted"].push_back(
            {{"name", "projection curves"},
             {"reason", "n*d exceeds the fixed-point curve guard (1000)"}});
        for (double zeta : cfg.zetas) {
            StateWeights c = scenario_weights(cfg, inst.model, zeta);
            ConstraintAggregator agg = build_recipe(rec, cfg, inst, zeta);
            WeightedFit grlp = solve_grlp(inst.model, inst.features, agg, c, cfg.box);
            const std::string tag = detail::format_number(zeta);
            detail::write_curve(dir, "grlp_zeta" + tag, grlp.values, manifest);
            Policy u = greedy_policy(inst.model, grlp.values);
            detail::write_curve(dir, "greedy_zeta" + tag,
                                policy_evaluate(inst.model, u), manifest);
        }
    }
    detail::write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

/// Runs the randomized invariant suite and writes a JSON report.
inline PropertyReport run_property_report(const ExperimentConfig& cfg) {
    PropertyReport report = run_property_suite(cfg.properties);
    nlohmann::json j;
    j["trials"] = cfg.properties.trials;
    j["seed"] = cfg.properties.seed;
    j["invariants"] = nlohmann::json::array();
    for (const PropertyResult& r : report.results)
        j["invariants"].push_back({{"name", r.name},
                                   {"passed", r.passed},
                                   {"failed", r.failed},
                                   {"worst_violation", r.worst}});
    j["all_passed"] = report.all_passed();
    std::filesystem::create_directories(cfg.out_dir);
    detail::write_text(std::filesystem::path(cfg.out_dir) / "properties.json",
                       j.dump(2) + "\n");
    return report;
}

} // namespace grlp
