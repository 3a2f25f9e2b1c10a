#include "soup/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace soup {

using nlohmann::json;

namespace {

void require_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

const std::set<std::string> kExactKinds = {
    "kernel_invariants", "cycle_sum", "counting", "cross_engine",
    "partition_identity", "identity_residuals", "chaos_decomposition"};

const std::set<std::string> kMcKinds = {
    "green_oracle", "mu_moment_oracle", "poisson_count", "soup_mean", "soup_moment",
    "wick_covariance", "chaos_stats", "iso_one", "iso_two", "theta_mean_check"};

}  // namespace

bool is_exact_check_kind(const std::string& kind) { return kExactKinds.count(kind) > 0; }
bool is_known_check_kind(const std::string& kind) {
    return kExactKinds.count(kind) > 0 || kMcKinds.count(kind) > 0;
}

SuiteConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    require_keys(j, {"kernel", "alpha", "epsilon", "seed", "threads", "measures", "checks",
                     "radial", "output"},
                 "config root");
    SuiteConfig cfg;

    if (!j.contains("kernel")) throw ConfigError("config needs a 'kernel' section");
    require_keys(j["kernel"], {"rates"}, "kernel");
    const json& rates = j["kernel"]["rates"];
    if (!rates.is_array() || rates.empty()) throw ConfigError("kernel.rates must be a matrix");
    int m = static_cast<int>(rates.size());
    cfg.rates.resize(m, m);
    for (int x = 0; x < m; ++x) {
        if (!rates[x].is_array() || static_cast<int>(rates[x].size()) != m)
            throw ConfigError("kernel.rates must be square");
        for (int y = 0; y < m; ++y) cfg.rates(x, y) = rates[x][y].get<double>();
    }

    if (j.contains("alpha")) {
        cfg.alphas.clear();
        for (const auto& a : j["alpha"]) cfg.alphas.push_back(a.get<double>());
        if (cfg.alphas.empty()) throw ConfigError("alpha list must not be empty");
    }
    if (j.contains("epsilon")) cfg.epsilon = j["epsilon"].get<double>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("threads")) cfg.threads = j["threads"].get<int>();

    if (j.contains("measures")) {
        for (auto it = j["measures"].begin(); it != j["measures"].end(); ++it) {
            std::vector<double> w;
            for (const auto& v : it.value()) w.push_back(v.get<double>());
            if (static_cast<int>(w.size()) != m)
                throw ConfigError("measure '" + it.key() + "' length does not match the state count");
            cfg.measures.emplace(it.key(), PointMeasure(std::move(w)));
        }
    }

    if (j.contains("checks")) {
        for (const auto& c : j["checks"]) {
            require_keys(c, {"name", "kind", "budget", "blocks", "rho", "phi", "nu", "F", "params"},
                         "check");
            CheckSpec spec;
            spec.name = c.at("name").get<std::string>();
            spec.kind = c.at("kind").get<std::string>();
            if (!is_known_check_kind(spec.kind))
                throw ConfigError("unknown check kind '" + spec.kind + "'");
            if (c.contains("budget")) spec.budget = c["budget"].get<std::uint64_t>();
            if (c.contains("blocks"))
                for (const auto& b : c["blocks"])
                    spec.blocks.emplace_back(b[0].get<int>(), b[1].get<std::string>());
            if (c.contains("rho")) spec.rho = c["rho"].get<std::string>();
            if (c.contains("phi")) spec.phi = c["phi"].get<std::string>();
            if (c.contains("nu")) spec.nu = c["nu"].get<std::string>();
            if (c.contains("F")) spec.test_function = c["F"].get<std::string>();
            if (c.contains("params"))
                for (auto it = c["params"].begin(); it != c["params"].end(); ++it)
                    spec.params[it.key()] = it.value().get<double>();
            cfg.checks.push_back(std::move(spec));
        }
    }

    if (j.contains("radial")) {
        require_keys(j["radial"], {"d", "index", "k_max", "grid"}, "radial");
        RadialSpec rs;
        rs.d = j["radial"].value("d", 1);
        if (rs.d != 1 && rs.d != 2)
            throw UnsupportedDimension("radial.d must be 1 or 2");
        rs.index = j["radial"].value("index", 0.9);
        rs.k_max = j["radial"].value("k_max", 3);
        if (j["radial"].contains("grid")) {
            require_keys(j["radial"]["grid"], {"r_min", "r_max", "points_per_decade"}, "radial.grid");
            rs.r_min = j["radial"]["grid"].value("r_min", 1.0);
            rs.r_max = j["radial"]["grid"].value("r_max", 1e4);
            rs.points_per_decade = j["radial"]["grid"].value("points_per_decade", 64);
        } else {
            rs.defaults_applied = true;
        }
        cfg.radial = rs;
    }

    if (j.contains("output")) {
        require_keys(j["output"], {"report", "soups", "csv_dir"}, "output");
        cfg.report_path = j["output"].value("report", cfg.report_path);
        cfg.soup_path = j["output"].value("soups", cfg.soup_path);
        cfg.csv_dir = j["output"].value("csv_dir", cfg.csv_dir);
    }
    return cfg;
}

SuiteConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string serialize_config(const SuiteConfig& cfg) {
    json j;
    int m = static_cast<int>(cfg.rates.rows());
    json rates = json::array();
    for (int x = 0; x < m; ++x) {
        json row = json::array();
        for (int y = 0; y < m; ++y) row.push_back(cfg.rates(x, y));
        rates.push_back(row);
    }
    j["kernel"] = {{"rates", rates}};
    j["alpha"] = cfg.alphas;
    j["epsilon"] = cfg.epsilon;
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    json measures = json::object();
    for (const auto& [name, pm] : cfg.measures) measures[name] = pm.weights;
    j["measures"] = measures;
    json checks = json::array();
    for (const auto& c : cfg.checks) {
        json jc;
        jc["name"] = c.name;
        jc["kind"] = c.kind;
        jc["budget"] = c.budget;
        if (!c.blocks.empty()) {
            json blocks = json::array();
            for (const auto& [n, meas] : c.blocks) blocks.push_back(json::array({n, meas}));
            jc["blocks"] = blocks;
        }
        if (!c.rho.empty()) jc["rho"] = c.rho;
        if (!c.phi.empty()) jc["phi"] = c.phi;
        if (!c.nu.empty()) jc["nu"] = c.nu;
        if (!c.test_function.empty()) jc["F"] = c.test_function;
        if (!c.params.empty()) jc["params"] = c.params;
        checks.push_back(jc);
    }
    j["checks"] = checks;
    if (cfg.radial) {
        j["radial"] = {{"d", cfg.radial->d},
                       {"index", cfg.radial->index},
                       {"k_max", cfg.radial->k_max},
                       {"grid",
                        {{"r_min", cfg.radial->r_min},
                         {"r_max", cfg.radial->r_max},
                         {"points_per_decade", cfg.radial->points_per_decade}}}};
    }
    j["output"] = {{"report", cfg.report_path}, {"soups", cfg.soup_path}, {"csv_dir", cfg.csv_dir}};
    return j.dump(2);
}

std::string serialize_report(const std::vector<ComparisonRow>& rows) {
    json j;
    json arr = json::array();
    std::size_t passed = 0;
    auto opt = [](const std::optional<double>& v) {
        return v && std::isfinite(*v) ? json(*v) : json(nullptr);
    };
    for (const auto& r : rows) {
        json row;
        row["name"] = r.name;
        row["kind"] = r.kind;
        row["exact"] = opt(r.exact);
        row["estimate"] = opt(r.estimate);
        row["stderr"] = opt(r.stderror);
        row["z"] = opt(r.z);
        row["residual"] = opt(r.residual);
        row["pass"] = r.pass;
        row["samples"] = r.samples;
        row["seconds"] = r.seconds;
        if (!r.note.empty()) row["note"] = r.note;
        arr.push_back(row);
        passed += r.pass;
    }
    j["rows"] = arr;
    j["summary"] = {{"total", rows.size()}, {"passed", passed}};
    return j.dump(2);
}

}  // namespace soup
