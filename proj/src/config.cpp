#include "czirok/config.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace czirok {

namespace {

using nlohmann::json;

std::string join_issues(const std::vector<std::string>& issues) {
    std::string msg = "config invalid:";
    for (const auto& s : issues) {
        msg += "\n  - ";
        msg += s;
    }
    return msg;
}

struct Checker {
    std::vector<std::string> issues;

    void fail(const std::string& field, const std::string& what) {
        issues.push_back(field + ": " + what);
    }

    void known_keys(const json& obj, const std::string& where,
                    std::initializer_list<const char*> keys) {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            bool ok = false;
            for (const char* k : keys)
                if (it.key() == k) {
                    ok = true;
                    break;
                }
            if (!ok) fail(where + "." + it.key(), "unknown key");
        }
    }

    bool get_double(const json& obj, const std::string& where, const char* key,
                    double& out) {
        auto it = obj.find(key);
        if (it == obj.end()) return false;
        if (!it->is_number()) {
            fail(where + "." + key, "expected a number");
            return false;
        }
        out = it->get<double>();
        return true;
    }

    bool get_int(const json& obj, const std::string& where, const char* key,
                 long& out) {
        auto it = obj.find(key);
        if (it == obj.end()) return false;
        if (!it->is_number_integer()) {
            fail(where + "." + key, "expected an integer");
            return false;
        }
        out = it->get<long>();
        return true;
    }

    bool get_string(const json& obj, const std::string& where, const char* key,
                    std::string& out) {
        auto it = obj.find(key);
        if (it == obj.end()) return false;
        if (!it->is_string()) {
            fail(where + "." + key, "expected a string");
            return false;
        }
        out = it->get<std::string>();
        return true;
    }
};

void parse_g(Checker& ck, const json& g, GSpec& out) {
    if (!g.is_object()) {
        ck.fail("model.g", "expected an object");
        return;
    }
    ck.known_keys(g, "model.g", {"variant", "h", "a", "coeffs"});
    std::string variant;
    if (!ck.get_string(g, "model.g", "variant", variant)) {
        ck.fail("model.g.variant", "required");
        return;
    }
    if (variant == "cubic") {
        out.variant = GVariant::cubic;
        ck.get_double(g, "model.g", "h", out.h);
        if (g.contains("a")) ck.fail("model.g.a", "not used by variant cubic");
        if (g.contains("coeffs"))
            ck.fail("model.g.coeffs", "not used by variant cubic");
    } else if (variant == "tanh") {
        out.variant = GVariant::tanh_gain;
        ck.get_double(g, "model.g", "a", out.a);
        if (g.contains("h")) ck.fail("model.g.h", "not used by variant tanh");
        if (g.contains("coeffs"))
            ck.fail("model.g.coeffs", "not used by variant tanh");
    } else if (variant == "odd-polynomial") {
        out.variant = GVariant::odd_polynomial;
        auto it = g.find("coeffs");
        if (it == g.end() || !it->is_array() || it->empty()) {
            ck.fail("model.g.coeffs", "required non-empty array");
        } else {
            out.coeffs.clear();
            for (const auto& v : *it) {
                if (!v.is_number()) {
                    ck.fail("model.g.coeffs", "entries must be numbers");
                    break;
                }
                out.coeffs.push_back(v.get<double>());
            }
        }
        if (g.contains("h"))
            ck.fail("model.g.h", "not used by variant odd-polynomial");
        if (g.contains("a"))
            ck.fail("model.g.a", "not used by variant odd-polynomial");
    } else {
        ck.fail("model.g.variant",
                "must be one of \"cubic\", \"tanh\", \"odd-polynomial\"");
    }
}

void parse_kernel(Checker& ck, const json& k, KernelSpec& out) {
    if (!k.is_object()) {
        ck.fail("model.kernel", "expected an object");
        return;
    }
    ck.known_keys(k, "model.kernel", {"variant", "r"});
    std::string variant;
    if (ck.get_string(k, "model.kernel", "variant", variant)) {
        if (variant == "top-hat")
            out.variant = KernelVariant::top_hat;
        else if (variant == "uniform")
            out.variant = KernelVariant::uniform;
        else
            ck.fail("model.kernel.variant",
                    "must be one of \"top-hat\", \"uniform\"");
    }
    double r;
    if (ck.get_double(k, "model.kernel", "r", r)) {
        if (!(r > 0.0))
            ck.fail("model.kernel.r", "must be > 0");
        else
            out.r = r;
    }
}

void parse_model(Checker& ck, const json& m, ModelParams& out) {
    if (!m.is_object()) {
        ck.fail("model", "expected an object");
        return;
    }
    ck.known_keys(m, "model",
                  {"n", "l", "sigma", "dt", "steps", "seed", "g", "kernel",
                   "averaging"});
    long n;
    if (ck.get_int(m, "model", "n", n)) {
        if (n < 1)
            ck.fail("model.n", "must be >= 1");
        else
            out.n = n;
    }
    double v;
    if (ck.get_double(m, "model", "l", v)) {
        if (!(v > 0.0))
            ck.fail("model.l", "must be > 0");
        else
            out.l = v;
    }
    if (ck.get_double(m, "model", "sigma", v)) {
        if (!(v >= 0.0))
            ck.fail("model.sigma", "must be >= 0");
        else
            out.sigma = v;
    }
    if (ck.get_double(m, "model", "dt", v)) {
        if (!(v > 0.0))
            ck.fail("model.dt", "must be > 0");
        else
            out.dt = v;
    }
    long steps;
    if (ck.get_int(m, "model", "steps", steps)) {
        if (steps < 0)
            ck.fail("model.steps", "must be >= 0");
        else
            out.steps = steps;
    }
    if (auto it = m.find("seed"); it != m.end()) {
        if (!it->is_number_integer() ||
            (it->is_number_integer() && !it->is_number_unsigned() &&
             it->get<long long>() < 0))
            ck.fail("model.seed", "expected a non-negative integer");
        else
            out.seed = it->get<std::uint64_t>();
    }
    if (auto it = m.find("g"); it != m.end()) parse_g(ck, *it, out.g);
    if (auto it = m.find("kernel"); it != m.end())
        parse_kernel(ck, *it, out.kernel);
    std::string avg;
    if (ck.get_string(m, "model", "averaging", avg)) {
        if (avg == "symmetric")
            out.averaging = Averaging::symmetric;
        else if (avg == "normalized")
            out.averaging = Averaging::normalized;
        else
            ck.fail("model.averaging",
                    "must be one of \"symmetric\", \"normalized\"");
    }
    out.kernel.L = out.l;
}

void parse_axes(Checker& ck, const json& a, SweepAxes& out) {
    if (!a.is_object()) {
        ck.fail("experiment.axes", "expected an object");
        return;
    }
    ck.known_keys(a, "experiment.axes", {"n", "sigma", "h"});
    if (auto it = a.find("n"); it != a.end()) {
        if (!it->is_array() || it->empty())
            ck.fail("experiment.axes.n", "expected a non-empty array");
        else
            for (const auto& v : *it) {
                if (!v.is_number_integer() || v.get<long>() < 1) {
                    ck.fail("experiment.axes.n", "entries must be integers >= 1");
                    break;
                }
                out.n.push_back(v.get<long>());
            }
    }
    auto read_axis = [&](const char* key, std::vector<double>& dst) {
        auto it = a.find(key);
        if (it == a.end()) return;
        if (!it->is_array() || it->empty()) {
            ck.fail(std::string("experiment.axes.") + key,
                    "expected a non-empty array");
            return;
        }
        for (const auto& v : *it) {
            if (!v.is_number()) {
                ck.fail(std::string("experiment.axes.") + key,
                        "entries must be numbers");
                return;
            }
            dst.push_back(v.get<double>());
        }
    };
    read_axis("sigma", out.sigma);
    read_axis("h", out.h);
}

void parse_experiment(Checker& ck, const json& e, ExperimentConfig& out) {
    if (!e.is_object()) {
        ck.fail("experiment", "expected an object");
        return;
    }
    ck.known_keys(e, "experiment",
                  {"kind", "axes", "replicates", "detector", "kde"});
    std::string kind;
    if (!ck.get_string(e, "experiment", "kind", kind)) {
        ck.fail("experiment.kind", "required");
        return;
    }
    const std::string preset_prefix = "figure-preset:";
    if (kind == "simulate")
        out.kind = ExperimentKind::simulate;
    else if (kind == "stability")
        out.kind = ExperimentKind::stability;
    else if (kind == "critical-sigma")
        out.kind = ExperimentKind::critical_sigma;
    else if (kind == "sweep")
        out.kind = ExperimentKind::sweep;
    else if (kind == "transitions")
        out.kind = ExperimentKind::transitions;
    else if (kind == "fluctuation")
        out.kind = ExperimentKind::fluctuation;
    else if (kind.rfind(preset_prefix, 0) == 0) {
        out.kind = ExperimentKind::figure_preset;
        out.preset_id = kind.substr(preset_prefix.size());
        bool ok = false;
        for (int i = 1; i <= 9; ++i)
            if (out.preset_id == "fig" + std::to_string(i)) ok = true;
        if (!ok)
            ck.fail("experiment.kind",
                    "unknown preset id '" + out.preset_id + "'");
    } else {
        ck.fail("experiment.kind",
                "must be one of \"simulate\", \"stability\", "
                "\"critical-sigma\", \"sweep\", \"transitions\", "
                "\"fluctuation\", \"figure-preset:figN\"");
    }

    if (auto it = e.find("axes"); it != e.end()) {
        if (out.kind != ExperimentKind::sweep)
            ck.fail("experiment.axes", "only valid when kind is \"sweep\"");
        else
            parse_axes(ck, *it, out.axes);
    }
    if (out.kind == ExperimentKind::sweep && out.axes.empty())
        ck.fail("experiment.axes",
                "sweep requires at least one non-empty axis of n, sigma, h");

    long reps;
    if (ck.get_int(e, "experiment", "replicates", reps)) {
        if (reps < 1)
            ck.fail("experiment.replicates", "must be >= 1");
        else
            out.replicates = reps;
    }
    if (auto it = e.find("detector"); it != e.end()) {
        if (!it->is_object()) {
            ck.fail("experiment.detector", "expected an object");
        } else {
            ck.known_keys(*it, "experiment.detector",
                          {"enter_frac", "exit_frac"});
            ck.get_double(*it, "experiment.detector", "enter_frac",
                          out.detector.enter_frac);
            ck.get_double(*it, "experiment.detector", "exit_frac",
                          out.detector.exit_frac);
            if (!(out.detector.exit_frac > 0.0 &&
                  out.detector.exit_frac < out.detector.enter_frac &&
                  out.detector.enter_frac <= 1.0))
                ck.fail("experiment.detector",
                        "needs 0 < exit_frac < enter_frac <= 1");
        }
    }
    if (auto it = e.find("kde"); it != e.end()) {
        if (!it->is_object()) {
            ck.fail("experiment.kde", "expected an object");
        } else {
            ck.known_keys(*it, "experiment.kde", {"bandwidth", "grid"});
            double bw;
            if (ck.get_double(*it, "experiment.kde", "bandwidth", bw)) {
                if (!(bw > 0.0))
                    ck.fail("experiment.kde.bandwidth", "must be > 0");
                else
                    out.kde.bandwidth = bw;
            }
            long grid;
            if (ck.get_int(*it, "experiment.kde", "grid", grid)) {
                if (grid < 16)
                    ck.fail("experiment.kde.grid", "must be >= 16");
                else
                    out.kde.grid = static_cast<int>(grid);
            }
        }
    }
}

std::string kind_to_string(const ExperimentConfig& c) {
    switch (c.kind) {
        case ExperimentKind::simulate: return "simulate";
        case ExperimentKind::stability: return "stability";
        case ExperimentKind::critical_sigma: return "critical-sigma";
        case ExperimentKind::sweep: return "sweep";
        case ExperimentKind::transitions: return "transitions";
        case ExperimentKind::fluctuation: return "fluctuation";
        case ExperimentKind::figure_preset: return "figure-preset:" + c.preset_id;
    }
    return "simulate";
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues_)
    : std::runtime_error(join_issues(issues_)), issues(std::move(issues_)) {}

ExperimentConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("json parse error: ") + e.what()});
    }

    Checker ck;
    ExperimentConfig out;
    if (!root.is_object()) {
        ck.fail("(root)", "expected an object");
        throw ConfigError(std::move(ck.issues));
    }
    ck.known_keys(root, "(root)", {"model", "experiment"});
    if (auto it = root.find("model"); it != root.end())
        parse_model(ck, *it, out.model);
    else
        out.model.kernel.L = out.model.l;
    if (auto it = root.find("experiment"); it != root.end())
        parse_experiment(ck, *it, out);
    else
        ck.fail("experiment", "required");

    if (!ck.issues.empty()) throw ConfigError(std::move(ck.issues));
    return out;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError({"cannot open config file '" + path + "'"});
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

std::string config_hash(const ExperimentConfig& config) {
    json m;
    m["n"] = config.model.n;
    m["l"] = config.model.l;
    m["sigma"] = config.model.sigma;
    m["dt"] = config.model.dt;
    m["steps"] = config.model.steps;
    m["seed"] = config.model.seed;
    switch (config.model.g.variant) {
        case GVariant::cubic:
            m["g"] = {{"variant", "cubic"}, {"h", config.model.g.h}};
            break;
        case GVariant::tanh_gain:
            m["g"] = {{"variant", "tanh"}, {"a", config.model.g.a}};
            break;
        case GVariant::odd_polynomial:
            m["g"] = {{"variant", "odd-polynomial"},
                      {"coeffs", config.model.g.coeffs}};
            break;
    }
    m["kernel"] = {
        {"variant", config.model.kernel.variant == KernelVariant::top_hat
                        ? "top-hat"
                        : "uniform"},
        {"r", config.model.kernel.r}};
    m["averaging"] = config.model.averaging == Averaging::symmetric
                         ? "symmetric"
                         : "normalized";

    json e;
    e["kind"] = kind_to_string(config);
    if (!config.axes.empty()) {
        json a;
        if (!config.axes.n.empty()) a["n"] = config.axes.n;
        if (!config.axes.sigma.empty()) a["sigma"] = config.axes.sigma;
        if (!config.axes.h.empty()) a["h"] = config.axes.h;
        e["axes"] = a;
    }
    e["replicates"] = config.replicates;
    e["detector"] = {{"enter_frac", config.detector.enter_frac},
                     {"exit_frac", config.detector.exit_frac}};
    e["kde"] = {{"bandwidth", config.kde.bandwidth},
                {"grid", config.kde.grid}};

    json root;
    root["model"] = m;
    root["experiment"] = e;
    const std::string canon = root.dump();  // json sorts keys

    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : canon) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace czirok
