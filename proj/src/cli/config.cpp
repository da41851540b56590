#include "gbsval/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "gbsval/errors.hpp"

namespace gbsval::cli {

namespace {

const std::set<std::string>& known_keys()
{
    static const std::set<std::string> keys = {
        "r",       "r_file",    "modes",   "epsilon",  "t",          "sigma",     "family",
        "matrix",  "n_s",       "n_r",     "e_s",      "seed",       "chunk",     "threads",
        "d",       "subsets",   "out",     "n_fake",   "pattern_format", "patterns", "theory",
        "counts",  "perm_seed", "trials",  "correlation_orders", "t_min", "t_max", "t_steps",
        "eps_min", "eps_max",   "eps_steps"};
    return keys;
}

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void fail(const ConfigEntry& e, const std::string& key, const std::string& what)
{
    throw ConfigError(e.origin + ": " + key + ": " + what);
}

double to_double(const ConfigEntry& e, const std::string& key)
{
    const std::string& v = e.value;
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
        fail(e, key, "expected a real number, got '" + v + "'");
    }
    return out;
}

std::uint64_t to_u64(const ConfigEntry& e, const std::string& key)
{
    const std::string& v = e.value;
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        fail(e, key, "expected a non-negative integer, got '" + v + "'");
    }
    return out;
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(s);
    while (std::getline(ss, item, sep)) {
        out.push_back(trim(item));
    }
    return out;
}

std::vector<double> parse_reals(const std::string& text, const ConfigEntry& e, const std::string& key)
{
    std::string normalized = text;
    std::replace(normalized.begin(), normalized.end(), ',', ' ');
    std::istringstream ss(normalized);
    std::vector<double> out;
    std::string tok;
    while (ss >> tok) {
        out.push_back(to_double(ConfigEntry{tok, e.origin}, key));
    }
    if (out.empty()) {
        fail(e, key, "expected at least one value");
    }
    return out;
}

// "0-3,5;6,7" -> {{0,1,2,3,5},{6,7}}
std::vector<std::vector<std::size_t>> parse_subsets(const ConfigEntry& e)
{
    std::vector<std::vector<std::size_t>> out;
    for (const auto& group : split(e.value, ';')) {
        std::vector<std::size_t> subset;
        for (const auto& item : split(group, ',')) {
            if (item.empty()) {
                fail(e, "subsets", "empty mode index");
            }
            const auto dash = item.find('-');
            if (dash == std::string::npos) {
                subset.push_back(to_u64(ConfigEntry{item, e.origin}, "subsets"));
            } else {
                const auto lo = to_u64(ConfigEntry{trim(item.substr(0, dash)), e.origin}, "subsets");
                const auto hi = to_u64(ConfigEntry{trim(item.substr(dash + 1)), e.origin}, "subsets");
                if (hi < lo) {
                    fail(e, "subsets", "descending range '" + item + "'");
                }
                for (auto m = lo; m <= hi; ++m) {
                    subset.push_back(m);
                }
            }
        }
        out.push_back(std::move(subset));
    }
    return out;
}

template <typename T>
std::string join(const std::vector<T>& values, const char* sep)
{
    std::ostringstream ss;
    ss.precision(17);
    for (std::size_t i = 0; i < values.size(); ++i) {
        ss << (i ? sep : "") << values[i];
    }
    return ss.str();
}

} // namespace

ConfigMap ConfigMap::parse(std::istream& in, const std::string& source)
{
    ConfigMap map;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string origin = source + ":" + std::to_string(line_no);
        const auto hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ": expected 'key = value'");
        }
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(origin + ": missing key");
        }
        if (!known_keys().count(key)) {
            throw ConfigError(origin + ": unknown key '" + key + "'");
        }
        if (map.has(key)) {
            throw ConfigError(origin + ": duplicate key '" + key + "' (first set at " + map.find(key)->origin + ")");
        }
        map.entries_[key] = ConfigEntry{value, origin};
    }
    return map;
}

ConfigMap ConfigMap::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    return parse(in, path.string());
}

void ConfigMap::set(const std::string& key, const std::string& value, const std::string& origin)
{
    if (!known_keys().count(key)) {
        throw ConfigError(origin + ": unknown key '" + key + "'");
    }
    entries_[key] = ConfigEntry{value, origin};
}

const ConfigEntry* ConfigMap::find(const std::string& key) const
{
    const auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

bool command_needs_model(const std::string& command)
{
    return command != "bin" && command != "compare";
}

RunConfig build_run_config(const ConfigMap& map, bool need_model)
{
    RunConfig c;
    auto real = [&](const char* key, double& target) {
        if (const auto* e = map.find(key)) {
            target = to_double(*e, key);
        }
    };
    auto count = [&](const char* key, std::size_t& target) {
        if (const auto* e = map.find(key)) {
            target = static_cast<std::size_t>(to_u64(*e, key));
        }
    };

    // Squeezing parameters.
    const auto* r = map.find("r");
    const auto* r_file = map.find("r_file");
    if (r && r_file) {
        fail(*r_file, "r_file", "conflicts with r set at " + r->origin);
    }
    if (!r && !r_file) {
        if (need_model) {
            throw ConfigError("missing required key 'r' (or 'r_file')");
        }
    } else if (r) {
        c.model.r = parse_reals(r->value, *r, "r");
    } else {
        std::ifstream in(r_file->value);
        if (!in) {
            fail(*r_file, "r_file", "cannot open '" + r_file->value + "'");
        }
        std::stringstream buffer;
        buffer << in.rdbuf();
        c.model.r = parse_reals(buffer.str(), *r_file, "r_file");
    }
    if (const auto* e = map.find("modes")) {
        const auto m = static_cast<std::size_t>(to_u64(*e, "modes"));
        if (m == 0) {
            fail(*e, "modes", "must be positive");
        }
        if (c.model.r.size() == 1) {
            c.model.r.assign(m, c.model.r.front());
        } else if (c.model.r.size() != m) {
            fail(*e, "modes", "does not match the " + std::to_string(c.model.r.size()) + " squeezing values");
        }
    }
    const auto* family = map.find("family");
    if (family) {
        try {
            c.model.family = parse_family(family->value);
        } catch (const ConfigError& err) {
            fail(*family, "family", err.what());
        }
    }
    real("epsilon", c.model.epsilon);
    if (!family && c.model.epsilon > 0.0) {
        c.model.family = StateFamily::ThermalizedSqueezed;
    }
    real("t", c.model.t);
    if (const auto* e = map.find("sigma")) {
        try {
            c.model.ordering = ordering_from_sigma(to_double(*e, "sigma"));
        } catch (const ConfigError& err) {
            fail(*e, "sigma", err.what());
        }
    }
    try {
        if (r || r_file) {
            c.model.validate();
        }
    } catch (const ConfigError& err) {
        const auto* where = family ? family : (r ? r : r_file);
        throw ConfigError(where->origin + ": invalid input model: " + err.what());
    }

    if (const auto* e = map.find("matrix")) {
        c.matrix = e->value;
        c.matrix_origin = e->origin;
    } else if (r || r_file) {
        c.matrix_origin = r ? r->origin : r_file->origin;
    }

    // Ensemble sizes: E_S = N_S * N_R.
    count("n_r", c.n_r);
    if (c.n_r == 0) {
        fail(*map.find("n_r"), "n_r", "must be positive");
    }
    const auto* n_s = map.find("n_s");
    const auto* e_s = map.find("e_s");
    if (n_s) {
        c.n_s = static_cast<std::size_t>(to_u64(*n_s, "n_s"));
        if (c.n_s == 0) {
            fail(*n_s, "n_s", "must be positive");
        }
    }
    if (e_s) {
        const auto total = static_cast<std::size_t>(to_u64(*e_s, "e_s"));
        if (total == 0 || total % c.n_r != 0) {
            fail(*e_s, "e_s", "must be a positive multiple of n_r = " + std::to_string(c.n_r));
        }
        if (n_s && c.n_s * c.n_r != total) {
            fail(*e_s, "e_s", "differs from n_s * n_r = " + std::to_string(c.n_s * c.n_r));
        }
        c.n_s = total / c.n_r;
    }
    if (const auto* e = map.find("seed")) {
        c.seed = to_u64(*e, "seed");
    }
    count("chunk", c.chunk);
    if (c.chunk == 0) {
        fail(*map.find("chunk"), "chunk", "must be positive");
    }
    if (const auto* e = map.find("threads")) {
        c.threads = static_cast<int>(to_u64(*e, "threads"));
    }

    // Binning.
    if (const auto* e = map.find("subsets")) {
        c.subsets = parse_subsets(*e);
        c.subsets_origin = e->origin;
        c.d = c.subsets->size();
        if (const auto* de = map.find("d"); de && to_u64(*de, "d") != c.d) {
            fail(*de, "d", "disagrees with the " + std::to_string(c.d) + " subsets at " + e->origin);
        }
    } else if (const auto* e = map.find("d")) {
        c.d = static_cast<std::size_t>(to_u64(*e, "d"));
        c.subsets_origin = e->origin;
        if (c.d == 0) {
            fail(*e, "d", "must be positive");
        }
    }

    if (const auto* e = map.find("out")) {
        c.out = e->value;
    }
    count("n_fake", c.n_fake);
    if (const auto* e = map.find("pattern_format")) {
        if (e->value != "text" && e->value != "packed") {
            fail(*e, "pattern_format", "expected 'text' or 'packed'");
        }
        c.pattern_format = e->value;
    }
    if (const auto* e = map.find("patterns")) {
        c.patterns = e->value;
    }
    if (const auto* e = map.find("theory")) {
        c.theory = e->value;
    }
    if (const auto* e = map.find("counts")) {
        c.counts = e->value;
    }
    if (const auto* e = map.find("perm_seed")) {
        c.perm_seed = to_u64(*e, "perm_seed");
    }
    count("trials", c.trials);
    if (c.trials == 0) {
        fail(*map.find("trials"), "trials", "must be at least one");
    }
    if (const auto* e = map.find("correlation_orders")) {
        for (const auto& item : split(e->value, ',')) {
            const auto n = to_u64(ConfigEntry{item, e->origin}, "correlation_orders");
            if (n == 0 || n > c.model.modes()) {
                fail(*e, "correlation_orders", "order " + item + " is outside 1.." + std::to_string(c.model.modes()));
            }
            c.correlation_orders.push_back(static_cast<int>(n));
        }
    }

    real("t_min", c.grid.t_min);
    real("t_max", c.grid.t_max);
    count("t_steps", c.grid.t_steps);
    real("eps_min", c.grid.eps_min);
    real("eps_max", c.grid.eps_max);
    count("eps_steps", c.grid.eps_steps);
    return c;
}

std::vector<std::string> RunConfig::echo() const
{
    std::map<std::string, std::string> kv;
    kv["r"] = join(model.r, ",");
    kv["family"] = std::string(to_string(model.family));
    kv["epsilon"] = join(std::vector<double>{model.epsilon}, "");
    kv["t"] = join(std::vector<double>{model.t}, "");
    kv["sigma"] = join(std::vector<double>{sigma_of(model.ordering)}, "");
    kv["matrix"] = matrix.value_or(model.modes() == 1 ? "identity" : "");
    kv["n_s"] = std::to_string(n_s);
    kv["n_r"] = std::to_string(n_r);
    kv["e_s"] = std::to_string(ensemble_size());
    kv["seed"] = std::to_string(seed);
    kv["d"] = std::to_string(d);
    if (subsets) {
        std::vector<std::string> groups;
        for (const auto& s : *subsets) {
            groups.push_back(join(s, ","));
        }
        kv["subsets"] = join(groups, ";");
    }
    std::vector<std::string> out;
    for (const auto& [k, v] : kv) {
        out.push_back(k + " = " + v);
    }
    return out;
}

TransmissionMatrix resolve_network(const RunConfig& config)
{
    const std::size_t m = config.model.modes();
    if (!config.matrix) {
        if (m > 1) {
            throw ConfigError(config.matrix_origin + ": matrix: a transmission matrix path is required for " +
                              std::to_string(m) + " modes (use 'identity' for no network)");
        }
        return TransmissionMatrix::identity(1);
    }
    if (*config.matrix == "identity") {
        return TransmissionMatrix::identity(m);
    }
    TransmissionMatrix t = load_matrix(*config.matrix);
    if (t.inputs() != m) {
        throw ConfigError(config.matrix_origin + ": matrix: has " + std::to_string(t.inputs()) +
                          " inputs but r lists " + std::to_string(m) + " modes");
    }
    return t;
}

BinningSpec resolve_binning(const RunConfig& config, std::size_t modes)
{
    const std::string where = config.subsets_origin.empty() ? std::string("binning") : config.subsets_origin;
    BinningSpec spec;
    if (config.subsets) {
        spec.subsets = *config.subsets;
    } else {
        if (modes % config.d != 0) {
            throw ConfigError(where + ": equal-split binning needs d = " + std::to_string(config.d) +
                              " to divide M = " + std::to_string(modes));
        }
        spec = BinningSpec::equal_split(modes, config.d);
    }
    try {
        spec.validate(modes);
    } catch (const ConfigError& err) {
        throw ConfigError(where + ": " + err.what());
    }
    return spec;
}

} // namespace gbsval::cli
