#include "ergo/config.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ergo/errors.hpp"

namespace ergo {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
}

Config Config::from_string(const std::string& text) {
    Config c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + " is not key=value: '" +
                              line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key on config line " + std::to_string(lineno));
        if (c.kv_.count(key))
            throw ConfigError("duplicate config key '" + key + "'");
        c.kv_[key] = value;
    }
    return c;
}

void Config::set(const std::string& key, const std::string& value) { kv_[key] = value; }

bool Config::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string Config::get_string(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("missing required config key '" + key + "'");
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const {
    std::string v = get_string(key);
    try {
        std::size_t pos = 0;
        double out = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' is not a number: '" + v + "'");
    }
}

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

int Config::get_int(const std::string& key) const {
    double v = get_double(key);
    int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
        throw ConfigError("config key '" + key + "' is not an integer");
    return i;
}

int Config::get_int(const std::string& key, int fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    std::string v = get_string(key);
    try {
        return std::stoull(v);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' is not a u64: '" + v + "'");
    }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    std::string v = get_string(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config key '" + key + "' is not a bool: '" + v + "'");
}

void Config::validate_schema(std::span<const std::string> allowed) const {
    for (const auto& [key, value] : kv_) {
        bool ok = std::find(allowed.begin(), allowed.end(), key) != allowed.end();
        if (!ok)
            throw ConfigError("unknown config key '" + key + "'");
    }
}

std::string Config::echo() const {
    std::string out;
    for (const auto& [key, value] : kv_) out += key + " = " + value + "\n";
    return out;
}

Potential build_potential(const Config& c, const std::string& prefix) {
    std::string kind = c.get_string(prefix + ".kind");
    int d = c.get_int(prefix + ".d", 1);
    if (kind == "power")
        return Potential::power(c.get_double(prefix + ".p"), c.get_double(prefix + ".delta", 1e-2),
                                d);
    if (kind == "heavytail") return Potential::heavy_tail(c.get_double(prefix + ".p"), d);
    if (kind == "quadratic")
        return Potential::quadratic(c.get_double(prefix + ".kappa", 1.0), d);
    if (kind == "custom") return Potential::parse(c.get_string(prefix + ".expr"), d);
    throw ConfigError("unknown potential kind '" + kind + "' (power|heavytail|quadratic|custom)");
}

GeneratorSpec build_generator(const Config& c) {
    std::string kind = c.get_string("generator.kind", "overdamped");
    if (kind == "overdamped") return GeneratorSpec::overdamped(build_potential(c));
    if (kind == "kinetic") return GeneratorSpec::kinetic(build_potential(c));
    if (kind == "diffusion") {
        int d = c.get_int("generator.d", 1);
        std::vector<double> sigma;
        std::vector<Expr> drift;
        for (int i = 1; i <= d; ++i) {
            sigma.push_back(c.get_double("generator.sigma" + std::to_string(i), 1.0));
            drift.push_back(Expr::parse(c.get_string("generator.drift" + std::to_string(i)), d));
        }
        return GeneratorSpec::general_diffusion(std::move(sigma), std::move(drift));
    }
    throw ConfigError("unknown generator kind '" + kind + "' (overdamped|diffusion|kinetic)");
}

LyapunovCandidate build_candidate(const Config& c, const GeneratorSpec& L) {
    std::string form = c.get_string("lyapunov.form");
    if (form == "exp_potential")
        return LyapunovCandidate::exp_potential(c.get_double("lyapunov.a"), L.potential());
    if (form == "exp_radial")
        return LyapunovCandidate::exp_radial(c.get_double("lyapunov.a"),
                                             c.get_double("lyapunov.q"),
                                             c.get_double("lyapunov.m", 1.0));
    if (form == "power_radial") return LyapunovCandidate::power_radial(c.get_double("lyapunov.a"));
    if (form == "kinetic_exp") {
        Potential G = build_potential(c, "lyapunov.g");
        return LyapunovCandidate::kinetic_exp(c.get_double("lyapunov.a"),
                                              c.get_double("lyapunov.b"), std::move(G),
                                              c.get_double("lyapunov.shift", 0.0));
    }
    if (form == "kinetic_affine") {
        if (c.has("lyapunov.alpha"))
            return LyapunovCandidate::kinetic_affine_from_alpha(
                c.get_double("lyapunov.a"), c.get_double("lyapunov.b"),
                c.get_double("lyapunov.alpha"), c.get_double("lyapunov.m", 1.0));
        Potential G = build_potential(c, "lyapunov.g");
        return LyapunovCandidate::kinetic_affine(c.get_double("lyapunov.a"),
                                                 c.get_double("lyapunov.b"), std::move(G),
                                                 c.get_double("lyapunov.m", 1.0));
    }
    if (form == "kinetic_exp_pow") {
        Potential G = build_potential(c, "lyapunov.g");
        return LyapunovCandidate::kinetic_exp_pow(
            c.get_double("lyapunov.a"), c.get_double("lyapunov.b"), c.get_double("lyapunov.s"),
            c.get_double("lyapunov.delta"), std::move(G), c.get_double("lyapunov.shift", 0.0));
    }
    if (form == "custom")
        return LyapunovCandidate::custom(
            Expr::parse(c.get_string("lyapunov.expr"), L.state_dimension()));
    throw ConfigError("unknown lyapunov form '" + form + "'");
}

PhiSpec build_phi(const Config& c, const std::string& prefix) {
    std::string kind = c.get_string(prefix + ".kind", "linear");
    if (kind == "linear") return PhiSpec::linear(c.get_double(prefix + ".alpha", 1.0));
    if (kind == "logpower")
        return PhiSpec::log_power(c.get_double(prefix + ".c"), c.get_double(prefix + ".r"));
    if (kind == "general") return PhiSpec::general(Expr::parse(c.get_string(prefix + ".expr"), 1));
    throw ConfigError("unknown phi kind '" + kind + "' (linear|logpower|general)");
}

PhiSpec parse_phi_shorthand(const std::string& text) {
    auto colon = text.find(':');
    std::string kind = colon == std::string::npos ? text : text.substr(0, colon);
    std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (kind == "linear") {
        if (args.empty()) return PhiSpec::linear(1.0);
        return PhiSpec::linear(std::stod(args));
    }
    if (kind == "logpower") {
        auto comma = args.find(',');
        if (comma == std::string::npos)
            throw ConfigError("logpower shorthand needs c,r (e.g. logpower:0.2,2)");
        return PhiSpec::log_power(std::stod(args.substr(0, comma)),
                                  std::stod(args.substr(comma + 1)));
    }
    if (kind == "general") return PhiSpec::general(Expr::parse(args, 1));
    throw ConfigError("unknown phi shorthand '" + text + "'");
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw NumericalError("cannot write artifact '" + path + "'");
        out << content;
        if (!out.good()) throw NumericalError("short write on artifact '" + path + "'");
    }
    fs::rename(tmp, target);
}

}  // namespace ergo
