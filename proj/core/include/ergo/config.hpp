#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ergo/generator.hpp"
#include "ergo/lyapunov.hpp"
#include "ergo/phi.hpp"

namespace ergo {

// Line-oriented key=value configuration with dotted section prefixes:
//   potential.kind = power
//   potential.p = 0.5
// '#' starts a comment; keys are unique; unknown keys are rejected against
// a subcommand schema.
class Config {
public:
    Config() = default;
    static Config from_file(const std::string& path);
    static Config from_string(const std::string& text);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    // Throws ConfigError naming the first unknown key.
    void validate_schema(std::span<const std::string> allowed) const;

    // Sorted key=value lines; written next to every run's artifacts.
    std::string echo() const;

    const std::map<std::string, std::string>& entries() const { return kv_; }

private:
    std::map<std::string, std::string> kv_;
};

// Builders shared by the CLI subcommands (keys under potential.*,
// generator.*, lyapunov.* and phi.*).
Potential build_potential(const Config& c, const std::string& prefix = "potential");
GeneratorSpec build_generator(const Config& c);
LyapunovCandidate build_candidate(const Config& c, const GeneratorSpec& L);
PhiSpec build_phi(const Config& c, const std::string& prefix = "phi");

// Parses CLI shorthand "linear:1", "logpower:0.2,2", "general:EXPR".
PhiSpec parse_phi_shorthand(const std::string& text);

// Atomic artifact write: temp file in the target directory, then rename.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace ergo
