#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ergo/rates.hpp"

namespace ergo {

struct RunContext {
    std::string out_dir = "out";
    std::uint64_t seed = 12345;
    int threads = 1;
    XiConvention xi_convention = XiConvention::T;
};

// Built-in scenarios: ou, subexp-p05, heavytail-p2, kinetic-quadratic,
// kinetic-subexp. Each writes its artifacts (CSV traces, certificate
// reports, a summary) under ctx.out_dir and returns the summary text.
std::string run_catalog(const std::string& name, const RunContext& ctx);

std::vector<std::string> catalog_names();

// Consolidated comparison table: theoretical constants (C_P, C_LP, xi)
// against oracle and empirical rates.
std::string run_report(const RunContext& ctx);

}  // namespace ergo
