#pragma once
// The nine acceptance criteria, runnable individually or as named suites.

#include "p3pstrat/harness.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace p3pstrat {

struct UnknownSuite : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct AcceptanceOptions {
    Tolerances tol;
    std::uint64_t seed = 20241017;
    std::vector<std::string> triangles; // fixture names or side labels; empty = criterion default
};

// Sweeps and fits reused across criteria within one run.
class AcceptanceContext {
  public:
    explicit AcceptanceContext(AcceptanceOptions opt);
    const AcceptanceOptions &options() const { return opt_; }

    std::vector<const FixtureTriangle *> fixtures(const std::vector<std::string> &defaults = {}) const;
    const SweepResult &e_sweep(const FixtureTriangle &f);   // 64 x 8 grid, heights 0.1R .. 3R
    const SweepResult &xyz_sweep(const FixtureTriangle &f); // 96 x 12 grid for the center-space fit
    // nullptr when the fit is ambiguous; the reason goes to `why`.
    const FittedSurface *e_model(const FixtureTriangle &f, std::string *why = nullptr);
    const FittedSurface *xyz_model(const FixtureTriangle &f, std::string *why = nullptr);

  private:
    AcceptanceOptions opt_;
    std::map<std::string, SweepResult> e_sweeps_, xyz_sweeps_;
    std::map<std::string, std::unique_ptr<FittedSurface>> e_models_, xyz_models_;
    std::map<std::string, std::string> e_fail_, xyz_fail_;
};

inline constexpr int kCriterionCount = 9;
std::string criterion_name(int id);
Check run_criterion(int id, AcceptanceContext &ctx);

// "all", "strata" (1-4), "deltoid" (5-8), "p3p" (9), or "c1" .. "c9".
std::vector<int> suite_criteria(const std::string &suite);
RunReport run_verify(const std::string &suite, const AcceptanceOptions &opt);

// "PASS  [n] name  value <op> tolerance" line for console output.
std::string summary_line(const Check &c);

} // namespace p3pstrat
