#pragma once
// Fixture store, tolerance config, scene ingestion, JSON serialization and the
// verify-suite runner shared by the CLI and the acceptance binary.

#include "p3pstrat/deltoid.hpp"
#include "p3pstrat/strata.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace p3pstrat {

using json = nlohmann::json;

struct FixtureTriangle {
    std::string name;
    std::string sides_label; // e.g. "7,6,5" or "sqrt2,1,1"
    Triangle triangle;
    std::vector<Component> components; // in (e1', e2', e3'), trivial ones flagged
    // Displayed leading terms of the degree-16 component: monomials and coefficients.
    std::vector<Monomial> leading_monomials;
    std::vector<long long> leading_coefficients;
};

const std::vector<FixtureTriangle> &load_fixtures();
// By name ("general_acute") or by sides ("7,6,5", "sqrt2,1,1"); nullptr if unknown.
const FixtureTriangle *find_fixture(const std::string &key);

// --- configuration ---------------------------------------------------------

inline constexpr const char *kToleranceEnv = "P3PSTRAT_TOLERANCES";

json tolerances_to_json(const Tolerances &t);
// Unknown keys are rejected; missing keys keep their defaults.
Tolerances tolerances_from_json(const json &j);
// Explicit path first, then the environment variable, then defaults.
Tolerances load_tolerances(const std::optional<std::string> &path = std::nullopt);
// FNV-1a over the canonical JSON dump, as 16 hex digits.
std::string config_hash(const Tolerances &t, std::uint64_t seed);

// --- scenes ----------------------------------------------------------------

struct SchemaError : std::runtime_error {
    std::string field;
    SchemaError(const std::string &field_path, const std::string &what)
        : std::runtime_error(field_path + ": " + what), field(field_path) {}
};

struct Scene {
    Triangle triangle;
    std::vector<CameraCenter> centers;
};

// {"triangle": {"s12": .., "s13": .., "s23": ..} or {"s12_sq": ..},
//  "centers": [[x,y,z], ...]}; numbers may be given as "p/q" strings.
Scene parse_scene(const json &j);
Scene ingest_scene(const std::string &path);
mpq_class parse_rational(const json &v, const std::string &field);
// Side-length triple "7,6,5"; "sqrt2" style entries are accepted as sqrt(n).
Triangle parse_sides(const std::string &text);

// --- serialization ---------------------------------------------------------

json to_json(const Eigen::Vector3cd &v);
json to_json(const Eigen::Vector3d &v);
json to_json(const SolutionTriple &s);
json to_json(const DualSpaceReport &r);
json to_json(const Classification &c);
json to_json(const MorleyData &m);

// --- run reports -----------------------------------------------------------

struct Check {
    int id = 0;
    std::string name;
    bool passed = false;
    double value = 0;     // realized worst-case value
    double tolerance = 0; // threshold it was compared with
    std::string comparison; // "<", ">", "==" ...
    double runtime_s = 0;
    std::vector<std::string> details;
};

struct RunReport {
    std::string suite;
    std::uint64_t seed = 0;
    std::string config_hash;
    Tolerances tol;
    std::vector<Check> checks;
    bool passed() const;
    json to_json(bool include_runtime = true) const;
};

} // namespace p3pstrat
