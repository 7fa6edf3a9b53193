#include "p3pstrat/harness.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace p3pstrat {

json tolerances_to_json(const Tolerances &t) {
    return json{{"tau_rank", t.tau_rank},     {"membership", t.membership}, {"fit_residual", t.fit_residual},
                {"cusp_ratio", t.cusp_ratio}, {"generator", t.generator},   {"c2_noise_floor", t.c2_noise_floor},
                {"continuum", t.continuum},   {"plane", t.plane},           {"max_order", t.max_order}};
}

Tolerances tolerances_from_json(const json &j) {
    if (!j.is_object())
        throw SchemaError("$", "tolerance config must be an object");
    Tolerances t;
    for (const auto &[k, v] : j.items()) {
        const std::string path = "$." + k;
        if (k == "max_order") {
            if (!v.is_number_integer() || v.get<int>() < 1)
                throw SchemaError(path, "expected a positive integer");
            t.max_order = v.get<int>();
            continue;
        }
        if (!v.is_number() || !(v.get<double>() > 0))
            throw SchemaError(path, "expected a positive number");
        const double x = v.get<double>();
        if (k == "tau_rank")
            t.tau_rank = x;
        else if (k == "membership")
            t.membership = x;
        else if (k == "fit_residual")
            t.fit_residual = x;
        else if (k == "cusp_ratio")
            t.cusp_ratio = x;
        else if (k == "generator")
            t.generator = x;
        else if (k == "c2_noise_floor")
            t.c2_noise_floor = x;
        else if (k == "continuum")
            t.continuum = x;
        else if (k == "plane")
            t.plane = x;
        else
            throw SchemaError(path, "unknown tolerance key");
    }
    return t;
}

namespace {

json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error &e) {
        throw SchemaError(path, e.what());
    }
}

} // namespace

Tolerances load_tolerances(const std::optional<std::string> &path) {
    if (path)
        return tolerances_from_json(read_json_file(*path));
    if (const char *env = std::getenv(kToleranceEnv); env && *env)
        return tolerances_from_json(read_json_file(env));
    return {};
}

std::string config_hash(const Tolerances &t, std::uint64_t seed) {
    const std::string s = tolerances_to_json(t).dump() + "#" + std::to_string(seed);
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

mpq_class parse_rational(const json &v, const std::string &field) {
    if (v.is_number_integer())
        return mpq_class(static_cast<long>(v.get<long long>()));
    if (v.is_number())
        return mpq_class(v.get<double>());
    if (!v.is_string())
        throw SchemaError(field, "expected a number or a \"p/q\" string");
    std::string s = v.get<std::string>();
    try {
        if (s.find_first_of(".eE") != std::string::npos)
            return mpq_class(std::stod(s));
        if (!s.empty() && s[0] == '+')
            s.erase(0, 1);
        mpq_class q(s, 10);
        if (q.get_den() == 0)
            throw SchemaError(field, "zero denominator");
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument &) {
        throw SchemaError(field, "cannot parse \"" + v.get<std::string>() + "\" as a rational");
    }
}

Scene parse_scene(const json &j) {
    if (!j.is_object())
        throw SchemaError("$", "scene must be an object");
    if (!j.contains("triangle"))
        throw SchemaError("$.triangle", "missing");
    const json &tj = j.at("triangle");
    if (!tj.is_object())
        throw SchemaError("$.triangle", "expected an object");
    std::array<mpq_class, 3> sq;
    const char *names[3] = {"s12", "s13", "s23"};
    for (int i = 0; i < 3; ++i) {
        const std::string side = names[i], squared = side + "_sq";
        if (tj.contains(squared)) {
            sq[i] = parse_rational(tj.at(squared), "$.triangle." + squared);
        } else if (tj.contains(side)) {
            const mpq_class s = parse_rational(tj.at(side), "$.triangle." + side);
            if (s <= 0)
                throw SchemaError("$.triangle." + side, "side length must be positive");
            sq[i] = s * s;
        } else {
            throw SchemaError("$.triangle." + side, "missing (give " + side + " or " + squared + ")");
        }
        if (sq[i] <= 0)
            throw SchemaError("$.triangle." + squared, "must be positive");
    }
    Scene sc;
    try {
        sc.triangle = make_triangle_sq(sq[0], sq[1], sq[2]);
    } catch (const DegenerateTriangle &e) {
        throw DegenerateTriangle(std::string("$.triangle: ") + e.what());
    }
    if (j.contains("centers")) {
        const json &cs = j.at("centers");
        if (!cs.is_array())
            throw SchemaError("$.centers", "expected an array of [x,y,z]");
        for (std::size_t k = 0; k < cs.size(); ++k) {
            const std::string path = "$.centers[" + std::to_string(k) + "]";
            if (!cs[k].is_array() || cs[k].size() != 3)
                throw SchemaError(path, "expected [x, y, z]");
            CameraCenter O;
            for (int i = 0; i < 3; ++i)
                O(i) = parse_rational(cs[k][i], path + "[" + std::to_string(i) + "]").get_d();
            sc.centers.push_back(O);
        }
    }
    return sc;
}

Scene ingest_scene(const std::string &path) { return parse_scene(read_json_file(path)); }

Triangle parse_sides(const std::string &text) {
    if (const FixtureTriangle *f = find_fixture(text))
        return f->triangle;
    std::array<mpq_class, 3> sq;
    std::stringstream ss(text);
    std::string item;
    int i = 0;
    while (std::getline(ss, item, ',')) {
        if (i >= 3)
            throw std::invalid_argument("expected three comma-separated sides");
        if (item.rfind("sqrt", 0) == 0)
            sq[i] = parse_rational(json(item.substr(4)), "side " + std::to_string(i + 1));
        else {
            const mpq_class s = parse_rational(json(item), "side " + std::to_string(i + 1));
            sq[i] = s * s;
        }
        ++i;
    }
    if (i != 3)
        throw std::invalid_argument("expected three comma-separated sides");
    return make_triangle_sq(sq[0], sq[1], sq[2]);
}

json to_json(const Eigen::Vector3cd &v) {
    json a = json::array();
    for (int i = 0; i < 3; ++i)
        a.push_back(v(i).imag() == 0 ? json(v(i).real()) : json::array({v(i).real(), v(i).imag()}));
    return a;
}

json to_json(const Eigen::Vector3d &v) { return json::array({v(0), v(1), v(2)}); }

json to_json(const SolutionTriple &s) {
    json j{{"e", to_json(s.e)}, {"residual", s.residual}, {"physical", s.is_physical}};
    if (s.multiplicity_hint)
        j["cluster_size"] = *s.multiplicity_hint;
    return j;
}

json to_json(const DualSpaceReport &r) {
    json j{{"corank", r.corank},
           {"null_vector_u", to_json(r.null_vector_u)},
           {"jacobian_sigma", to_json(r.jacobian_sigma)},
           {"dual_dims", r.dims},
           {"mu", r.mu ? json(*r.mu) : json("infinite_suspected")},
           {"c1", r.c1},
           {"tau_rank", r.tau_rank},
           {"macaulay_min_gap", r.macaulay_min_gap}};
    if (r.c2)
        j["c2"] = *r.c2;
    if (r.c3)
        j["c3"] = *r.c3;
    return j;
}

json to_json(const Classification &c) {
    return json{{"label", to_string(c.label)},
                {"reason", c.reason},
                {"on_cylinder", c.on_cylinder},
                {"exact_membership", c.exact_membership},
                {"cylinder_value", c.cylinder_value},
                {"continuum", c.continuum},
                {"i3_degenerate", c.i3_degenerate},
                {"generators_vanish", c.generators_vanish},
                {"generator_values", c.generator_values},
                {"dual_space", to_json(c.report)},
                {"notes", c.notes}};
}

json to_json(const MorleyData &m) {
    json bases = json::array();
    for (const auto &b : m.generatrix_bases)
        bases.push_back({b.x(), b.y()});
    return json{{"D", {m.D.x(), m.D.y()}},
                {"E", {m.E.x(), m.E.y()}},
                {"F", {m.F.x(), m.F.y()}},
                {"side", m.side},
                {"thetas", m.thetas},
                {"generatrix_bases", bases},
                {"cubic_residuals", m.f1_residuals},
                {"sin3theta", m.sin3theta}};
}

bool RunReport::passed() const {
    for (const auto &c : checks)
        if (!c.passed)
            return false;
    return true;
}

json RunReport::to_json(bool include_runtime) const {
    json cs = json::array();
    for (const auto &c : checks) {
        json j{{"id", c.id},
               {"name", c.name},
               {"passed", c.passed},
               {"value", c.value},
               {"tolerance", c.tolerance},
               {"comparison", c.comparison},
               {"details", c.details}};
        if (include_runtime)
            j["runtime_s"] = c.runtime_s;
        cs.push_back(j);
    }
    return json{{"suite", suite},   {"seed", seed},       {"config_hash", config_hash},
                {"tolerances", tolerances_to_json(tol)}, {"passed", passed()}, {"checks", cs}};
}

} // namespace p3pstrat
