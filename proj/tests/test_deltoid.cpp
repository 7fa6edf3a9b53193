#include "p3pstrat/deltoid.hpp"
#include "p3pstrat/harness.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

using namespace p3pstrat;
using cd = std::complex<double>;

namespace {

SweepConfig grid(const Triangle &t, int nt, int nh, double lo, double hi, double offset = 0.37, bool morley = false) {
    const double R = circumcircle_data(t).R;
    return SweepConfig{t, nt, nh, lo * R, hi * R, offset, morley, Tolerances{}};
}

// One shared sweep and fits of the general acute fixture.
struct Acute {
    Triangle t = make_triangle(7, 6, 5);
    SweepResult e_sweep = sweep_cylinder(grid(t, 64, 8, 0.1, 3));
    SweepResult xyz_sweep = sweep_cylinder(grid(t, 96, 12, 0.1, 3));
    FittedSurface e_model = fit_deltoid_e(t, e_sweep.records, 16);
    FittedSurface xyz_model = fit_deltoid_xyz(t, xyz_sweep.records, 12);
};
const Acute &acute() {
    static const Acute a;
    return a;
}

const Monomial kRef = {8, 8, 0};

bool same_point_set(std::vector<CameraCenter> a, std::vector<CameraCenter> b, double tol) {
    if (a.size() != b.size())
        return false;
    for (const auto &p : a) {
        auto it = std::find_if(b.begin(), b.end(), [&](const CameraCenter &q) { return (p - q).norm() < tol; });
        if (it == b.end())
            return false;
        b.erase(it);
    }
    return true;
}

} // namespace

TEST_CASE("equilateral sweep records solve the source system") {
    const Triangle eq = make_triangle(1, 1, 1);
    const SweepResult s = sweep_cylinder(grid(eq, 16, 4, 0.1, 3, 0.37, true));
    CHECK(s.failures.empty());
    CHECK(s.sources == (16 + 3) * 4);
    int morley = 0;
    for (const auto &r : s.records) {
        const P3PInstance inst = instance_from_center(eq, r.source_center);
        CHECK(relative_residual(inst, r.complement_e.e) < 1e-9);
        CHECK((r.complement_e.e - distances(eq, r.source_center).cast<cd>()).norm() > 1e-6);
        if (r.on_morley_generatrix) {
            ++morley;
            CHECK(r.source_mu == 3);
        } else {
            CHECK(r.source_mu == 2);
        }
        // mirror pairs
        if (!r.complement_centers.empty()) {
            REQUIRE(r.complement_centers.size() == 2);
            const CameraCenter &a = r.complement_centers[0], &b = r.complement_centers[1];
            CHECK((a.head<2>() - b.head<2>()).norm() < 1e-9);
            CHECK(std::abs(a.z() + b.z()) < 1e-9);
        }
    }
    CHECK(morley == 3 * 4);
    CHECK_THROWS_AS(sweep_cylinder(grid(eq, 16, 4, 0, 3)), std::invalid_argument);
}

TEST_CASE("complements of double sources are simple") {
    // no configuration has two double solutions
    const Acute &a = acute();
    int checked = 0;
    for (const auto &r : a.e_sweep.records) {
        if (r.source_mu != 2 || checked >= 200)
            continue;
        ++checked;
        const auto sys = local_system<cd>(instance_from_center(a.t, r.source_center), r.complement_e.e);
        const auto mu = multiplicity(sys);
        REQUIRE(mu.mu);
        CHECK(*mu.mu == 1);
        if (r.complement_e.is_physical)
            CHECK(normalized_cylinder_value(a.t, r.complement_e.e) > 1e-9);
    }
    CHECK(checked == 200);
}

TEST_CASE("deltoid fit in center coordinates") {
    const Acute &a = acute();
    CHECK(a.xyz_model.model.rms_residual < 1e-8);
    CHECK(!a.xyz_model.attempts.empty());
    // fresh complement centers from a finer, shifted grid
    const SweepResult fresh = sweep_cylinder(grid(a.t, 37, 5, 0.15, 2.7, 0.11));
    double worst = 0;
    int n = 0;
    for (const auto &r : fresh.records)
        for (const auto &c : r.complement_centers) {
            worst = std::max(worst, std::abs(a.xyz_model.value(c)));
            ++n;
        }
    CHECK(n > 50);
    CHECK(worst < 1e-7);
    // mirror closure of the fitted surface
    for (const auto &r : fresh.records)
        for (const auto &c : r.complement_centers)
            CHECK(std::abs(a.xyz_model.value(CameraCenter(c.x(), c.y(), -c.z()))) < 1e-7);
}

TEST_CASE("deltoid fit in distance coordinates reproduces the leading coefficients") {
    const Acute &a = acute();
    const ImplicitSurfaceModel &m = a.e_model.model;
    CHECK(a.e_model.basis_kind == "even");
    CHECK(coefficient_ratio(m, {8, 6, 2}, kRef) == doctest::Approx(-141120.0 / 57624).epsilon(1e-5));
    CHECK(coefficient_ratio(m, {8, 4, 4}, kRef) == doctest::Approx(171072.0 / 57624).epsilon(1e-5));
    CHECK(coefficient_ratio(m, {8, 2, 6}, kRef) == doctest::Approx(-103680.0 / 57624).epsilon(1e-5));
    CHECK(coefficient_ratio(m, {8, 0, 8}, kRef) == doctest::Approx(31104.0 / 57624).epsilon(1e-5));

    const Triangle eq = make_triangle(1, 1, 1);
    const FittedSurface fe = fit_deltoid_e(eq, sweep_cylinder(grid(eq, 64, 8, 0.1, 3)).records, 16);
    CHECK(coefficient_ratio(fe.model, {8, 6, 2}, kRef) == doctest::Approx(-6.0 / 3).epsilon(1e-5));
    CHECK(coefficient_ratio(fe.model, {8, 4, 4}, kRef) == doctest::Approx(9.0 / 3).epsilon(1e-5));
    CHECK(coefficient_ratio(fe.model, {8, 2, 6}, kRef) == doctest::Approx(-6.0 / 3).epsilon(1e-5));
    CHECK(coefficient_ratio(fe.model, {8, 0, 8}, kRef) == doctest::Approx(3.0 / 3).epsilon(1e-5));
}

TEST_CASE("implicitization is stable across grids") {
    const Acute &a = acute();
    const FittedSurface other = fit_deltoid_e(a.t, sweep_cylinder(grid(a.t, 53, 9, 0.12, 2.8, 0.71)).records, 16);
    REQUIRE(other.model.basis == a.e_model.model.basis);
    const double cosine = std::abs(other.model.coefficients.dot(a.e_model.model.coefficients)) /
                          (other.model.coefficients.norm() * a.e_model.model.coefficients.norm());
    CHECK(cosine > 1 - 1e-6);
}

TEST_CASE("normalized distance") {
    const std::vector<std::string> XY = {"x", "y"};
    const SparsePoly x = SparsePoly::variable(XY, 0), y = SparsePoly::variable(XY, 1);
    const SparsePoly circle = x * x + y * y - SparsePoly::constant(XY, 1);
    for (double d : {1e-3, 0.1, 0.5}) {
        Eigen::VectorXcd p(2);
        p << (1 + d) * std::cos(0.4), (1 + d) * std::sin(0.4);
        // root of |grad| t + |H|/2 t^2 = p with |grad| = 2(1+d), |H| = 2, p = 2d + d^2
        const double g = 2 * (1 + d), pv = 2 * d + d * d;
        const double t = -g / 2 + std::sqrt(g * g / 4 + pv);
        CHECK(normalized_distance(poly_jet(circle, p), 1.0, 3, 2) == doctest::Approx(t).epsilon(1e-9));
        CHECK(normalized_distance(poly_jet(circle, p), 2.0, 3, 2) == doctest::Approx(t / 2).epsilon(1e-9));
        // a lower bound on the true distance d, tight as d -> 0
        CHECK(t <= d);
        CHECK(t >= d * (1 - d));
    }
    Eigen::VectorXcd on(2);
    on << std::cos(1.0), std::sin(1.0);
    CHECK(normalized_distance(poly_jet(circle, on), 1.0, 3, 2) == 0);
    // a value floor absorbs small values
    Eigen::VectorXcd near(2);
    near << 1 + 1e-9, 0;
    CHECK(normalized_distance(poly_jet(circle, near), 1.0, 3, 2, 1e-6) == 0);
}

TEST_CASE("membership of general acute complements") {
    const Acute &a = acute();
    const FixtureTriangle *f = find_fixture("general_acute");
    REQUIRE(f);
    std::map<std::string, int> hist;
    double worst = 0;
    for (const auto &r : a.e_sweep.records) {
        const MembershipResult m = component_membership(a.t, f->components, &a.e_model, r.complement_e.e);
        worst = std::max(worst, m.value);
        ++hist[m.name];
    }
    CHECK(worst < 1e-6);
    CHECK(hist.size() >= 1);
    CHECK_FALSE(hist.count("trivial_e1p"));
}

TEST_CASE("general right complements approach the quadric e1'^2 + e2'^2 - 25") {
    // only reached in the limit of low sources, so a dense low sweep is needed
    const FixtureTriangle *f = find_fixture("5,4,3");
    REQUIRE(f);
    const Triangle &t = f->triangle;
    const SweepResult s = sweep_cylinder(grid(t, 256, 40, 0.01, 20, 0.37, true));
    auto it = std::find_if(f->components.begin(), f->components.end(),
                           [](const Component &c) { return c.name == "quadric_12"; });
    REQUIRE(it != f->components.end());
    const std::vector<Component> only = {*it};
    double best = INFINITY;
    for (const auto &r : s.records)
        best = std::min(best, component_membership(t, only, nullptr, r.complement_e.e).value);
    CHECK(best < 1e-6);
}

TEST_CASE("random distance triples are mostly off every component") {
    const Acute &a = acute();
    const FixtureTriangle *f = find_fixture("general_acute");
    const double D = circumcircle_data(a.t).diameter();
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(0, 3 * D);
    int off = 0;
    const int n = 300;
    for (int k = 0; k < n; ++k) {
        const Eigen::Vector3cd e(U(rng), U(rng), U(rng));
        off += component_membership(a.t, f->components, &a.e_model, e).value > 1e-3;
    }
    // surfaces occupy a thin but nonzero shell, so a few random points fall inside it
    CHECK(off >= 0.98 * n);
}

TEST_CASE("tangency along the Morley generatrices") {
    const Acute &a = acute();
    const MorleyData m = morley_angles(a.t);
    const double R = circumcircle_data(a.t).R;
    std::vector<CameraCenter> probes;
    for (double th : m.thetas)
        for (double h : {0.5 * R, R, 2 * R})
            probes.push_back(cylinder_point(a.t, th, h));
    std::vector<TangencyProbe> details;
    CHECK(tangency_check(a.t, a.xyz_model, probes, 1e-300, &details) < 1e-4);
    CHECK(details.size() == probes.size());
    for (const auto &p : probes)
        CHECK(std::abs(a.xyz_model.value(p)) < 1e-6);
    // off the generatrices the surfaces separate
    int separated = 0;
    for (int k = 0; k < 12; ++k)
        separated += std::abs(a.xyz_model.value(cylinder_point(a.t, 0.5 * k + 0.2, R))) > 1e-6;
    CHECK(separated >= 10);
}

TEST_CASE("cusps of the deltoid") {
    const Acute &a = acute();
    const MorleyData m = morley_angles(a.t);
    const double R = circumcircle_data(a.t).R;
    std::vector<Eigen::Vector3cd> mu3, mu2;
    for (double th : m.thetas)
        for (double h : {0.5 * R, R, 2 * R})
            for (const auto &c : complements_of(a.t, cylinder_point(a.t, th, h), 3))
                mu3.push_back(c.e);
    for (const auto &r : a.e_sweep.records)
        if (r.source_mu == 2)
            mu2.push_back(r.complement_e.e);
    REQUIRE(mu3.size() == 9);
    for (double g : cusp_check(a.e_model, mu3, mu2))
        CHECK(g < 1e-3);
    const auto ctrl = cusp_check(a.e_model, mu2, mu2);
    std::vector<double> sorted = ctrl;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted[sorted.size() / 2] == doctest::Approx(1).epsilon(1e-2));
    // cusps lie on the deltoid
    for (const auto &p : mu3)
        CHECK(normalized_distance(a.e_model.jet(p), 1.0, static_cast<int>(a.e_model.model.basis.size()), 16,
                                  a.e_model.value_floor(p)) < 1e-7);
}

TEST_CASE("plane fit residual") {
    std::vector<Eigen::Vector3d> plane, helix;
    for (int k = 0; k < 20; ++k) {
        plane.emplace_back(k, 2.0 * k * k, 3.0 * k - 0.5 * k * k);
        helix.emplace_back(std::cos(0.5 * k), std::sin(0.5 * k), 0.1 * k);
    }
    // 3k - 0.5k^2 is linear in (x, y) = (k, 2k^2): a plane
    CHECK(plane_fit_residual(plane) < 1e-9);
    CHECK(plane_fit_residual(helix) > 0.1);
    CHECK(plane_fit_residual({Eigen::Vector3d::Zero()}) == 0);
}

TEST_CASE("figure-8 sweep") {
    const Triangle t = make_triangle(7, 6, 5);
    const double R = circumcircle_data(t).R;
    for (const auto &row : sweep_figure8(t, 0.5, R, 24)) {
        CHECK(row.mu == 1);
        CHECK(classify(t, row.O).label == StratumLabel::Regular);
        CHECK(row.complements.size() == 3);
        const auto sols = solve(instance_from_center(t, row.O));
        CHECK(sols.size() == 4);
    }
    CHECK_THROWS_AS(sweep_figure8(t, 1.5, R, 8), std::invalid_argument);

    // on the cylinder, gradient minima sit at the Morley angles
    const Acute &a = acute();
    const int n = 360;
    const auto rows = sweep_figure8(t, 1.0, R, n, &a.e_model);
    const MorleyData m = morley_angles(t);
    for (double th : m.thetas) {
        // smallest gradient within a window around the Morley angle
        int best = -1;
        for (int k = 0; k < n; ++k)
            if (std::abs(std::remainder(rows[k].theta - th, 2 * M_PI)) < 0.3 &&
                (best < 0 || rows[k].min_grad_norm < rows[best].min_grad_norm))
                best = k;
        REQUIRE(best >= 0);
        CHECK(std::abs(std::remainder(rows[best].theta - th, 2 * M_PI)) <= 2 * M_PI / n);
    }
}

TEST_CASE("figure-8 sweep of the equilateral triangle has threefold symmetry") {
    const Triangle eq = make_triangle(1, 1, 1);
    const double R = circumcircle_data(eq).R;
    const Eigen::Vector3d c(circumcircle_data(eq).center.x(), circumcircle_data(eq).center.y(), 0);
    const int n = 30; // rows k and k + n/3 are related by the 120 degree rotation
    const auto rows = sweep_figure8(eq, 1.0, R, n);
    const Eigen::Matrix3d rot = Eigen::AngleAxisd(2 * M_PI / 3, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    for (int k = 0; k < n; ++k) {
        const auto &next = rows[(k + n / 3) % n];
        CHECK((rot * (rows[k].O - c) + c - next.O).norm() < 1e-12);
        std::vector<CameraCenter> rotated;
        for (const auto &p : rows[k].centers)
            rotated.push_back(rot * (p - c) + c);
        CHECK(same_point_set(rotated, next.centers, 1e-8));
    }
}
