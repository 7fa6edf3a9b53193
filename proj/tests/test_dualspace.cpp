#include "p3pstrat/dualspace.hpp"
#include "p3pstrat/strata.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace p3pstrat;
using cd = std::complex<double>;

namespace {

const CameraCenter kOnCylinder(4, 2, 1); // on the (5,4,3) danger cylinder

QuadraticSystem<double> system_at(const Triangle &t, const CameraCenter &O) {
    return local_system<double>(instance_from_center(t, O), distances(t, O));
}

// Closed-form left null vector of the Jacobian, written from its displayed form.
Eigen::Vector3d closed_form_u(const Triangle &t, const Eigen::Vector3d &e) {
    const Eigen::Vector3d E = e.array().square();
    const Eigen::Vector3d S = t.S(); // (s12^2, s13^2, s23^2)
    return {1, (-E(1) + E(2) + S(2)) / (E(0) - E(2) - S(1)), (E(1) - E(2) + S(2)) / (E(0) - E(1) - S(0))};
}

// Perturbation-cluster oracle: roots of nearby instances that converge to xi.
int cluster_count(const Triangle &t, const CameraCenter &O, double perturbation, double radius, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1, 1);
    P3PInstance inst = instance_from_center(t, O);
    inst.c12 += perturbation * U(rng);
    inst.c13 += perturbation * U(rng);
    inst.c23 += perturbation * U(rng);
    const Eigen::Vector3d xi = distances(t, O);
    int n = 0;
    for (const auto &s : solve(inst))
        if ((s.e - xi.cast<cd>()).norm() < radius * xi.norm())
            n += s.multiplicity_hint.value_or(1);
    return n;
}

QuadraticSystem<double> synthetic(std::initializer_list<std::pair<Eigen::Vector3d, Eigen::Matrix3d>> rows) {
    QuadraticSystem<double> s;
    int i = 0;
    for (const auto &[g, A] : rows) {
        s.G.row(i) = g.transpose();
        s.A[i] = A;
        ++i;
    }
    return s;
}

Eigen::Matrix3d sym(int i, int j, double v = 1) {
    Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
    A(i, j) += v / (i == j ? 1 : 2);
    A(j, i) += i == j ? 0 : v / 2;
    return A;
}

} // namespace

TEST_CASE("jacobian at the equilateral unit solution") {
    const Triangle eq = make_triangle(1, 1, 1);
    const Mat3<double> J = jacobian_at<double>(eq, Vec3<double>(1, 1, 1));
    Eigen::Matrix3d expect;
    expect << 0, 1, 1, 1, 0, 1, 1, 1, 0;
    CHECK((J - expect).norm() < 1e-15);
    CHECK(J.determinant() == doctest::Approx(2));
    const auto null = corank_and_nullvec<double>(J);
    CHECK(null.corank == 0);
    CHECK_THROWS_AS(jacobian_at<double>(eq, Vec3<double>(0, 1, 1)), ZeroComponent);

    const auto Jx = jacobian_exact_sq(make_triangle(5, 4, 3), {mpq_class(21), mpq_class(6), mpq_class(9, 5)});
    const Mat3<double> Jf = jacobian_at<double>(make_triangle(5, 4, 3), distances(make_triangle(5, 4, 3), kOnCylinder));
    for (int i = 0; i < 3; ++i)
        CHECK(Jx[i][i] == 0);
    for (int i = 0; i < 3; ++i)
        CHECK(Jf(i, i) == 0);
}

TEST_CASE("jacobian singularity on and off the cylinder") {
    const Triangle t = make_triangle(5, 4, 3);
    const Eigen::Vector3d e = distances(t, kOnCylinder);
    const Mat3<double> J = jacobian_at<double>(t, e);
    const Eigen::Vector3d sv = Eigen::JacobiSVD<Eigen::Matrix3d>(J).singularValues();
    CHECK(sv(2) / sv(0) < 1e-10);

    const auto null = corank_and_nullvec<double>(J);
    CHECK(null.corank == 1);
    const Eigen::Vector3d u = closed_form_u(t, e);
    CHECK(std::abs(null.u.dot(u)) / (null.u.norm() * u.norm()) > 1 - 1e-8);
    CHECK((null.u.transpose() * J).norm() < 1e-10 * sv(0));
    Eigen::Index big;
    null.u.cwiseAbs().maxCoeff(&big);
    CHECK(null.u(big) > 0);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-3, 8), Z(0.2, 5);
    const double R2 = std::pow(circumcircle_data(t).R, 2);
    for (int k = 0; k < 200; ++k) {
        const CameraCenter O(U(rng), U(rng), Z(rng));
        if (std::abs(danger_cylinder_value_xyz(t, O)) < 0.05 * R2)
            continue;
        const Eigen::Vector3d s = Eigen::JacobiSVD<Eigen::Matrix3d>(jacobian_at<double>(t, distances(t, O))).singularValues();
        CHECK(s(2) / s(0) > 1e-4);
    }
    CHECK(corank_and_nullvec<double>(Mat3<double>::Zero()).corank == 3);
}

TEST_CASE("jacobian rank is at least two everywhere") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> side(1, 2), th(0, 2 * M_PI), H(0.05, 3), U(-2, 3);
    int n = 0;
    while (n < 10000) {
        Triangle t;
        try {
            t = make_triangle(side(rng), side(rng), side(rng));
        } catch (const DegenerateTriangle &) {
            continue;
        }
        CameraCenter O;
        switch (n % 3) {
        case 0:
            O = CameraCenter(U(rng), U(rng), H(rng));
            break;
        case 1:
            O = cylinder_point(t, th(rng), H(rng));
            break;
        default: {
            const auto m = morley_angles(t);
            if (m.thetas.empty())
                continue;
            O = cylinder_point(t, m.thetas[n % m.thetas.size()], H(rng));
        }
        }
        ++n;
        const Eigen::Vector3d s = Eigen::JacobiSVD<Eigen::Matrix3d>(jacobian_at<double>(t, distances(t, O))).singularValues();
        CHECK(s(1) / s(0) > 1e-8);
    }
}

TEST_CASE("jacobian determinant is proportional to the cylinder polynomial") {
    const Triangle t = make_triangle(7, 6, 5);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(1, 9);
    double ratio0 = 0;
    for (int k = 0; k < 50; ++k) {
        const Eigen::Vector3d e(U(rng), U(rng), U(rng));
        const double r = jacobian_at<double>(t, e).determinant() * e.prod() / criterion_c1(t, e);
        if (k == 0)
            ratio0 = r;
        CHECK(r == doctest::Approx(ratio0).epsilon(1e-9));
    }
    CHECK(ratio0 != 0);
}

TEST_CASE("criterion c1") {
    CHECK(criterion_c1_exact_sq(make_triangle(5, 4, 3), {mpq_class(21), mpq_class(6), mpq_class(9, 5)}) == 0);
    const Triangle eq = make_triangle(1, 1, 1);
    for (double r : {0.3, 1.0, 2.5, 10.0})
        CHECK(criterion_c1(eq, Eigen::Vector3d(r, r, r)) == doctest::Approx(-1).epsilon(1e-9));
    CHECK(criterion_c1_exact_sq(eq, {mpq_class(4, 3), mpq_class(1, 3), mpq_class(1, 3)}) == 0);

    // agrees with the cylinder value computed along the strata path
    const Triangle t = make_triangle(7, 6, 5);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(1, 9);
    for (int k = 0; k < 50; ++k) {
        const Eigen::Vector3d e(U(rng), U(rng), U(rng));
        const double a = criterion_c1(t, e), b = danger_cylinder_value_e(t, e);
        CHECK(std::abs(a - b) <= 1e-12 * std::max({std::abs(a), std::abs(b), 1.0}) * 1e4);
        CHECK(std::abs(criterion_c1(t, Eigen::Vector3cd(e.cast<cd>())) - a) <= 1e-9 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("dual space dimensions at regular and cylinder points") {
    const Triangle t = make_triangle(5, 4, 3);
    const auto on = system_at(t, kOnCylinder);
    CHECK(macaulay_dual_dim(on, 0).dim == 1);
    CHECK(macaulay_dual_dim(on, 1).dim == 2);
    CHECK(macaulay_dual_dim(on, 2).dim == 2);
    CHECK(macaulay_dual_dim(on, 3).dim == 2);
    const auto mu = multiplicity(on);
    REQUIRE(mu.mu);
    CHECK(*mu.mu == 2);
    CHECK(mu.min_gap > 1e3);
    CHECK(cluster_count(t, kOnCylinder, 1e-6, 1e-3, 1) == 2);

    const CameraCenter reg(1, 1, 2);
    const auto off = system_at(t, reg);
    CHECK(macaulay_dual_dim(off, 0).dim == 1);
    CHECK(macaulay_dual_dim(off, 1).dim == 1);
    CHECK(*multiplicity(off).mu == 1);
    CHECK_THROWS_AS(criterion_ck(off, 2), BreadthViolation);
}

TEST_CASE("Morley generatrix points are triple") {
    for (const auto &sides : {std::array<double, 3>{7, 6, 5}, {1, 1, 1}, {5, 3, 3}, {5, 4, 3}}) {
        const Triangle t = make_triangle(sides[0], sides[1], sides[2]);
        const MorleyData m = morley_angles(t);
        REQUIRE(m.thetas.size() == 3);
        const double R = circumcircle_data(t).R;
        for (double theta : m.thetas)
            for (double h : {0.5 * R, 2 * R}) {
                const CameraCenter O = cylinder_point(t, theta, h);
                const auto sys = system_at(t, O);
                const auto mu = multiplicity(sys);
                REQUIRE(mu.mu);
                CHECK(*mu.mu == 3);
                CHECK(mu.dims[1] == 2);
                CHECK(std::abs(criterion_ck(sys, 2)) < 1e-6);
                // roots split like the cube root of the perturbation
                CHECK(cluster_count(t, O, 1e-9, 1e-2, 5) == 3);
            }
    }
}

TEST_CASE("c2 separates double from triple points on the cylinder") {
    const Triangle t = make_triangle(7, 6, 5);
    const MorleyData m = morley_angles(t);
    const double R = circumcircle_data(t).R;
    int generic = 0;
    for (int i = 0; i < 24; ++i) {
        const double theta = 2 * M_PI * (i + 0.31) / 24;
        bool near = false;
        for (double mt : m.thetas)
            near |= std::abs(std::remainder(theta - mt, 2 * M_PI)) < 0.1;
        if (near)
            continue;
        ++generic;
        const auto sys = system_at(t, cylinder_point(t, theta, R));
        CHECK(*multiplicity(sys).mu == 2);
        CHECK(std::abs(criterion_ck(sys, 2)) > 1e-6);
    }
    CHECK(generic > 15);
}

TEST_CASE("dual dimensions are monotone") {
    const Triangle t = make_triangle(7, 6, 5);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> th(0, 2 * M_PI), H(0.1, 3);
    for (int k = 0; k < 30; ++k) {
        const auto mu = multiplicity(system_at(t, cylinder_point(t, th(rng), H(rng))));
        for (std::size_t i = 1; i < mu.dims.size(); ++i)
            CHECK(mu.dims[i - 1] <= mu.dims[i]);
    }
}

TEST_CASE("synthetic systems with known local algebras") {
    const Eigen::Vector3d ex(1, 0, 0), ey(0, 1, 0), ez(0, 0, 1), o = Eigen::Vector3d::Zero();
    const Eigen::Matrix3d Z = Eigen::Matrix3d::Zero();
    // (x^2, y, z): C[x]/(x^2)
    auto s2 = synthetic({{o, sym(0, 0)}, {ey, Z}, {ez, Z}});
    CHECK(*multiplicity(s2).mu == 2);
    CHECK(std::abs(criterion_ck(s2, 2)) > 0.1);
    // (y - x^2, xy, z): C[x]/(x^3)
    auto s3 = synthetic({{ey, sym(0, 0, -1)}, {o, sym(0, 1)}, {ez, Z}});
    const auto m3 = multiplicity(s3);
    CHECK(*m3.mu == 3);
    CHECK(m3.dims == std::vector<int>{1, 2, 3, 3});
    CHECK(std::abs(criterion_ck(s3, 2)) < 1e-12);
    // (x^2, y^2, z): breadth two, dims 1, 3, 4
    auto s4 = synthetic({{o, sym(0, 0)}, {o, sym(1, 1)}, {ez, Z}});
    const auto m4 = multiplicity(s4);
    CHECK(*m4.mu == 4);
    CHECK(m4.dims[1] == 3);
    CHECK_THROWS_AS(criterion_ck(s4, 2), BreadthViolation);
    // (x^2, xy, z): the y axis is a solution curve
    auto sinf = synthetic({{o, sym(0, 0)}, {o, sym(0, 1)}, {ez, Z}});
    const auto minf = multiplicity(sinf, 6);
    CHECK_FALSE(minf.mu.has_value());
    CHECK(minf.mu_string() == "infinite_suspected");
}

TEST_CASE("complex scalar path matches the real path") {
    const Triangle t = make_triangle(7, 6, 5);
    const CameraCenter O = cylinder_point(t, 1.3, 2.0);
    const auto sr = local_system<double>(instance_from_center(t, O), distances(t, O));
    const auto sc = local_system<cd>(instance_from_center(t, O), distances(t, O).cast<cd>());
    CHECK(*multiplicity(sr).mu == *multiplicity(sc).mu);
    CHECK(std::abs(criterion_ck(sr, 2)) == doctest::Approx(std::abs(criterion_ck(sc, 2))).epsilon(1e-6));
    const auto rep = dual_space_report(instance_from_center(t, O), distances(t, O).cast<cd>());
    CHECK(rep.corank == 1);
    REQUIRE(rep.c2);
    CHECK(*rep.c2 > 1e-6);
    CHECK(rep.dims.front() == 1);
}
