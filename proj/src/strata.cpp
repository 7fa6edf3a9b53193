#include "p3pstrat/strata.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace p3pstrat {

namespace {

const std::vector<std::string> kSqVars{"E1", "E2", "E3"};
const std::vector<std::string> kVars{"e1", "e2", "e3"};

struct SqRing {
    SparsePoly E1, E2, E3;
    mpq_class S12, S13, S23;
    explicit SqRing(const Triangle &t)
        : E1(SparsePoly::variable(kSqVars, 0)), E2(SparsePoly::variable(kSqVars, 1)),
          E3(SparsePoly::variable(kSqVars, 2)), S12(t.sq[0]), S13(t.sq[1]), S23(t.sq[2]) {}
    SparsePoly c(const mpq_class &v) const { return SparsePoly::constant(kSqVars, v); }
};

SparsePoly double_exponents(const SparsePoly &p) {
    SparsePoly r(kVars);
    for (const auto &[m, c] : p.terms()) {
        Monomial d = m;
        for (auto &x : d)
            x *= 2;
        r.add_term(d, c);
    }
    return r;
}

// Triangle with squared sides divided by D^2 (circumdiameter).
Triangle scaled_triangle(const Triangle &t, double D) {
    const mpq_class d2(D * D);
    return make_triangle_sq(t.sq[0] / d2, t.sq[1] / d2, t.sq[2] / d2);
}

double normalized_abs(const SparsePoly &p, const Eigen::Vector3cd &e) {
    std::vector<std::complex<double>> pt{e(0), e(1), e(2)};
    return std::abs(eval_complex(p, pt)) / p.max_abs_coefficient().get_d();
}

template <typename T> std::vector<std::vector<T>> cm_matrix(const T &E1, const T &E2, const T &E3, const T &S12,
                                                            const T &S13, const T &S23) {
    return {{0, 1, 1, 1, 1}, {1, 0, E1, E2, E3}, {1, E1, 0, S12, S13}, {1, E2, S12, 0, S23}, {1, E3, S13, S23, 0}};
}

} // namespace

SparsePoly cylinder_poly_sq(const Triangle &t) {
    SqRing r(t);
    const auto &[E1, E2, E3] = std::tie(r.E1, r.E2, r.E3);
    return (E1 * E1).scaled(r.S23) + (E1 * E2).scaled(r.S12 - r.S13 - r.S23) +
           (E1 * E3).scaled(r.S13 - r.S12 - r.S23) + (E2 * E2).scaled(r.S13) +
           (E2 * E3).scaled(r.S23 - r.S12 - r.S13) + (E3 * E3).scaled(r.S12) - r.c(r.S12 * r.S13 * r.S23);
}

std::array<SparsePoly, 3> generatrix_polys_sq(const Triangle &t) {
    SqRing r(t);
    const auto &[E1, E2, E3] = std::tie(r.E1, r.E2, r.E3);
    const mpq_class &a = r.S12, &b = r.S13, &c = r.S23;
    SparsePoly g1 = (E1 * E1).scaled(b - a) + (E1 * E2).scaled(-2 * b) + (E1 * E3).scaled(2 * a) +
                    (E2 * E2).scaled(b) + E2.scaled(-a * b) + (E3 * E3).scaled(-a) + E3.scaled(a * b);
    SparsePoly g2 = (E1 * E1).scaled(c) + (E1 * E2).scaled(-2 * c) + E1.scaled(-a * c) + (E2 * E2).scaled(c - a) +
                    (E2 * E3).scaled(2 * a) + (E3 * E3).scaled(-a) + E3.scaled(a * c);
    SparsePoly g3 = (E1 * E1).scaled(c) + (E1 * E3).scaled(-2 * c) + E1.scaled(-b * c) + (E2 * E2).scaled(-b) +
                    (E2 * E3).scaled(2 * b) + E2.scaled(b * c) + (E3 * E3).scaled(c - b);
    return {g1, g2, g3};
}

SparsePoly volume_poly_sq(const Triangle &t) {
    SqRing r(t);
    const auto &[E1, E2, E3] = std::tie(r.E1, r.E2, r.E3);
    const mpq_class &a = r.S12, &b = r.S13, &c = r.S23;
    return (E1 * E1).scaled(-c) + (E1 * E2).scaled(-a + b + c) + (E1 * E3).scaled(a - b + c) +
           E1.scaled(a * c + b * c - c * c) + (E2 * E2).scaled(-b) + (E2 * E3).scaled(a + b - c) +
           E2.scaled(a * b - b * b + b * c) + (E3 * E3).scaled(-a) + E3.scaled(-a * a + a * b + a * c) -
           r.c(a * b * c);
}

SparsePoly cylinder_poly(const Triangle &t) { return double_exponents(cylinder_poly_sq(t)); }

std::vector<SparsePoly> i1_generators(const Triangle &t) {
    std::vector<SparsePoly> out{cylinder_poly(t)};
    for (const auto &g : generatrix_polys_sq(t))
        out.push_back(double_exponents(g));
    return out;
}

double danger_cylinder_value_e(const Triangle &t, const Eigen::Vector3d &e) { return criterion_c1(t, e); }

mpq_class danger_cylinder_value_e_exact_sq(const Triangle &t, const std::array<mpq_class, 3> &E) {
    return criterion_c1_exact_sq(t, E);
}

double normalized_cylinder_value(const Triangle &t, const Eigen::Vector3cd &e) {
    const double D = circumcircle_data(t).diameter();
    return normalized_abs(cylinder_poly(scaled_triangle(t, D)), e / D);
}

std::vector<double> normalized_generator_values(const Triangle &t, const Eigen::Vector3cd &e) {
    const double D = circumcircle_data(t).diameter();
    std::vector<double> out;
    for (const auto &g : i1_generators(scaled_triangle(t, D)))
        out.push_back(normalized_abs(g, e / D));
    return out;
}

double danger_cylinder_value_xyz(const Triangle &t, const CameraCenter &O) {
    const double k = (t.x2 * t.x3 - t.x3 * t.x3 - t.y3 * t.y3) / t.y3;
    return O.x() * O.x() + O.y() * O.y() - t.x2 * O.x() + k * O.y();
}

Eigen::Vector3d danger_cylinder_gradient_xyz(const Triangle &t, const CameraCenter &O) {
    const double k = (t.x2 * t.x3 - t.x3 * t.x3 - t.y3 * t.y3) / t.y3;
    return {2 * O.x() - t.x2, 2 * O.y() + k, 0.0};
}

Circumcircle circumcircle_data(const Triangle &t) {
    Circumcircle c;
    c.center = {t.x2 / 2, (t.x3 * t.x3 + t.y3 * t.y3 - t.x2 * t.x3) / (2 * t.y3)};
    c.R = c.center.norm();
    return c;
}

CameraCenter cylinder_point(const Triangle &t, double theta, double h, double radius_fraction) {
    const Circumcircle c = circumcircle_data(t);
    const double r = radius_fraction * c.R;
    return {c.center.x() + r * std::cos(theta), c.center.y() + r * std::sin(theta), h};
}

double cayley_menger_volume_sq(const Triangle &t, const Eigen::Vector3d &e) {
    const Eigen::Vector3d S = t.S();
    const auto m = cm_matrix<double>(e(0) * e(0), e(1) * e(1), e(2) * e(2), S(0), S(1), S(2));
    Eigen::Matrix<double, 5, 5> M;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            M(i, j) = m[i][j];
    return M.determinant() / 288.0;
}

mpq_class cayley_menger_volume_sq_exact(const Triangle &t, const std::array<mpq_class, 3> &E) {
    auto m = cm_matrix<mpq_class>(E[0], E[1], E[2], t.sq[0], t.sq[1], t.sq[2]);
    // exact elimination: pivot on any nonzero entry
    const int n = 5;
    mpq_class det = 1;
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int r = c; r < n; ++r)
            if (m[r][c] != 0) {
                piv = r;
                break;
            }
        if (piv < 0)
            return 0;
        if (piv != c) {
            std::swap(m[piv], m[c]);
            det = -det;
        }
        det *= m[c][c];
        for (int r = c + 1; r < n; ++r) {
            const mpq_class f = m[r][c] / m[c][c];
            for (int k = c; k < n; ++k)
                m[r][k] -= f * m[c][k];
        }
    }
    return det / 288;
}

MorleyData morley_triangle(const Triangle &t) {
    const Eigen::Vector2d P[3] = {{0, 0}, {t.x2, 0}, {t.x3, t.y3}};
    auto angle_at = [&](int i) {
        const Eigen::Vector2d a = P[(i + 1) % 3] - P[i], b = P[(i + 2) % 3] - P[i];
        return std::atan2(std::abs(a.x() * b.y() - a.y() * b.x()), a.dot(b));
    };
    // trisector from vertex i adjacent to the side towards vertex j
    auto trisector = [&](int i, int j) {
        const int k = 3 - i - j;
        const Eigen::Vector2d a = (P[j] - P[i]).normalized(), b = P[k] - P[i];
        const double sgn = (a.x() * b.y() - a.y() * b.x()) > 0 ? 1.0 : -1.0;
        const double phi = sgn * angle_at(i) / 3.0;
        return Eigen::Vector2d(std::cos(phi) * a.x() - std::sin(phi) * a.y(),
                               std::sin(phi) * a.x() + std::cos(phi) * a.y());
    };
    auto meet = [&](int i, int j) {
        const Eigen::Vector2d di = trisector(i, j), dj = trisector(j, i);
        Eigen::Matrix2d M;
        M << di, -dj;
        const Eigen::Vector2d s = M.partialPivLu().solve(P[j] - P[i]);
        return Eigen::Vector2d(P[i] + s(0) * di);
    };
    MorleyData m;
    m.F = meet(0, 1);
    m.D = meet(1, 2);
    m.E = meet(2, 0);
    m.side = (m.D - m.E).norm();
    return m;
}

double morley_cubic(const Triangle &t, double s) {
    const Eigen::Vector3d S = t.S();
    const double s13 = t.s13, s23 = t.s23;
    const double lead = 8 * s13 * s23 * S(0);
    const double K = S(0) * S(1) + S(0) * S(2) - S(1) * S(1) + 2 * S(1) * S(2) - S(2) * S(2);
    return (lead * s * s * s - 6 * s13 * s23 * S(0) * s + K) / lead;
}

MorleyData morley_angles(const Triangle &t, const Tolerances &tol) {
    MorleyData m = morley_triangle(t);
    const Eigen::Vector3d S = t.S();
    const double K = S(0) * S(1) + S(0) * S(2) - S(1) * S(1) + 2 * S(1) * S(2) - S(2) * S(2);
    double s3 = K / (2 * S(0) * t.s13 * t.s23);
    if (std::abs(s3) > 1 + 1e-9)
        throw CubicRootFailure("sin(3 theta) outside [-1, 1]: " + std::to_string(s3));
    s3 = std::clamp(s3, -1.0, 1.0);
    m.sin3theta = s3;
    const double phi = std::asin(s3) / 3.0, tau = 2 * std::numbers::pi;
    std::vector<double> cand;
    for (int k = 0; k < 3; ++k) {
        cand.push_back(std::fmod(phi + tau * k / 3 + tau, tau));
        cand.push_back(std::fmod(std::numbers::pi / 3 - phi + tau * k / 3 + tau, tau));
    }
    const Circumcircle cc = circumcircle_data(t);
    for (double th : cand) {
        bool dup = false;
        for (double o : m.thetas)
            dup |= std::abs(std::remainder(th - o, tau)) < 1e-9;
        if (dup)
            continue;
        const CameraCenter O = cylinder_point(t, th, cc.R);
        const P3PInstance inst = instance_from_center(t, O);
        const auto sys = local_system<double>(inst, distances(t, O));
        const auto mu = multiplicity(sys, tol.max_order, tol.tau_rank);
        if (mu.mu && *mu.mu == 3) {
            m.thetas.push_back(th);
            m.generatrix_bases.push_back(cc.center + cc.R * Eigen::Vector2d(std::cos(th), std::sin(th)));
            m.f1_residuals.push_back(std::abs(morley_cubic(t, std::sin(th))));
        }
    }
    if (m.thetas.size() != 3)
        throw CubicRootFailure("expected three multiplicity-3 generatrices, found " +
                               std::to_string(m.thetas.size()));
    std::vector<std::size_t> ord{0, 1, 2};
    std::sort(ord.begin(), ord.end(), [&](auto a, auto b) { return m.thetas[a] < m.thetas[b]; });
    MorleyData sorted = m;
    for (int i = 0; i < 3; ++i) {
        sorted.thetas[i] = m.thetas[ord[i]];
        sorted.generatrix_bases[i] = m.generatrix_bases[ord[i]];
        sorted.f1_residuals[i] = m.f1_residuals[ord[i]];
    }
    return sorted;
}

std::string to_string(StratumLabel l) {
    switch (l) {
    case StratumLabel::Regular:
        return "Regular";
    case StratumLabel::DangerCylinder:
        return "DangerCylinder";
    case StratumLabel::MorleyGeneratrix:
        return "MorleyGeneratrix";
    case StratumLabel::Circumcircle:
        return "Circumcircle";
    case StratumLabel::Degenerate:
        return "Degenerate";
    }
    return "?";
}

Classification classify(const Triangle &t, const CameraCenter &O, const Tolerances &tol) {
    Classification res;
    const Circumcircle cc = circumcircle_data(t);
    const double D = cc.diameter();
    const Eigen::Vector3d e = distances(t, O);
    if (e.minCoeff() < 1e-12 * D) {
        res.label = StratumLabel::Degenerate;
        res.reason = "vertex coincidence";
        return res;
    }
    const P3PInstance inst = instance_from_center(t, O);
    if (std::max({std::abs(inst.c12), std::abs(inst.c13), std::abs(inst.c23)}) >= 1 - 1e-12) {
        res.label = StratumLabel::Degenerate;
        res.reason = "center collinear with a triangle edge";
        return res;
    }
    // cylinder membership: exact when the placement and the center are rational
    res.cylinder_value = normalized_cylinder_value(t, e.cast<std::complex<double>>());
    if (t.exact) {
        const auto E = squared_distances_exact(t, {mpq_class(O.x()), mpq_class(O.y()), mpq_class(O.z())});
        if (danger_cylinder_value_e_exact_sq(t, E) == 0) {
            res.on_cylinder = true;
            res.exact_membership = true;
            res.cylinder_value = 0;
        }
    }
    if (!res.on_cylinder)
        res.on_cylinder = res.cylinder_value < tol.membership;

    const Eigen::Vector2d P(O.x(), O.y());
    const Eigen::Vector2d antipodeA = 2 * cc.center;
    for (const Eigen::Vector2d &q : {Eigen::Vector2d(t.x2, 0), Eigen::Vector2d(t.x3, t.y3), antipodeA})
        if ((P - q).norm() < 1e-6 * D)
            res.i3_degenerate = res.on_cylinder;

    if (res.on_cylinder && std::abs(O.z()) < tol.plane * D) {
        res.continuum = detect_continuum(inst, tol.continuum);
        if (res.continuum) {
            res.label = StratumLabel::Circumcircle;
            res.reason = "solution continuum on the circumcircle";
            return res;
        }
        res.notes.push_back("on circumcircle but eliminant not identically zero");
    }

    res.report = dual_space_report(inst, e.cast<std::complex<double>>(), tol.max_order, tol.tau_rank);
    res.generator_values = normalized_generator_values(t, e.cast<std::complex<double>>());
    res.generators_vanish = std::all_of(res.generator_values.begin(), res.generator_values.end(),
                                        [&](double v) { return v < tol.generator; });
    if (!res.on_cylinder) {
        res.label = StratumLabel::Regular;
        res.reason = "off the danger cylinder";
        if (!res.report.mu || *res.report.mu != 1)
            res.notes.push_back("multiplicity differs from 1 off the cylinder");
        return res;
    }
    if (!res.report.mu) {
        res.label = StratumLabel::DangerCylinder;
        res.reason = "dual-space dimensions still growing at the maximal order";
        res.notes.push_back("infinite multiplicity suspected");
    } else if (*res.report.mu >= 3) {
        res.label = StratumLabel::MorleyGeneratrix;
        res.reason = "multiplicity " + std::to_string(*res.report.mu);
        if (!res.generators_vanish)
            res.notes.push_back("generatrix generators do not vanish at a multiplicity-3 point");
    } else if (*res.report.mu == 2) {
        res.label = StratumLabel::DangerCylinder;
        res.reason = "multiplicity 2";
    } else {
        res.label = StratumLabel::Regular;
        res.reason = "on the cylinder within tolerance but multiplicity 1";
        res.notes.push_back("cylinder test and multiplicity disagree");
    }
    if (res.i3_degenerate)
        res.notes.push_back("projection coincides with B, C or the antipode of A");
    return res;
}

} // namespace p3pstrat
