#include "p3pstrat/p3p.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <numbers>

namespace p3pstrat {

namespace {

using cd = std::complex<double>;

std::optional<mpq_class> exact_sqrt(const mpq_class &q) {
    if (q < 0)
        return std::nullopt;
    mpz_class n = q.get_num(), d = q.get_den();
    if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t()))
        return std::nullopt;
    return mpq_class(sqrt(n), sqrt(d));
}

Triangle place(double s12, double s13, double s23, const std::array<mpq_class, 3> &sq) {
    if (!(s12 > 0 && s13 > 0 && s23 > 0) || !std::isfinite(s12 + s13 + s23))
        throw DegenerateTriangle("triangle sides must be positive and finite");
    const double tol = 1e-12 * (s12 + s13 + s23);
    if (s12 + s13 <= s23 + tol || s12 + s23 <= s13 + tol || s13 + s23 <= s12 + tol)
        throw DegenerateTriangle("triangle inequality violated or zero area");
    // exact degeneracy test on squared sides: 16 area^2 = 4 S12 S13 - (S12+S13-S23)^2
    const mpq_class w = sq[0] + sq[1] - sq[2];
    if (4 * sq[0] * sq[1] - w * w <= 0)
        throw DegenerateTriangle("zero or negative area");
    Triangle t;
    t.s12 = s12;
    t.s13 = s13;
    t.s23 = s23;
    t.sq = sq;
    t.x2 = s12;
    t.x3 = w.get_d() / (2 * s12);
    t.y3 = std::sqrt(std::max(0.0, sq[1].get_d() - t.x3 * t.x3));
    if (auto x2 = exact_sqrt(sq[0])) {
        mpq_class x3 = w / (2 * *x2);
        if (auto y3 = exact_sqrt(sq[1] - x3 * x3)) {
            t.exact = ExactPlacement{*x2, x3, *y3};
            t.x3 = x3.get_d();
            t.y3 = y3->get_d();
        }
    }
    return t;
}

// Polynomial helpers, coefficients lowest degree first.
using Poly = std::vector<double>;
Poly pmul(const Poly &a, const Poly &b) {
    Poly r(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] += a[i] * b[j];
    return r;
}
Poly padd(Poly a, const Poly &b, double s = 1.0) {
    if (b.size() > a.size())
        a.resize(b.size(), 0.0);
    for (std::size_t i = 0; i < b.size(); ++i)
        a[i] += s * b[i];
    return a;
}
Poly pabs(Poly a) {
    for (auto &x : a)
        x = std::abs(x);
    return a;
}

struct AnchorRoles {
    int a, b, c;          // anchor and the two ratio variables
    double Sab, Sac, Sbc; // squared sides
    double p, q, r;       // 2 cos
};

double cos_of(const P3PInstance &inst, int i, int j) {
    if (i > j)
        std::swap(i, j);
    if (i == 0 && j == 1)
        return inst.c12;
    if (i == 0 && j == 2)
        return inst.c13;
    return inst.c23;
}
double sq_of(const Triangle &t, int i, int j) {
    if (i > j)
        std::swap(i, j);
    if (i == 0 && j == 1)
        return t.sq[0].get_d();
    if (i == 0 && j == 2)
        return t.sq[1].get_d();
    return t.sq[2].get_d();
}

AnchorRoles roles(const P3PInstance &inst, int anchor) {
    static const int others[3][2] = {{1, 2}, {0, 2}, {0, 1}};
    AnchorRoles R;
    R.a = anchor;
    R.b = others[anchor][0];
    R.c = others[anchor][1];
    R.Sab = sq_of(inst.triangle, R.a, R.b);
    R.Sac = sq_of(inst.triangle, R.a, R.c);
    R.Sbc = sq_of(inst.triangle, R.b, R.c);
    R.p = 2 * cos_of(inst, R.a, R.b);
    R.q = 2 * cos_of(inst, R.a, R.c);
    R.r = 2 * cos_of(inst, R.b, R.c);
    return R;
}

// Q(u) = -K^2 - a q K L + a L^2 M with g = 1 + u^2 - p u; optionally the absolute-value majorant.
Poly quartic(const AnchorRoles &R, bool majorant) {
    const double a = R.Sab, b = R.Sac, c = R.Sbc, p = R.p, q = R.q, r = R.r;
    Poly g{1, -p, 1};
    Poly K = padd(padd(pmul({b - c}, g), {-a}), {0, 0, a});
    Poly L{q, -r};
    Poly M = padd(pmul({b}, g), {-a});
    if (majorant) {
        Poly Ka = padd(padd(pabs(pmul({b - c}, g)), {std::abs(a)}), {0, 0, std::abs(a)});
        Poly La = pabs(L), Ma = padd(pabs(pmul({b}, g)), {std::abs(a)});
        Poly Q = pmul(Ka, Ka);
        Q = padd(Q, pmul({std::abs(a * q)}, pmul(Ka, La)));
        Q = padd(Q, pmul({std::abs(a)}, pmul(pmul(La, La), Ma)));
        Q.resize(5, 0.0);
        return Q;
    }
    Poly Q = pmul({-1}, pmul(K, K));
    Q = padd(Q, pmul({-a * q}, pmul(K, L)));
    Q = padd(Q, pmul({a}, pmul(pmul(L, L), M)));
    Q.resize(5, 0.0);
    return Q;
}

// Roots of a polynomial (lowest degree first) via the companion matrix.
std::vector<cd> poly_roots(Poly c) {
    while (c.size() > 1 && c.back() == 0.0)
        c.pop_back();
    const int n = static_cast<int>(c.size()) - 1;
    std::vector<cd> out;
    if (n <= 0)
        return out;
    if (n == 1) {
        out.emplace_back(-c[0] / c[1]);
        return out;
    }
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i)
        C(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i)
        C(i, n - 1) = -c[i] / c[n];
    Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
    for (int i = 0; i < n; ++i)
        out.push_back(es.eigenvalues()(i));
    return out;
}

Eigen::Matrix3cd jac(const P3PInstance &inst, const Vec3c &e) {
    Eigen::Matrix3cd J = Eigen::Matrix3cd::Zero();
    J(0, 0) = 2.0 * e(0) - 2.0 * inst.c12 * e(1);
    J(0, 1) = 2.0 * e(1) - 2.0 * inst.c12 * e(0);
    J(1, 0) = 2.0 * e(0) - 2.0 * inst.c13 * e(2);
    J(1, 2) = 2.0 * e(2) - 2.0 * inst.c13 * e(0);
    J(2, 1) = 2.0 * e(1) - 2.0 * inst.c23 * e(2);
    J(2, 2) = 2.0 * e(2) - 2.0 * inst.c23 * e(1);
    return J;
}

struct Branch {
    Vec3c e;
    double misfit; // relative residual of the equation not used by the lift
};

// Both solutions of the remaining quadratic in v = e_c / e_a, best first.
std::array<Branch, 2> lift(const AnchorRoles &R, cd u) {
    const double a = R.Sab, b = R.Sac, c = R.Sbc;
    const cd g = 1.0 + u * u - R.p * u;
    const cd ea = std::sqrt(a / g);
    // -a v^2 + a q v + (b g - a) = 0
    const cd A = -a, B = a * R.q, C = b * g - a;
    const cd disc = std::sqrt(B * B - 4.0 * A * C);
    std::array<Branch, 2> out;
    int k = 0;
    for (const cd v : {(-B + disc) / (2.0 * A), (-B - disc) / (2.0 * A)}) {
        const double scale = std::abs(c * g) + a * (std::norm(u) + std::norm(v) + std::abs(R.r * u * v));
        Vec3c e;
        e(R.a) = ea;
        e(R.b) = u * ea;
        e(R.c) = v * ea;
        out[k++] = {e, std::abs(c * g - a * (u * u + v * v - R.r * u * v)) / scale};
    }
    if (out[1].misfit < out[0].misfit)
        std::swap(out[0], out[1]);
    // nearly equal branches are one solution, not two sharing the ratio
    const cd v0 = out[0].e(R.c) / ea, v1 = out[1].e(R.c) / ea;
    if (std::abs(v0 - v1) <= 1e-2 * std::max({std::abs(v0), std::abs(v1), 1e-300}))
        out[1].misfit = std::numeric_limits<double>::infinity();
    return out;
}

// Solutions with e_anchor = 0 (eliminant roots at infinity), best first.
std::array<Branch, 2> lift_at_infinity(const AnchorRoles &R) {
    std::array<Branch, 2> out;
    int k = 0;
    for (const double sgn : {1.0, -1.0}) {
        const double eb = std::sqrt(R.Sab), ec = sgn * std::sqrt(R.Sac);
        Vec3c e;
        e(R.a) = 0;
        e(R.b) = eb;
        e(R.c) = ec;
        const double scale = R.Sab + R.Sac + std::abs(R.r * eb * ec) + R.Sbc;
        out[k++] = {e, std::abs(R.Sab + R.Sac - R.r * eb * ec - R.Sbc) / scale};
    }
    if (out[1].misfit < out[0].misfit)
        std::swap(out[0], out[1]);
    return out;
}

double cluster_radius(const Triangle &t, const SolverOptions &opt) {
    return opt.cluster_factor * std::sqrt(t.S().sum());
}

struct AnchorChoice {
    AnchorRoles R;
    Poly Q; // trimmed: negligible leading coefficients removed
    int infinite = 0;
};

// Usable anchors, best relative leading coefficient first. Leading coefficients that
// vanish to rounding are dropped and counted as roots at infinity.
std::vector<AnchorChoice> candidate_anchors(const P3PInstance &inst, const Vec3c *avoid_zero = nullptr) {
    std::vector<std::pair<double, AnchorChoice>> found;
    for (int anchor = 0; anchor < 3; ++anchor) {
        if (avoid_zero && std::abs((*avoid_zero)(anchor)) == 0.0)
            continue;
        AnchorChoice ch{roles(inst, anchor), {}, 0};
        ch.Q = quartic(ch.R, false);
        const Poly Qa = quartic(ch.R, true);
        double mx = 0;
        for (double x : ch.Q)
            mx = std::max(mx, std::abs(x));
        const double quality = std::min(std::abs(ch.Q[4]) / mx, std::abs(ch.Q[4]) / Qa[4]);
        while (ch.Q.size() > 1 && (std::abs(ch.Q.back()) <= 1e-10 * mx ||
                                   std::abs(ch.Q.back()) <= 1e-14 * Qa[ch.Q.size() - 1])) {
            ch.Q.pop_back();
            ++ch.infinite;
        }
        if (ch.infinite <= 2) // at most two solutions have a vanishing anchor component
            found.emplace_back(quality, std::move(ch));
    }
    if (found.empty())
        throw NumericalFailure("eliminant degenerates for every anchor");
    std::stable_sort(found.begin(), found.end(), [](const auto &x, const auto &y) { return x.first > y.first; });
    std::vector<AnchorChoice> out;
    for (auto &f : found)
        out.push_back(std::move(f.second));
    return out;
}

struct Weighted {
    SolutionTriple s;
    double w;
};

// A root whose two lifts both satisfy the system is shared by two solutions
// (equal ratio e_b/e_a); each gets half of the root's weight.
constexpr double kSecondBranch = 1e-6;
// An anchor whose distinct second branches all miss by more than this is taken at once;
// otherwise the anchor with the largest margin wins.
constexpr double kUnambiguous = 1e-3;

SolutionTriple finish(const P3PInstance &inst, const Vec3c &e) {
    SolutionTriple s;
    s.e = sign_normalize(e);
    s.residual = relative_residual(inst, s.e);
    const double scale = s.e.norm();
    s.is_physical = (s.e.imag().norm() <= 1e-12 * scale) && (s.e.real().array() > 0).all();
    if (s.is_physical)
        s.e = Vec3c(s.e.real().cast<cd>());
    return s;
}

std::vector<SolutionTriple> cluster(const std::vector<Weighted> &in, double radius) {
    std::vector<SolutionTriple> out;
    std::vector<double> weight;
    for (const auto &[s, w] : in) {
        bool merged = false;
        for (std::size_t k = 0; k < out.size(); ++k) {
            if ((out[k].e - s.e).norm() < radius) {
                weight[k] += w;
                if (s.residual < out[k].residual) {
                    out[k].e = s.e;
                    out[k].residual = s.residual;
                    out[k].is_physical = s.is_physical;
                }
                merged = true;
                break;
            }
        }
        if (!merged) {
            out.push_back(s);
            weight.push_back(w);
        }
    }
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k].multiplicity_hint = std::max(1, static_cast<int>(std::lround(weight[k])));
    return out;
}

// Polished solutions for the given eliminant roots plus `infinite` roots at infinity.
// Lifts within `radius` of `exclude` are dropped before weighting.
// `ambiguity` receives the smallest second-branch misfit (small: the anchor sees shared ratios).
std::vector<Weighted> enumerate(const P3PInstance &inst, const AnchorRoles &R, const std::vector<cd> &roots,
                                int infinite, const SolverOptions &opt, const Vec3c *exclude, double radius,
                                double &ambiguity) {
    std::vector<Weighted> raw;
    ambiguity = std::numeric_limits<double>::infinity();
    auto take = [&](const std::array<Branch, 2> &br, double weight) {
        ambiguity = std::min(ambiguity, br[1].misfit);
        std::vector<SolutionTriple> lifts;
        for (int k = 0; k < 2; ++k) {
            if (k == 1 && br[1].misfit > kSecondBranch)
                break;
            const Vec3c e = polish(inst, br[k].e, opt);
            if (!e.allFinite())
                throw NumericalFailure("polish diverged");
            SolutionTriple s = finish(inst, e);
            if (k == 1 && (s.e - lifts[0].e).norm() < radius)
                break;
            lifts.push_back(s);
        }
        std::erase_if(lifts, [&](const SolutionTriple &s) { return exclude && (s.e - *exclude).norm() < radius; });
        for (const auto &s : lifts)
            raw.push_back({s, weight / static_cast<double>(lifts.size())});
    };
    for (const cd &u : roots)
        take(lift(R, u), 1.0);
    if (infinite > 0) {
        const auto br = lift_at_infinity(R);
        if (infinite == 2 && br[1].misfit <= kSecondBranch)
            take(br, 2.0);
        else
            for (int k = 0; k < infinite; ++k)
                take({br[0], {br[0].e, std::numeric_limits<double>::infinity()}}, 1.0);
    }
    return raw;
}

} // namespace

Triangle make_triangle(double s12, double s13, double s23) {
    return place(s12, s13, s23, {mpq_class(s12) * mpq_class(s12), mpq_class(s13) * mpq_class(s13),
                                 mpq_class(s23) * mpq_class(s23)});
}

Triangle make_triangle_sq(const mpq_class &S12, const mpq_class &S13, const mpq_class &S23) {
    if (S12 <= 0 || S13 <= 0 || S23 <= 0)
        throw DegenerateTriangle("squared sides must be positive");
    return place(std::sqrt(S12.get_d()), std::sqrt(S13.get_d()), std::sqrt(S23.get_d()), {S12, S13, S23});
}

Eigen::Vector3d distances(const Triangle &t, const CameraCenter &O) {
    return {(O - t.A()).norm(), (O - t.B()).norm(), (O - t.C()).norm()};
}

std::array<mpq_class, 3> squared_distances_exact(const Triangle &t, const std::array<mpq_class, 3> &O) {
    if (!t.exact)
        throw std::invalid_argument("triangle has no rational placement");
    const auto &P = *t.exact;
    const mpq_class &x = O[0], &y = O[1], &z = O[2];
    mpq_class dx2 = x - P.x2, dx3 = x - P.x3, dy3 = y - P.y3;
    return {x * x + y * y + z * z, dx2 * dx2 + y * y + z * z, dx3 * dx3 + dy3 * dy3 + z * z};
}

P3PInstance instance_from_center(const Triangle &t, const CameraCenter &O) {
    const Eigen::Vector3d e = distances(t, O);
    const double scale = std::sqrt(t.S().sum());
    if (e.minCoeff() <= 1e-14 * scale)
        throw VertexCoincidence("camera center coincides with a triangle vertex");
    const Eigen::Vector3d S = t.S();
    P3PInstance inst;
    inst.triangle = t;
    inst.c12 = (e(0) * e(0) + e(1) * e(1) - S(0)) / (2 * e(0) * e(1));
    inst.c13 = (e(0) * e(0) + e(2) * e(2) - S(1)) / (2 * e(0) * e(2));
    inst.c23 = (e(1) * e(1) + e(2) * e(2) - S(2)) / (2 * e(1) * e(2));
    return inst;
}

Vec3c residual_vector(const P3PInstance &inst, const Vec3c &e) {
    const Eigen::Vector3d S = inst.triangle.S();
    Vec3c f;
    f(0) = e(0) * e(0) + e(1) * e(1) - 2.0 * inst.c12 * e(0) * e(1) - S(0);
    f(1) = e(0) * e(0) + e(2) * e(2) - 2.0 * inst.c13 * e(0) * e(2) - S(1);
    f(2) = e(1) * e(1) + e(2) * e(2) - 2.0 * inst.c23 * e(1) * e(2) - S(2);
    return f;
}

double relative_residual(const P3PInstance &inst, const Vec3c &e) {
    return residual_vector(inst, e).cwiseAbs().maxCoeff() / inst.triangle.sq[0].get_d();
}

Eigen::Matrix<double, 5, 1> eliminant(const P3PInstance &inst, int anchor) {
    Poly Q = quartic(roles(inst, anchor), false);
    return Eigen::Map<Eigen::Matrix<double, 5, 1>>(Q.data());
}

Vec3c sign_normalize(Vec3c e) {
    const double tie = 1e-14 * std::max(1.0, e.norm());
    if (e(0).real() < -tie || (std::abs(e(0).real()) <= tie && e(1).real() < 0))
        e = -e;
    return e;
}

Vec3c polish(const P3PInstance &inst, Vec3c e, const SolverOptions &opt) {
    Vec3c f = residual_vector(inst, e);
    for (int it = 0; it < opt.polish_max_iter; ++it) {
        Eigen::JacobiSVD<Eigen::Matrix3cd> svd(jac(inst, e), Eigen::ComputeFullU | Eigen::ComputeFullV);
        svd.setThreshold(1e-13);
        const Vec3c d = svd.solve(-f);
        const Vec3c en = e + d;
        const Vec3c fn = residual_vector(inst, en);
        if (!en.allFinite())
            break;
        if (fn.norm() > f.norm() && it > 3)
            break;
        e = en;
        f = fn;
        if (d.norm() < opt.polish_step_tol * (1 + e.norm()))
            break;
    }
    return e;
}

bool detect_continuum(const P3PInstance &inst, double tol) {
    const AnchorRoles R = roles(inst, 0);
    Poly Q = quartic(R, false), Qa = quartic(R, true);
    const double scale = *std::max_element(Qa.begin(), Qa.end());
    for (double c : Q)
        if (std::abs(c) >= tol * scale)
            return false;
    return true;
}

std::vector<SolutionTriple> continuum_samples(const P3PInstance &inst, int count) {
    const Triangle &t = inst.triangle;
    const Eigen::Vector2d cen(t.x2 / 2, (t.x3 * t.x3 + t.y3 * t.y3 - t.x2 * t.x3) / (2 * t.y3));
    const double R = cen.norm();
    std::array<double, 3> ang;
    const std::array<Eigen::Vector3d, 3> V{t.A(), t.B(), t.C()};
    for (int i = 0; i < 3; ++i)
        ang[i] = std::atan2(V[i].y() - cen.y(), V[i].x() - cen.x());
    std::sort(ang.begin(), ang.end());
    const double tau = 2 * std::numbers::pi;
    auto at = [&](double phi) { return CameraCenter(cen.x() + R * std::cos(phi), cen.y() + R * std::sin(phi), 0); };
    int best = 0;
    double best_err = 1e300;
    std::array<double, 3> start, span;
    for (int k = 0; k < 3; ++k) {
        start[k] = ang[k];
        span[k] = (k < 2 ? ang[k + 1] : ang[0] + tau) - ang[k];
        const P3PInstance mid = instance_from_center(t, at(start[k] + span[k] / 2));
        const double err = std::max({std::abs(mid.c12 - inst.c12), std::abs(mid.c13 - inst.c13),
                                     std::abs(mid.c23 - inst.c23)});
        if (err < best_err) {
            best_err = err;
            best = k;
        }
    }
    std::vector<SolutionTriple> out;
    for (int i = 0; i < count; ++i) {
        const double phi = start[best] + span[best] * (i + 0.5) / count;
        SolutionTriple s = finish(inst, distances(t, at(phi)).cast<cd>());
        s.multiplicity_hint.reset();
        out.push_back(s);
    }
    return out;
}

std::vector<SolutionTriple> solve(const P3PInstance &inst, const SolverOptions &opt) {
    if (!(std::abs(inst.c12) < 1 && std::abs(inst.c13) < 1 && std::abs(inst.c23) < 1))
        throw std::invalid_argument("cosines must lie strictly inside (-1, 1)");
    if (detect_continuum(inst, opt.continuum_tol))
        throw ContinuumDetected(continuum_samples(inst));
    const double radius = cluster_radius(inst.triangle, opt);
    std::vector<Weighted> best;
    double best_ambiguity = -1;
    for (const AnchorChoice &ch : candidate_anchors(inst)) {
        double ambiguity;
        auto raw = enumerate(inst, ch.R, poly_roots(ch.Q), ch.infinite, opt, nullptr, radius, ambiguity);
        if (ambiguity > kUnambiguous)
            return cluster(raw, radius);
        if (ambiguity > best_ambiguity) {
            best_ambiguity = ambiguity;
            best = std::move(raw);
        }
    }
    return cluster(best, radius);
}

std::vector<SolutionTriple> complementary_solutions(const P3PInstance &inst, const SolutionTriple &known,
                                                    const SolverOptions &opt) {
    const int mu = known.multiplicity_hint.value_or(1);
    const double radius = cluster_radius(inst.triangle, opt);
    const Vec3c kn = sign_normalize(known.e);
    auto deflated = [&](const AnchorChoice &ch, double &ambiguity) {
        const AnchorRoles &R = ch.R;
        const Poly &Q = ch.Q;
        const cd ka = known.e(R.a);
        const cd u0 = known.e(R.b) / ka;
        // synthetic division by (u - u0)^mu, complex arithmetic
        std::vector<cd> c(Q.begin(), Q.end()); // lowest first
        for (int k = 0; k < mu && c.size() > 1; ++k) {
            const int n = static_cast<int>(c.size()) - 1;
            std::vector<cd> q(n);
            q[n - 1] = c[n];
            for (int i = n - 1; i >= 1; --i)
                q[i - 1] = c[i] + u0 * q[i];
            c = q;
        }
        // remaining degree: solve via companion on the complex coefficients
        std::vector<cd> roots;
        const int n = static_cast<int>(c.size()) - 1;
        if (n == 1)
            roots.push_back(-c[0] / c[1]);
        else if (n >= 2) {
            Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
            for (int i = 1; i < n; ++i)
                C(i, i - 1) = 1.0;
            for (int i = 0; i < n; ++i)
                C(i, n - 1) = -c[i] / c[n];
            Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
            for (int i = 0; i < n; ++i)
                roots.push_back(es.eigenvalues()(i));
        }
        return enumerate(inst, R, roots, ch.infinite, opt, &kn, radius, ambiguity);
        };
    std::vector<Weighted> best;
    double best_ambiguity = -1;
    for (const AnchorChoice &ch : candidate_anchors(inst, &known.e)) {
        double ambiguity;
        auto raw = deflated(ch, ambiguity);
        if (ambiguity > kUnambiguous)
            return cluster(raw, radius);
        if (ambiguity > best_ambiguity) {
            best_ambiguity = ambiguity;
            best = std::move(raw);
        }
    }
    return cluster(best, radius);
}

Pose recover_pose(const SolutionTriple &sol, const std::array<Eigen::Vector3d, 3> &X,
                  const std::array<Eigen::Vector3d, 3> &x) {
    if (!sol.is_physical)
        throw std::invalid_argument("recover_pose needs a physical solution");
    Eigen::Matrix3d xs;
    for (int i = 0; i < 3; ++i)
        xs.col(i) = x[i].normalized();
    if (std::abs(xs.determinant()) < 1e-10)
        throw CoplanarDegeneracy("camera center coplanar with the three points");
    const Eigen::Vector3d d1 = X[0] - X[1], d2 = X[2] - X[0];
    Eigen::Matrix3d N;
    N << d1, d2, d1.cross(d2);
    const double scale = std::max({d1.norm(), d2.norm(), 1e-300});
    if (std::abs(N.determinant()) < 1e-12 * std::pow(scale, 4))
        throw CoplanarDegeneracy("the three world points are collinear");
    Eigen::Vector3d P[3];
    for (int i = 0; i < 3; ++i)
        P[i] = sol.e(i).real() * xs.col(i);
    const Eigen::Vector3d m1 = P[0] - P[1], m2 = P[2] - P[0];
    Eigen::Matrix3d M;
    M << m1, m2, m1.cross(m2);
    Eigen::Matrix3d R = M * N.inverse();
    // project onto SO(3) to remove rounding
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(R, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d D = Eigen::Matrix3d::Identity();
    D(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0 ? -1 : 1;
    R = svd.matrixU() * D * svd.matrixV().transpose();
    Pose pose;
    pose.R = R;
    pose.t = ((P[0] - R * X[0]) + (P[1] - R * X[1]) + (P[2] - R * X[2])) / 3.0;
    return pose;
}

std::array<CameraCenter, 2> locate_center(const Triangle &t, const SolutionTriple &sol) {
    if (!sol.is_physical)
        throw std::invalid_argument("locate_center needs a physical distance triple");
    const Eigen::Vector3d e = sol.e.real();
    const double E1 = e(0) * e(0), E2 = e(1) * e(1), E3 = e(2) * e(2);
    const double x = (E1 - E2 + t.x2 * t.x2) / (2 * t.x2);
    const double y = (E1 - E3 + t.x3 * t.x3 + t.y3 * t.y3 - 2 * t.x3 * x) / (2 * t.y3);
    double z2 = E1 - x * x - y * y;
    if (z2 < -1e-9 * t.S().sum())
        throw InconsistentDistances("distances do not meet in a real point");
    const double z = std::sqrt(std::max(0.0, z2));
    return {CameraCenter(x, y, z), CameraCenter(x, y, -z)};
}

} // namespace p3pstrat
