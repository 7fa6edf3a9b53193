#include "p3pstrat/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

namespace p3pstrat {

namespace {

using cd = std::complex<double>;
constexpr double kTau = 2 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

class Timer {
  public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::optional<int> source_mu(const Triangle &t, const CameraCenter &O, const Tolerances &tol) {
    const P3PInstance inst = instance_from_center(t, O);
    return multiplicity(local_system<double>(inst, distances(t, O)), tol.max_order, tol.tau_rank).mu;
}

std::string mu_text(const std::optional<int> &mu) { return mu ? std::to_string(*mu) : "unstable"; }

double angle_gap(double a, double b) {
    const double d = std::fmod(std::abs(a - b), kTau);
    return std::min(d, kTau - d);
}

// Angles on the circumcircle at least `margin` (radians) away from the three vertices.
std::vector<double> circle_angles_away_from_vertices(const Triangle &t, int n, double margin) {
    const Circumcircle cc = circumcircle_data(t);
    std::vector<double> va;
    for (const Eigen::Vector3d &V : {t.A(), t.B(), t.C()})
        va.push_back(std::atan2(V.y() - cc.center.y(), V.x() - cc.center.x()));
    std::vector<double> out;
    for (int k = 0; out.size() < static_cast<std::size_t>(n) && k < 8 * n; ++k) {
        const double th = kTau * (k + 0.5) / (2 * n);
        bool ok = true;
        for (double a : va)
            ok = ok && angle_gap(th, a) > margin;
        if (ok)
            out.push_back(th);
    }
    return out;
}

Eigen::Matrix3d random_rotation(std::mt19937_64 &rng) {
    std::normal_distribution<double> n;
    Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
    return q.normalized().toRotationMatrix();
}

// Triangle with all angles above `min_angle`, sides from the law of sines.
Triangle random_triangle(std::mt19937_64 &rng, double min_angle) {
    std::uniform_real_distribution<double> U(min_angle, std::numbers::pi - 2 * min_angle);
    for (;;) {
        const double a = U(rng), b = U(rng), c = std::numbers::pi - a - b;
        if (c < min_angle)
            continue;
        // s23 opposite vertex 1, s13 opposite vertex 2, s12 opposite vertex 3
        return make_triangle(std::sin(c), std::sin(b), std::sin(a));
    }
}

struct Acc {
    Check c;
    bool ok = true;
    int shown = 0;
    void fail(const std::string &msg) {
        ok = false;
        if (shown++ < 12)
            c.details.push_back("FAIL " + msg);
    }
    void note(const std::string &msg) { c.details.push_back(msg); }
};

// ---------------------------------------------------------------------------

Check criterion1(AcceptanceContext &ctx) {
    const Tolerances &tol = ctx.options().tol;
    Acc a;
    Timer tm;
    const Triangle t = make_triangle(5, 4, 3);
    const CameraCenter O(4, 2, 1);
    const auto E = squared_distances_exact(t, {mpq_class(4), mpq_class(2), mpq_class(1)});
    const mpq_class v = danger_cylinder_value_e_exact_sq(t, E);
    a.note("squared distances " + E[0].get_str() + ", " + E[1].get_str() + ", " + E[2].get_str() +
           "; exact cylinder value " + v.get_str());
    if (v != 0)
        a.fail("exact cylinder value is not zero");

    const Classification cls = classify(t, O, tol);
    a.note("label " + to_string(cls.label));
    if (cls.label != StratumLabel::DangerCylinder)
        a.fail("label " + to_string(cls.label));

    const P3PInstance inst = instance_from_center(t, O);
    const Eigen::Vector3d xi = distances(t, O);
    const auto mr = multiplicity(local_system<double>(inst, xi), tol.max_order, tol.tau_rank);
    std::string dims;
    for (int d : mr.dims)
        dims += std::to_string(d) + " ";
    a.note("dual dims " + dims + "mu " + mr.mu_string());
    if (mr.dims.size() < 3 || mr.dims[0] != 1 || mr.dims[1] != 2 || mr.dims[2] != 2 || mr.mu != 2)
        a.fail("expected dual dims (1,2,2) and mu 2");

    std::mt19937_64 rng(ctx.options().seed);
    std::uniform_real_distribution<double> U(-1e-6, 1e-6);
    int good = 0;
    for (int trial = 0; trial < 20; ++trial) {
        P3PInstance p = inst;
        p.c12 += U(rng);
        p.c13 += U(rng);
        p.c23 += U(rng);
        int near = 0;
        for (const auto &s : solve(p))
            if ((s.e - xi.cast<cd>()).norm() < 1e-2 * xi.norm())
                near += s.multiplicity_hint.value_or(1);
        if (near == 2)
            ++good;
        else
            a.fail("perturbation trial " + std::to_string(trial) + ": " + std::to_string(near) + " roots near the seed");
    }
    a.note("perturbation trials with a 2-cluster: " + std::to_string(good) + "/20");
    const double rt = tm.seconds();
    if (rt >= 1.0)
        a.fail("runtime " + fmt(rt) + " s exceeds 1 s");
    a.c.value = 20 - good;
    a.c.tolerance = 0;
    a.c.comparison = "==";
    a.c.passed = a.ok;
    return a.c;
}

Check criterion2(AcceptanceContext &ctx) {
    const Tolerances &tol = ctx.options().tol;
    Acc a;
    Timer tm;
    int wrong = 0, total = 0;
    std::mt19937_64 rng(ctx.options().seed + 2);
    std::uniform_real_distribution<double> U01(0.0, 1.0);
    for (const FixtureTriangle *f : ctx.fixtures()) {
        const Triangle &t = f->triangle;
        const Circumcircle cc = circumcircle_data(t);
        const double R = cc.R;
        int on_ok = 0, off_ok = 0;
        for (int i = 0; i < 200; ++i) {
            const double th = kTau * U01(rng), h = 4 * R * (1 - U01(rng));
            const CameraCenter O = cylinder_point(t, th, h);
            ++total;
            const auto mu = source_mu(t, O, tol);
            if (mu && *mu >= 2)
                ++on_ok;
            else {
                ++wrong;
                a.fail(f->name + " cylinder theta=" + fmt(th) + " h/R=" + fmt(h / R) + " mu=" + mu_text(mu));
            }
        }
        for (int i = 0; i < 200;) {
            const double x = cc.center.x() + 2 * R * (2 * U01(rng) - 1);
            const double y = cc.center.y() + 2 * R * (2 * U01(rng) - 1);
            const double h = 4 * R * (1 - U01(rng));
            const double circ = (Eigen::Vector2d(x, y) - cc.center).squaredNorm() - R * R;
            if (std::abs(circ) <= 0.05 * R * R)
                continue;
            ++i;
            ++total;
            const auto mu = source_mu(t, CameraCenter(x, y, h), tol);
            if (mu == 1)
                ++off_ok;
            else {
                ++wrong;
                a.fail(f->name + " off-cylinder (" + fmt(x) + "," + fmt(y) + "," + fmt(h) + ") mu=" + mu_text(mu));
            }
        }
        a.note(f->name + ": cylinder mu>=2 " + std::to_string(on_ok) + "/200, off-cylinder mu=1 " +
               std::to_string(off_ok) + "/200");
    }
    const double rt = tm.seconds();
    a.note(std::to_string(total) + " points classified");
    if (rt >= 60)
        a.fail("runtime " + fmt(rt) + " s exceeds 60 s");
    a.c.value = wrong;
    a.c.tolerance = 0;
    a.c.comparison = "==";
    a.c.passed = a.ok;
    return a.c;
}

Check criterion3(AcceptanceContext &ctx) {
    const Tolerances &tol = ctx.options().tol;
    Acc a;
    double worst_c2_morley = 0, min_c2_generic = kInf, worst_gen = 0;
    for (const FixtureTriangle *f : ctx.fixtures()) {
        const Triangle &t = f->triangle;
        const double R = circumcircle_data(t).R;
        MorleyData md;
        try {
            md = morley_angles(t, tol);
        } catch (const std::exception &ex) {
            a.fail(f->name + ": " + ex.what());
            continue;
        }
        if (md.thetas.size() != 3) {
            a.fail(f->name + ": " + std::to_string(md.thetas.size()) + " Morley generatrices");
            continue;
        }
        for (double th : md.thetas) {
            const CameraCenter O = cylinder_point(t, th, R);
            const Eigen::Vector3cd e = distances(t, O).cast<cd>();
            const DualSpaceReport rep = dual_space_report(instance_from_center(t, O), e, tol.max_order, tol.tau_rank);
            const auto g = normalized_generator_values(t, e);
            const double gmax = *std::max_element(g.begin(), g.end());
            const double c2 = rep.c2.value_or(kInf);
            worst_gen = std::max(worst_gen, gmax);
            worst_c2_morley = std::max(worst_c2_morley, c2);
            if (rep.mu != 3)
                a.fail(f->name + " theta=" + fmt(th) + ": mu " + mu_text(rep.mu));
            if (!(gmax < tol.generator))
                a.fail(f->name + " theta=" + fmt(th) + ": generator value " + fmt(gmax));
            if (!(c2 < tol.c2_noise_floor))
                a.fail(f->name + " theta=" + fmt(th) + ": |c2| " + fmt(c2));
        }
        for (int k = 0; k < 12; ++k) {
            const double th = kTau * (k + 0.5) / 12;
            bool far = true;
            for (double m : md.thetas)
                far = far && angle_gap(th, m) > 0.1;
            if (!far)
                continue;
            const CameraCenter O = cylinder_point(t, th, R);
            const DualSpaceReport rep =
                dual_space_report(instance_from_center(t, O), distances(t, O).cast<cd>(), tol.max_order, tol.tau_rank);
            const double c2 = rep.c2.value_or(0);
            min_c2_generic = std::min(min_c2_generic, c2);
            if (rep.mu != 2 || !(c2 > tol.c2_noise_floor))
                a.fail(f->name + " generic theta=" + fmt(th) + ": mu " + mu_text(rep.mu) + ", |c2| " + fmt(c2));
        }
    }
    a.note("max |c2| on Morley generatrices " + fmt(worst_c2_morley) + ", min |c2| at generic cylinder points " +
           fmt(min_c2_generic) + ", noise floor " + fmt(tol.c2_noise_floor));
    a.note("max normalized generator value " + fmt(worst_gen) + " (< " + fmt(tol.generator) + ")");

    std::mt19937_64 rng(ctx.options().seed + 3);
    double worst_eq = 0;
    for (int i = 0; i < 1000; ++i) {
        const Triangle t = random_triangle(rng, 0.05);
        const MorleyData m = morley_triangle(t);
        const double s1 = (m.D - m.E).norm(), s2 = (m.E - m.F).norm(), s3 = (m.F - m.D).norm();
        const double hi = std::max({s1, s2, s3}), lo = std::min({s1, s2, s3});
        worst_eq = std::max(worst_eq, (hi - lo) / hi);
    }
    a.note("Morley triangle relative side spread over 1000 random triangles: " + fmt(worst_eq));
    if (!(worst_eq < 1e-12))
        a.fail("Morley triangle not equilateral to 1e-12: " + fmt(worst_eq));
    a.c.value = worst_c2_morley;
    a.c.tolerance = tol.c2_noise_floor;
    a.c.comparison = "<";
    a.c.passed = a.ok;
    return a.c;
}

Check criterion4(AcceptanceContext &ctx) {
    const Tolerances &tol = ctx.options().tol;
    Acc a;
    int max_mu = 0, sources = 0, circ = 0;
    for (const FixtureTriangle *f : ctx.fixtures()) {
        const Triangle &t = f->triangle;
        const double R = circumcircle_data(t).R;
        std::vector<double> thetas;
        for (int i = 0; i < 64; ++i)
            thetas.push_back(kTau * (i + 0.37) / 64);
        try {
            for (double th : morley_angles(t, tol).thetas)
                thetas.push_back(th);
        } catch (const std::exception &ex) {
            a.fail(f->name + ": " + ex.what());
        }
        std::vector<double> hs;
        for (int j = 0; j < 8; ++j)
            hs.push_back(R * (0.1 + 2.9 * j / 7));
        for (double x : {0.5, 1.0, 2.0})
            hs.push_back(x * R);
        for (double th : thetas)
            for (double h : hs) {
                ++sources;
                const auto mu = source_mu(t, cylinder_point(t, th, h), tol);
                if (!mu || *mu >= 4)
                    a.fail(f->name + " theta=" + fmt(th) + " h/R=" + fmt(h / R) + ": mu " + mu_text(mu));
                else
                    max_mu = std::max(max_mu, *mu);
            }
        for (double th : circle_angles_away_from_vertices(t, 8, 0.05)) {
            ++circ;
            const P3PInstance inst = instance_from_center(t, cylinder_point(t, th, 0));
            if (!detect_continuum(inst, tol.continuum))
                a.fail(f->name + " circumcircle theta=" + fmt(th) + ": no continuum detected");
        }
    }
    a.note("largest multiplicity over " + std::to_string(sources) + " cylinder sources: " + std::to_string(max_mu));
    a.note(std::to_string(circ) + " circumcircle points checked for a continuum");
    a.c.value = max_mu;
    a.c.tolerance = 4;
    a.c.comparison = "<";
    a.c.passed = a.ok;
    return a.c;
}

Check criterion5(AcceptanceContext &ctx) {
    constexpr double member_tol = 1e-6, control_tol = 1e-3;
    Acc a;
    double worst_member = 0, min_control = kInf;
    int records = 0, controls_below = 0;
    std::mt19937_64 rng(ctx.options().seed + 5);
    std::uniform_real_distribution<double> U01(0.0, 1.0);
    for (const FixtureTriangle *f : ctx.fixtures()) {
        const Triangle &t = f->triangle;
        const SweepResult &sw = ctx.e_sweep(*f);
        for (const auto &msg : sw.failures)
            a.fail(f->name + " sweep: " + msg);
        std::string why;
        const FittedSurface *model = ctx.e_model(*f, &why);
        if (!model)
            a.note(f->name + ": no fitted component (" + why + ")");
        std::map<std::string, int> hist;
        int transcribed = 0;
        for (const auto &r : sw.records) {
            ++records;
            const MembershipResult m = component_membership(t, f->components, model, r.complement_e.e);
            ++hist[m.name];
            transcribed += component_membership(t, f->components, nullptr, r.complement_e.e).value < member_tol;
            worst_member = std::max(worst_member, m.value);
            if (!(m.value < member_tol))
                a.fail(f->name + " complement theta=" + fmt(r.theta) + " h=" + fmt(r.h) + ": " + fmt(m.value));
        }
        std::string h = f->name + " nearest:";
        for (const auto &[name, n] : hist)
            h += " " + name + "=" + std::to_string(n);
        h += "; on a transcribed component " + std::to_string(transcribed) + "/" + std::to_string(sw.records.size());
        a.note(h);
        const double D = circumcircle_data(t).diameter();
        for (int i = 0; i < 100; ++i) {
            const Eigen::Vector3cd e(3 * D * U01(rng), 3 * D * U01(rng), 3 * D * U01(rng));
            const MembershipResult m = component_membership(t, f->components, model, e);
            const double v = m.value;
            min_control = std::min(min_control, v);
            if (!(v > control_tol)) {
                ++controls_below;
                a.fail(f->name + " control (" + fmt(e(0).real()) + "," + fmt(e(1).real()) + "," +
                       fmt(e(2).real()) + ") near " + m.name + ": " + fmt(v));
            }
        }
    }
    a.note(std::to_string(records) + " complements, worst membership " + fmt(worst_member) + " (< " +
           fmt(member_tol) + ")");
    a.note("negative controls: smallest " + fmt(min_control) + " (> " + fmt(control_tol) + "), " +
           std::to_string(controls_below) + " below");
    a.c.value = worst_member;
    a.c.tolerance = member_tol;
    a.c.comparison = "<";
    a.c.passed = a.ok;
    return a.c;
}

Check criterion6(AcceptanceContext &ctx) {
    constexpr double rel_tol = 1e-5;
    Acc a;
    double worst = 0;
    for (const FixtureTriangle *f : ctx.fixtures({"general_acute", "equilateral", "general_right"})) {
        Timer tm;
        std::string why;
        const FittedSurface *model = ctx.e_model(*f, &why);
        const double rt = tm.seconds();
        if (!model) {
            a.fail(f->name + ": fit failed (" + why + ")");
            worst = kInf;
            continue;
        }
        std::string line = f->name + " (rms " + fmt(model->model.rms_residual) + ", gap " +
                           fmt(model->model.gap()) + "):";
        for (std::size_t k = 1; k < f->leading_monomials.size(); ++k) {
            const double paper = static_cast<double>(f->leading_coefficients[k]) / f->leading_coefficients[0];
            const double fit = coefficient_ratio(model->model, f->leading_monomials[k], f->leading_monomials[0]);
            const double rel = std::abs(fit - paper) / std::abs(paper);
            worst = std::max(worst, std::isnan(rel) ? kInf : rel);
            line += " " + fmt(fit) + " vs " + fmt(paper) + " [" + fmt(rel) + "]";
            if (!(rel < rel_tol))
                a.fail(f->name + " ratio " + std::to_string(k) + ": " + fmt(fit) + " vs " + fmt(paper));
        }
        a.note(line);
        if (rt >= 120)
            a.fail(f->name + ": runtime " + fmt(rt) + " s exceeds 120 s");
    }
    a.c.value = worst;
    a.c.tolerance = rel_tol;
    a.c.comparison = "<";
    a.c.passed = a.ok;
    return a.c;
}

Check criterion7(AcceptanceContext &ctx) {
    constexpr double tangency_tol = 1e-4, crossing_tol = 1e-2, vanish_tol = 1e-6, grad_floor = 1e-6;
    const Tolerances &tol = ctx.options().tol;
    Acc a;
    double worst_tangency = 0, min_crossing = kInf;
    for (const FixtureTriangle *f : ctx.fixtures({"general_acute"})) {
        const Triangle &t = f->triangle;
        const double R = circumcircle_data(t).R;
        std::string why;
        const FittedSurface *xyz = ctx.xyz_model(*f, &why);
        if (!xyz) {
            a.fail(f->name + ": center-space fit failed (" + why + ")");
            worst_tangency = kInf;
            continue;
        }
        a.note(f->name + ": center-space fit basis " + xyz->basis_kind + ", rms " + fmt(xyz->model.rms_residual));
        const int nterms = static_cast<int>(xyz->model.basis.size());
        // gradient scale of the fitted surface at its own samples
        std::vector<double> gn;
        for (const auto &r : ctx.xyz_sweep(*f).records)
            for (const auto &c : r.complement_centers)
                gn.push_back(xyz->gradient(c).norm());
        std::sort(gn.begin(), gn.end());
        const double gmed = gn.empty() ? 1.0 : gn[gn.size() / 2];

        std::vector<CameraCenter> probes;
        for (double th : morley_angles(t, tol).thetas)
            for (double h : {R / 2, R, 2 * R})
                probes.push_back(cylinder_point(t, th, h));
        std::vector<TangencyProbe> det;
        const double tan = tangency_check(t, *xyz, probes, 1e-300, &det);
        worst_tangency = std::max(worst_tangency, tan);
        double worst_on = 0;
        for (const auto &p : probes)
            worst_on = std::max(worst_on, normalized_distance(xyz->jet(p.cast<cd>()), 1.0, nterms, 12));
        a.note(f->name + ": tangency cross norm along Morley generatrices " + fmt(tan) + " (< " + fmt(tangency_tol) +
               "), fitted surface distance there " + fmt(worst_on));
        if (!(tan < tangency_tol))
            a.fail(f->name + ": tangency cross norm " + fmt(tan));
        if (!(worst_on < vanish_tol))
            a.fail(f->name + ": fitted surface does not contain the Morley generatrices (" + fmt(worst_on) + ")");

        for (double th : circle_angles_away_from_vertices(t, 8, 0.05)) {
            const CameraCenter p = cylinder_point(t, th, 0);
            std::vector<TangencyProbe> d1;
            const double cross = tangency_check(t, *xyz, {p}, 1e-300, &d1);
            const double dist = normalized_distance(xyz->jet(p.cast<cd>()), 1.0, nterms, 12);
            const double grel = d1[0].grad_del / gmed;
            const bool ok = dist < vanish_tol && grel > grad_floor && cross > crossing_tol;
            min_crossing = std::min(min_crossing, grel > grad_floor ? cross : 0.0);
            const std::string msg = "circumcircle theta=" + fmt(th) + ": surface distance " + fmt(dist) +
                                    ", |grad|/median " + fmt(grel) + ", cross " + fmt(cross);
            if (ok)
                a.note(msg);
            else
                a.fail(msg);
        }
    }
    a.note("circumcircle crossing: smallest cross norm with a usable gradient " + fmt(min_crossing) + " (> " +
           fmt(crossing_tol) + ")");
    a.c.value = worst_tangency;
    a.c.tolerance = tangency_tol;
    a.c.comparison = "<";
    a.c.passed = a.ok;
    return a.c;
}

Check criterion8(AcceptanceContext &ctx) {
    const Tolerances &tol = ctx.options().tol;
    Acc a;
    double worst_ratio = 0;
    for (const FixtureTriangle *f : ctx.fixtures({"general_acute"})) {
        const Triangle &t = f->triangle;
        const Circumcircle cc = circumcircle_data(t);
        const double R = cc.R;
        std::string why;
        const FittedSurface *model = ctx.e_model(*f, &why);
        if (!model) {
            a.fail(f->name + ": fit failed (" + why + ")");
            worst_ratio = kInf;
            continue;
        }
        const SweepResult &sw = ctx.e_sweep(*f);
        std::vector<Eigen::Vector3cd> mu2;
        int checked = 0;
        for (const auto &r : sw.records) {
            if (r.source_mu != 2)
                continue;
            mu2.push_back(r.complement_e.e);
            const P3PInstance inst = instance_from_center(t, r.source_center);
            const auto m = multiplicity(local_system<cd>(inst, r.complement_e.e), tol.max_order, tol.tau_rank);
            ++checked;
            if (m.mu != 1)
                a.fail(f->name + " complement of theta=" + fmt(r.theta) + " h=" + fmt(r.h) + " has mu " +
                       m.mu_string());
        }
        a.note(f->name + ": " + std::to_string(checked) + " complements of double sources all simple");

        std::vector<Eigen::Vector3cd> mu3;
        const auto thetas = morley_angles(t, tol).thetas;
        for (double th : thetas) {
            std::vector<Eigen::Vector3d> curve;
            for (int k = 0; k < 10; ++k) {
                const double h = R * (0.2 + 0.3 * k);
                const CameraCenter O = cylinder_point(t, th, h);
                const auto mu = source_mu(t, O, tol);
                if (mu != 3) {
                    a.fail(f->name + " Morley source theta=" + fmt(th) + " h/R=" + fmt(h / R) + " mu " + mu_text(mu));
                    continue;
                }
                for (const auto &c : complements_of(t, O, 3)) {
                    mu3.push_back(c.e);
                    if (!c.is_physical)
                        continue;
                    try {
                        for (const auto &x : locate_center(t, c))
                            if (x.z() >= 0)
                                curve.push_back(x);
                    } catch (const InconsistentDistances &) {
                    }
                }
            }
            if (curve.size() < 4) {
                a.fail(f->name + " theta=" + fmt(th) + ": only " + std::to_string(curve.size()) +
                       " real points on the traced cusp curve");
                continue;
            }
            const double res = plane_fit_residual(curve) / cc.diameter();
            a.note(f->name + " theta=" + fmt(th) + ": cusp curve plane-fit residual / diameter " + fmt(res) +
                   " over " + std::to_string(curve.size()) + " points");
            if (!(res > 1e-2))
                a.fail(f->name + " theta=" + fmt(th) + ": cusp curve looks planar (" + fmt(res) + ")");
        }
        // the O' trajectory of the figure-8 experiment, for comparison with the cusp curves
        for (double h : {R / 2, R, 2 * R}) {
            std::vector<Eigen::Vector3d> traj;
            for (const auto &row : sweep_figure8(t, 1.0, h, 180, nullptr, tol))
                for (const auto &x : row.centers)
                    if (x.z() >= 0)
                        traj.push_back(x);
            a.note(f->name + ": figure-8 trajectory of O' at h/R=" + fmt(h / R) + " plane-fit residual / diameter " +
                   fmt(plane_fit_residual(traj) / cc.diameter()) + " over " + std::to_string(traj.size()) + " points");
        }
        const auto ratios = cusp_check(*model, mu3, mu2);
        for (double r : ratios)
            worst_ratio = std::max(worst_ratio, r);
        a.note(f->name + ": " + std::to_string(ratios.size()) + " triple-source complements, largest gradient ratio " +
               fmt(worst_ratio));
        if (ratios.empty())
            a.fail(f->name + ": no complements of triple sources");
        if (!(worst_ratio <= tol.cusp_ratio))
            a.fail(f->name + ": gradient ratio " + fmt(worst_ratio));
    }
    a.c.value = worst_ratio;
    a.c.tolerance = tol.cusp_ratio;
    a.c.comparison = "<=";
    a.c.passed = a.ok;
    return a.c;
}

Check criterion9(AcceptanceContext &ctx) {
    Acc a;
    std::mt19937_64 rng(ctx.options().seed + 9);
    std::uniform_real_distribution<double> U01(0.0, 1.0);
    double worst_res = 0, worst_pose = 0;
    int bad_count = 0, n = 0;
    while (n < 10000) {
        const Triangle t = random_triangle(rng, 0.15);
        const Circumcircle cc = circumcircle_data(t);
        const double R = cc.R;
        const CameraCenter O(cc.center.x() + 2 * R * (2 * U01(rng) - 1), cc.center.y() + 2 * R * (2 * U01(rng) - 1),
                             R * (0.2 + 2.8 * U01(rng)));
        // generic: keep away from the danger cylinder
        if (std::abs((O.head<2>() - cc.center).squaredNorm() - R * R) < 0.05 * R * R)
            continue;
        ++n;
        const P3PInstance inst = instance_from_center(t, O);
        const Eigen::Vector3d truth = distances(t, O);
        std::vector<SolutionTriple> sols;
        try {
            sols = solve(inst);
        } catch (const std::exception &ex) {
            a.fail("instance " + std::to_string(n) + ": " + ex.what());
            continue;
        }
        for (const auto &s : sols)
            worst_res = std::max(worst_res, s.residual);
        bool distinct = sols.size() == 4;
        for (const auto &s : sols)
            distinct = distinct && s.multiplicity_hint.value_or(1) == 1;
        if (!distinct) {
            ++bad_count;
            a.fail("instance " + std::to_string(n) + ": " + std::to_string(sols.size()) + " clusters");
        }
        // pose round trip from the root nearest the true distances
        const SolutionTriple *best = nullptr;
        for (const auto &s : sols)
            if (s.is_physical && (!best || (s.e.real() - truth).norm() < (best->e.real() - truth).norm()))
                best = &s;
        if (!best) {
            a.fail("instance " + std::to_string(n) + ": true root not recovered");
            continue;
        }
        const Eigen::Matrix3d Rw = random_rotation(rng), Rc = random_rotation(rng);
        const Eigen::Vector3d tw(U01(rng), U01(rng), U01(rng));
        std::array<Eigen::Vector3d, 3> X, x;
        const Eigen::Vector3d V[3] = {t.A(), t.B(), t.C()};
        const Eigen::Vector3d Ow = Rw * O + tw;
        for (int i = 0; i < 3; ++i) {
            X[i] = Rw * V[i] + tw;
            x[i] = (Rc * (X[i] - Ow)).normalized();
        }
        const Eigen::Vector3d tc = -Rc * Ow;
        try {
            const Pose p = recover_pose(*best, X, x);
            const double err = std::max((p.R - Rc).norm(), (p.t - tc).norm() / std::max(1.0, Ow.norm()));
            worst_pose = std::max(worst_pose, err);
            if (!(err < 1e-8))
                a.fail("instance " + std::to_string(n) + ": pose error " + fmt(err));
        } catch (const std::exception &ex) {
            a.fail("instance " + std::to_string(n) + ": " + ex.what());
        }
    }
    if (!(worst_res < 1e-10))
        a.fail("largest residual " + fmt(worst_res));
    a.note("10000 instances: largest residual " + fmt(worst_res) + ", non-generic cluster counts " +
           std::to_string(bad_count) + ", largest pose error " + fmt(worst_pose));
    a.c.value = worst_res;
    a.c.tolerance = 1e-10;
    a.c.comparison = "<";
    a.c.passed = a.ok;
    return a.c;
}

} // namespace

// ---------------------------------------------------------------------------

AcceptanceContext::AcceptanceContext(AcceptanceOptions opt) : opt_(std::move(opt)) {}

std::vector<const FixtureTriangle *> AcceptanceContext::fixtures(const std::vector<std::string> &defaults) const {
    std::vector<const FixtureTriangle *> out;
    const auto &keys = opt_.triangles.empty() ? defaults : opt_.triangles;
    if (keys.empty()) {
        for (const auto &f : load_fixtures())
            out.push_back(&f);
        return out;
    }
    for (const auto &k : keys) {
        const FixtureTriangle *f = find_fixture(k);
        if (!f)
            throw std::invalid_argument("unknown fixture triangle '" + k + "'");
        out.push_back(f);
    }
    return out;
}

const SweepResult &AcceptanceContext::e_sweep(const FixtureTriangle &f) {
    auto it = e_sweeps_.find(f.name);
    if (it != e_sweeps_.end())
        return it->second;
    const double R = circumcircle_data(f.triangle).R;
    SweepConfig cfg{f.triangle, 64, 8, 0.1 * R, 3 * R, 0.37, false, opt_.tol};
    return e_sweeps_[f.name] = sweep_cylinder(cfg);
}

const SweepResult &AcceptanceContext::xyz_sweep(const FixtureTriangle &f) {
    auto it = xyz_sweeps_.find(f.name);
    if (it != xyz_sweeps_.end())
        return it->second;
    const double R = circumcircle_data(f.triangle).R;
    SweepConfig cfg{f.triangle, 96, 12, 0.1 * R, 3 * R, 0.37, false, opt_.tol};
    return xyz_sweeps_[f.name] = sweep_cylinder(cfg);
}

const FittedSurface *AcceptanceContext::e_model(const FixtureTriangle &f, std::string *why) {
    if (!e_models_.count(f.name) && !e_fail_.count(f.name)) {
        try {
            // fitted on the denser grid so the spec sweep stays held out
            e_models_[f.name] = std::make_unique<FittedSurface>(fit_deltoid_e(f.triangle, xyz_sweep(f).records, 16));
        } catch (const std::exception &ex) {
            e_fail_[f.name] = ex.what();
        }
    }
    if (e_fail_.count(f.name)) {
        if (why)
            *why = e_fail_[f.name];
        return nullptr;
    }
    return e_models_[f.name].get();
}

const FittedSurface *AcceptanceContext::xyz_model(const FixtureTriangle &f, std::string *why) {
    if (!xyz_models_.count(f.name) && !xyz_fail_.count(f.name)) {
        try {
            xyz_models_[f.name] = std::make_unique<FittedSurface>(
                fit_deltoid_xyz(f.triangle, xyz_sweep(f).records, 12, opt_.tol.fit_residual));
        } catch (const std::exception &ex) {
            xyz_fail_[f.name] = ex.what();
        }
    }
    if (xyz_fail_.count(f.name)) {
        if (why)
            *why = xyz_fail_[f.name];
        return nullptr;
    }
    return xyz_models_[f.name].get();
}

std::string criterion_name(int id) {
    switch (id) {
    case 1:
        return "exact cylinder fixture (5,4,3) at (4,2,1)";
    case 2:
        return "cylinder membership <=> multiplicity >= 2";
    case 3:
        return "triple roots on the Morley generatrices";
    case 4:
        return "no quadruple roots; circumcircle continuum";
    case 5:
        return "complementary solutions on the displayed components";
    case 6:
        return "degree-16 complementary surface leading coefficients";
    case 7:
        return "deltoidal surface tangent along Morley generatrices, crossing at the circumcircle";
    case 8:
        return "cusps from triple sources; no two double roots";
    case 9:
        return "solver soundness on random instances";
    default:
        throw std::out_of_range("criterion id must be 1..9");
    }
}

Check run_criterion(int id, AcceptanceContext &ctx) {
    Timer tm;
    Check c;
    try {
        switch (id) {
        case 1: c = criterion1(ctx); break;
        case 2: c = criterion2(ctx); break;
        case 3: c = criterion3(ctx); break;
        case 4: c = criterion4(ctx); break;
        case 5: c = criterion5(ctx); break;
        case 6: c = criterion6(ctx); break;
        case 7: c = criterion7(ctx); break;
        case 8: c = criterion8(ctx); break;
        case 9: c = criterion9(ctx); break;
        default: throw std::out_of_range("criterion id must be 1..9");
        }
    } catch (const std::out_of_range &) {
        throw;
    } catch (const std::exception &ex) {
        c.passed = false;
        c.value = std::numeric_limits<double>::quiet_NaN();
        c.details.push_back(std::string("FAIL exception: ") + ex.what());
    }
    c.id = id;
    c.name = criterion_name(id);
    c.runtime_s = tm.seconds();
    return c;
}

std::vector<int> suite_criteria(const std::string &suite) {
    if (suite == "all")
        return {1, 2, 3, 4, 5, 6, 7, 8, 9};
    if (suite == "strata")
        return {1, 2, 3, 4};
    if (suite == "deltoid")
        return {5, 6, 7, 8};
    if (suite == "p3p")
        return {9};
    if (suite.size() == 2 && suite[0] == 'c' && suite[1] >= '1' && suite[1] <= '9')
        return {suite[1] - '0'};
    throw UnknownSuite("unknown suite '" + suite + "' (all, strata, deltoid, p3p, c1..c9)");
}

RunReport run_verify(const std::string &suite, const AcceptanceOptions &opt) {
    RunReport rep;
    rep.suite = suite;
    rep.seed = opt.seed;
    rep.tol = opt.tol;
    rep.config_hash = config_hash(opt.tol, opt.seed);
    const auto ids = suite_criteria(suite);
    AcceptanceContext ctx(opt);
    for (int id : ids)
        rep.checks.push_back(run_criterion(id, ctx));
    return rep;
}

std::string summary_line(const Check &c) {
    std::ostringstream os;
    os << (c.passed ? "PASS" : "FAIL") << "  [" << c.id << "] " << c.name << ": " << fmt(c.value) << " "
       << c.comparison << " " << fmt(c.tolerance) << "  (" << fmt(c.runtime_s) << " s)";
    return os.str();
}

} // namespace p3pstrat
