#include "p3pstrat/deltoid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

namespace p3pstrat {

namespace {

using cd = std::complex<double>;

int source_multiplicity(const Triangle &t, const CameraCenter &O, const Tolerances &tol, std::string *err) {
    const P3PInstance inst = instance_from_center(t, O);
    const auto sys = local_system<double>(inst, distances(t, O));
    const auto mu = multiplicity(sys, tol.max_order, tol.tau_rank);
    if (!mu.mu) {
        if (err)
            *err = "multiplicity did not stabilize";
        return 0;
    }
    return *mu.mu;
}

std::vector<CameraCenter> real_centers(const Triangle &t, const SolutionTriple &s) {
    if (!s.is_physical)
        return {};
    try {
        const auto c = locate_center(t, s);
        return {c[0], c[1]};
    } catch (const InconsistentDistances &) {
        return {};
    }
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double median(std::vector<double> v) {
    if (v.empty())
        return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

std::vector<SolutionTriple> complements_of(const Triangle &t, const CameraCenter &O, int source_mu) {
    const P3PInstance inst = instance_from_center(t, O);
    SolutionTriple seed;
    seed.e = sign_normalize(distances(t, O).cast<cd>());
    seed.is_physical = true;
    seed.multiplicity_hint = std::max(1, source_mu);
    return complementary_solutions(inst, seed);
}

SweepResult sweep_cylinder(const SweepConfig &cfg) {
    if (!(cfg.h_min > 0) || cfg.h_max < cfg.h_min)
        throw std::invalid_argument("sweep: need 0 < h_min <= h_max");
    if (cfg.theta_samples < 1 || cfg.height_samples < 1)
        throw std::invalid_argument("sweep: grid sizes must be positive");
    const Triangle &t = cfg.triangle;
    struct Angle {
        double theta;
        bool morley;
    };
    std::vector<Angle> angles;
    const double tau = 2 * std::numbers::pi;
    for (int i = 0; i < cfg.theta_samples; ++i)
        angles.push_back({tau * (i + cfg.theta_offset) / cfg.theta_samples, false});
    if (cfg.include_morley)
        for (double th : morley_angles(t, cfg.tol).thetas)
            angles.push_back({th, true});
    SweepResult res;
    for (const Angle &a : angles)
        for (int j = 0; j < cfg.height_samples; ++j) {
            const double h = cfg.height_samples == 1
                                 ? cfg.h_min
                                 : cfg.h_min + (cfg.h_max - cfg.h_min) * j / (cfg.height_samples - 1);
            const CameraCenter O = cylinder_point(t, a.theta, h);
            ++res.sources;
            try {
                std::string err;
                const int mu = source_multiplicity(t, O, cfg.tol, &err);
                if (mu == 0) {
                    res.failures.push_back("theta=" + std::to_string(a.theta) + " h=" + std::to_string(h) + ": " + err);
                    continue;
                }
                const auto comps = complements_of(t, O, mu);
                for (std::size_t b = 0; b < comps.size(); ++b) {
                    ComplementaryRecord r;
                    r.source_center = O;
                    r.theta = a.theta;
                    r.h = h;
                    r.source_mu = mu;
                    r.branch_index = static_cast<int>(b);
                    r.complement_e = comps[b];
                    r.complement_centers = real_centers(t, comps[b]);
                    r.on_morley_generatrix = a.morley;
                    res.records.push_back(std::move(r));
                }
            } catch (const std::exception &ex) {
                res.failures.push_back("theta=" + std::to_string(a.theta) + " h=" + std::to_string(h) + ": " +
                                       ex.what());
            }
        }
    return res;
}

double FittedSurface::value(const Eigen::Vector3d &x) const {
    const Eigen::VectorXd y = (x - offset) / scale;
    return model_jet<double>(model.basis, model.coefficients, y).value;
}

Eigen::Vector3d FittedSurface::gradient(const Eigen::Vector3d &x) const {
    const Eigen::VectorXd y = (x - offset) / scale;
    return model_jet<double>(model.basis, model.coefficients, y).grad;
}

PolyJet<cd> FittedSurface::jet(const Eigen::Vector3cd &x) const {
    const Eigen::VectorXcd y = (x - offset.cast<cd>()) / scale;
    return model_jet<cd>(model.basis, model.coefficients, y);
}

double FittedSurface::value_floor(const Eigen::Vector3cd &x) const {
    const Eigen::VectorXcd y = (x - offset.cast<cd>()) / scale;
    return model.max_residual * monomial_row<cd>(model.basis, y).norm();
}

FittedSurface fit_deltoid_xyz(const Triangle &t, const std::vector<ComplementaryRecord> &records, int degree,
                              double residual_tol) {
    const Circumcircle cc = circumcircle_data(t);
    FittedSurface fs;
    fs.offset = Eigen::Vector3d(cc.center.x(), cc.center.y(), 0);
    fs.scale = cc.diameter();
    std::vector<Eigen::VectorXd> pts;
    for (const auto &r : records)
        for (const auto &c : r.complement_centers)
            pts.push_back((c - fs.offset) / fs.scale);
    for (const bool even : {true, false}) {
        const std::string kind = even ? "even" : "full";
        try {
            ImplicitSurfaceModel m = fit_implicit(pts, monomial_basis(3, degree, even));
            fs.attempts.push_back(kind + ": rms " + fmt(m.rms_residual) + ", gap " + fmt(m.gap()));
            if (m.rms_residual <= residual_tol || !even) {
                fs.model = std::move(m);
                fs.basis_kind = kind;
                return fs;
            }
        } catch (const FitAmbiguity &ex) {
            fs.attempts.push_back(kind + ": " + ex.what());
            if (!even)
                throw;
        }
    }
    return fs;
}

FittedSurface fit_deltoid_e(const Triangle &t, const std::vector<ComplementaryRecord> &records, int degree) {
    FittedSurface fs;
    fs.scale = circumcircle_data(t).diameter();
    fs.basis_kind = "even";
    std::vector<Eigen::VectorXcd> pts;
    for (const auto &r : records)
        pts.push_back(r.complement_e.e / fs.scale);
    fs.model = fit_implicit(pts, monomial_basis(3, degree, true));
    fs.attempts.push_back("even: rms " + fmt(fs.model.rms_residual) + ", gap " + fmt(fs.model.gap()));
    return fs;
}

double coefficient_ratio(const ImplicitSurfaceModel &m, const Monomial &num, const Monomial &ref) {
    double a = std::numeric_limits<double>::quiet_NaN(), b = a;
    for (std::size_t i = 0; i < m.basis.size(); ++i) {
        if (m.basis[i] == num)
            a = m.coefficients(i);
        if (m.basis[i] == ref)
            b = m.coefficients(i);
    }
    return a / b;
}

double normalized_distance(const PolyJet<cd> &jet, double length_scale, int nterms, int degree, double value_floor) {
    const double u = std::numeric_limits<double>::epsilon() / 2;
    const double k = nterms + degree;
    const double gamma = k * u / (1 - k * u);
    const double p = std::max(0.0, std::abs(jet.value) - gamma * jet.abs_terms - value_floor);
    if (p == 0)
        return 0;
    const double g = jet.grad.norm();
    const double h = jet.hess.size() ? Eigen::JacobiSVD<Eigen::MatrixXcd>(jet.hess).singularValues()(0) : 0.0;
    if (g == 0 && h == 0)
        return std::numeric_limits<double>::infinity();
    const double t = 2 * p / (g + std::sqrt(g * g + 2 * h * p));
    return t / length_scale;
}

MembershipResult component_membership(const Triangle &t, const std::vector<Component> &components,
                                      const FittedSurface *e_model, const Eigen::Vector3cd &e) {
    const double D = circumcircle_data(t).diameter();
    MembershipResult res;
    res.value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < components.size(); ++i) {
        const Component &c = components[i];
        double v = std::numeric_limits<double>::infinity();
        if (!c.trivial)
            v = normalized_distance(poly_jet(c.poly, e), D, static_cast<int>(c.poly.terms().size()),
                                    c.poly.degree());
        res.values.push_back(v);
        if (v < res.value) {
            res.value = v;
            res.component = static_cast<int>(i);
            res.name = c.name;
        }
    }
    if (e_model) {
        const auto jet = e_model->jet(e);
        const double v = normalized_distance(jet, 1.0, static_cast<int>(e_model->model.basis.size()),
                                             total_degree(e_model->model.basis.front()), e_model->value_floor(e));
        res.values.push_back(v);
        if (v < res.value) {
            res.value = v;
            res.component = static_cast<int>(components.size());
            res.name = "fitted";
        }
    }
    return res;
}

double tangency_check(const Triangle &t, const FittedSurface &xyz_model, const std::vector<CameraCenter> &probes,
                      double eps, std::vector<TangencyProbe> *details) {
    double worst = 0;
    for (const auto &p : probes) {
        const Eigen::Vector3d gc = danger_cylinder_gradient_xyz(t, p);
        const Eigen::Vector3d gd = xyz_model.gradient(p);
        TangencyProbe tp;
        tp.point = p;
        tp.grad_cyl = gc.norm();
        tp.grad_del = gd.norm();
        tp.cross_norm = gc.cross(gd).norm() / (tp.grad_cyl * tp.grad_del + eps);
        worst = std::max(worst, tp.cross_norm);
        if (details)
            details->push_back(tp);
    }
    return worst;
}

std::vector<double> cusp_check(const FittedSurface &model, const std::vector<Eigen::Vector3cd> &mu3_points,
                               const std::vector<Eigen::Vector3cd> &mu2_points) {
    std::vector<double> ref;
    for (const auto &p : mu2_points)
        ref.push_back(model.jet(p).grad.norm());
    const double med = median(ref);
    std::vector<double> out;
    for (const auto &p : mu3_points)
        out.push_back(model.jet(p).grad.norm() / med);
    return out;
}

double plane_fit_residual(const std::vector<Eigen::Vector3d> &pts) {
    if (pts.size() < 4)
        return 0;
    Eigen::Vector3d c = Eigen::Vector3d::Zero();
    for (const auto &p : pts)
        c += p;
    c /= static_cast<double>(pts.size());
    Eigen::MatrixXd M(pts.size(), 3);
    for (std::size_t i = 0; i < pts.size(); ++i)
        M.row(i) = (pts[i] - c).transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    return svd.singularValues()(2) / std::sqrt(static_cast<double>(pts.size()));
}

std::vector<Figure8Row> sweep_figure8(const Triangle &t, double circle_radius_fraction, double h, int samples,
                                      const FittedSurface *e_model, const Tolerances &tol) {
    if (!(circle_radius_fraction > 0 && circle_radius_fraction <= 1))
        throw std::invalid_argument("figure-8 sweep: radius fraction must be in (0, 1]");
    std::vector<Figure8Row> rows;
    for (int k = 0; k < samples; ++k) {
        Figure8Row r;
        r.theta = 2 * std::numbers::pi * k / samples;
        r.O = cylinder_point(t, r.theta, h, circle_radius_fraction);
        r.mu = source_multiplicity(t, r.O, tol, nullptr);
        if (r.mu == 0)
            throw NumericalFailure("figure-8 sweep: multiplicity did not stabilize");
        r.complements = complements_of(t, r.O, r.mu);
        r.min_grad_norm = std::numeric_limits<double>::infinity();
        for (const auto &c : r.complements) {
            for (const auto &x : real_centers(t, c))
                r.centers.push_back(x);
            if (e_model)
                r.min_grad_norm = std::min(r.min_grad_norm, e_model->jet(c.e).grad.norm());
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

} // namespace p3pstrat
