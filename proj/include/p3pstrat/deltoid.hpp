#pragma once
// Complementary solutions of danger-cylinder configurations and the deltoidal
// surface they sweep: sweeps, implicit fits, membership, tangency and cusps.

#include "p3pstrat/polyarith.hpp"
#include "p3pstrat/strata.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace p3pstrat {

struct SweepConfig {
    Triangle triangle;
    int theta_samples = 64;
    int height_samples = 8;
    double h_min = 0.1, h_max = 3.0; // absolute heights, h_min > 0
    double theta_offset = 0.0;        // grid shift in units of the angular step
    bool include_morley = false;
    Tolerances tol;
};

struct ComplementaryRecord {
    CameraCenter source_center = CameraCenter::Zero();
    double theta = 0, h = 0;
    int source_mu = 0;
    int branch_index = 0;
    SolutionTriple complement_e;
    std::vector<CameraCenter> complement_centers; // mirror pair when real
    bool on_morley_generatrix = false;
};

struct SweepResult {
    std::vector<ComplementaryRecord> records;
    std::vector<std::string> failures;
    int sources = 0;
};

SweepResult sweep_cylinder(const SweepConfig &cfg);

// Complements of one source center (deflating the seed by its multiplicity).
std::vector<SolutionTriple> complements_of(const Triangle &t, const CameraCenter &O, int source_mu);

// Fitted surface with its coordinate normalization: x_model = (x - offset) / scale.
struct FittedSurface {
    ImplicitSurfaceModel model;
    Eigen::Vector3d offset = Eigen::Vector3d::Zero();
    double scale = 1;
    std::string basis_kind; // "even" or "full"
    std::vector<std::string> attempts;

    double value(const Eigen::Vector3d &x) const;
    Eigen::Vector3d gradient(const Eigen::Vector3d &x) const; // in model coordinates
    PolyJet<std::complex<double>> jet(const Eigen::Vector3cd &x) const;
    // Value uncertainty of the fit at x: held-out max residual times the monomial-row norm.
    double value_floor(const Eigen::Vector3cd &x) const;
};

// Real complement centers, normalized about the circumcenter by the circumdiameter;
// even-only basis first, full basis if the even fit is ambiguous or rms > tolerance.
FittedSurface fit_deltoid_xyz(const Triangle &t, const std::vector<ComplementaryRecord> &records, int degree = 12,
                              double residual_tol = 1e-6);
// Complement distance triples (complex ones included) divided by the circumdiameter, even-only basis.
FittedSurface fit_deltoid_e(const Triangle &t, const std::vector<ComplementaryRecord> &records, int degree = 16);

// Ratio of the coefficient of `m` to that of `ref`.
double coefficient_ratio(const ImplicitSurfaceModel &m, const Monomial &num, const Monomial &ref);

// Scale-free closeness of a point to the zero set of a polynomial: the smallest t with
// |grad| t + |H|/2 t^2 = max(0, |p| - eps * sum|terms| - value_floor), divided by `length_scale`.
// eps covers the floating-point evaluation error of p; value_floor any coefficient uncertainty.
double normalized_distance(const PolyJet<std::complex<double>> &jet, double length_scale, int nterms, int degree,
                           double value_floor = 0);

struct Component {
    std::string name;
    SparsePoly poly; // in (e1', e2', e3')
    bool trivial = false;
};

struct MembershipResult {
    int component = -1; // index into the component list; list size means the fitted model
    std::string name;
    double value = 0;
    std::vector<double> values;
};
MembershipResult component_membership(const Triangle &t, const std::vector<Component> &components,
                                      const FittedSurface *e_model, const Eigen::Vector3cd &e);

struct TangencyProbe {
    CameraCenter point;
    double cross_norm = 0;
    double grad_cyl = 0, grad_del = 0;
};
// max over probes of |grad cyl x grad del| / (|grad cyl| |grad del| + eps)
double tangency_check(const Triangle &t, const FittedSurface &xyz_model, const std::vector<CameraCenter> &probes,
                      double eps, std::vector<TangencyProbe> *details = nullptr);

// |grad model| at each point, divided by the median over the reference points.
std::vector<double> cusp_check(const FittedSurface &model, const std::vector<Eigen::Vector3cd> &mu3_points,
                               const std::vector<Eigen::Vector3cd> &mu2_points);

// RMS distance of points to their least-squares plane.
double plane_fit_residual(const std::vector<Eigen::Vector3d> &pts);

struct Figure8Row {
    double theta = 0;
    CameraCenter O = CameraCenter::Zero();
    int mu = 0;
    std::vector<SolutionTriple> complements;
    std::vector<CameraCenter> centers;
    double min_grad_norm = 0; // smallest |grad e_model| over this row's complements (if a model is given)
};
std::vector<Figure8Row> sweep_figure8(const Triangle &t, double circle_radius_fraction, double h, int samples,
                                      const FittedSurface *e_model = nullptr, const Tolerances &tol = {});

} // namespace p3pstrat
