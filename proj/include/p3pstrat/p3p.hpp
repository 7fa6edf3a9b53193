#pragma once
// The P3P distance system e_i^2 + e_j^2 - 2 cos_ij e_i e_j = s_ij^2: instances,
// all-roots solver, pose recovery, complements and center inversion.

#include <Eigen/Dense>
#include <gmpxx.h>

#include <array>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

namespace p3pstrat {

using Vec3c = Eigen::Vector3cd;
using CameraCenter = Eigen::Vector3d;

struct DegenerateTriangle : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct VertexCoincidence : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CoplanarDegeneracy : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InconsistentDistances : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rational placement A=(0,0), B=(x2,0), C=(x3,y3), available when all three are rational.
struct ExactPlacement {
    mpq_class x2, x3, y3;
};

struct Triangle {
    double s12 = 0, s13 = 0, s23 = 0;
    // exact squared sides; exact for integer/rational input and for the squared-side constructor
    std::array<mpq_class, 3> sq;
    double x2 = 0, x3 = 0, y3 = 0;
    std::optional<ExactPlacement> exact;

    Eigen::Vector3d A() const { return {0, 0, 0}; }
    Eigen::Vector3d B() const { return {x2, 0, 0}; }
    Eigen::Vector3d C() const { return {x3, y3, 0}; }
    Eigen::Vector3d S() const { return {sq[0].get_d(), sq[1].get_d(), sq[2].get_d()}; } // (s12^2, s13^2, s23^2)
};

Triangle make_triangle(double s12, double s13, double s23);
// From exact squared sides; (sqrt2,1,1) stays rational this way.
Triangle make_triangle_sq(const mpq_class &S12, const mpq_class &S13, const mpq_class &S23);

struct P3PInstance {
    Triangle triangle;
    double c12 = 0, c13 = 0, c23 = 0;
};

struct SolutionTriple {
    Vec3c e = Vec3c::Zero();
    double residual = 0; // max |equation| / s12^2
    bool is_physical = false;
    std::optional<int> multiplicity_hint;
};

struct Pose {
    Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
    Eigen::Vector3d t = Eigen::Vector3d::Zero();
};

struct ContinuumDetected : std::runtime_error {
    std::vector<SolutionTriple> samples; // representative points of the continuum
    explicit ContinuumDetected(std::vector<SolutionTriple> s)
        : std::runtime_error("positive-dimensional solution set (continuum)"), samples(std::move(s)) {}
};

Eigen::Vector3d distances(const Triangle &t, const CameraCenter &O);
// Exact squared distances; requires exact placement.
std::array<mpq_class, 3> squared_distances_exact(const Triangle &t, const std::array<mpq_class, 3> &O);

P3PInstance instance_from_center(const Triangle &t, const CameraCenter &O);

// Equation values in the order (12, 13, 23).
Vec3c residual_vector(const P3PInstance &inst, const Vec3c &e);
double relative_residual(const P3PInstance &inst, const Vec3c &e);

// Quartic eliminant in u = e_b / e_a for anchor a (coefficients, lowest degree first).
Eigen::Matrix<double, 5, 1> eliminant(const P3PInstance &inst, int anchor = 0);

struct SolverOptions {
    double polish_step_tol = 1e-14;
    int polish_max_iter = 50;
    double cluster_factor = 1e-6; // times sqrt(s12^2+s13^2+s23^2)
    double continuum_tol = 1e-9;
};

std::vector<SolutionTriple> solve(const P3PInstance &inst, const SolverOptions &opt = {});

bool detect_continuum(const P3PInstance &inst, double tol = 1e-9);

// Newton polish on the full 3x3 system.
Vec3c polish(const P3PInstance &inst, Vec3c e, const SolverOptions &opt = {});
// Sign convention: Re(e1) >= 0, ties broken by Re(e2) >= 0.
Vec3c sign_normalize(Vec3c e);

Pose recover_pose(const SolutionTriple &sol, const std::array<Eigen::Vector3d, 3> &X,
                  const std::array<Eigen::Vector3d, 3> &x);

// Other roots of the eliminant after deflating the cluster of `known`
// (its multiplicity_hint, default 1).
std::vector<SolutionTriple> complementary_solutions(const P3PInstance &inst, const SolutionTriple &known,
                                                    const SolverOptions &opt = {});

std::array<CameraCenter, 2> locate_center(const Triangle &t, const SolutionTriple &e);

// Points of the circumcircle arc carrying the same inscribed angles as `inst`, as distance triples.
std::vector<SolutionTriple> continuum_samples(const P3PInstance &inst, int count = 16);

} // namespace p3pstrat
