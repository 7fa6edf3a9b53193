#pragma once
// Closed-form strata: danger cylinder (distance and center coordinates), circumcircle,
// Cayley-Menger volume, generatrix generators, Morley construction, and the classifier.

#include "p3pstrat/dualspace.hpp"
#include "p3pstrat/p3p.hpp"
#include "p3pstrat/polyarith.hpp"

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace p3pstrat {

struct Tolerances {
    double tau_rank = 1e-8;
    double membership = 1e-9;    // normalized cylinder value
    double fit_residual = 1e-6;  // implicit fit rms before basis fallback
    double cusp_ratio = 1e-3;    // gradient-norm ratio at cusps
    double generator = 1e-8;     // normalized generatrix generators
    double c2_noise_floor = 1e-6;
    double continuum = 1e-9;
    double plane = 1e-9; // |z| / circumdiameter treated as coplanar
    int max_order = 6;
};

struct CubicRootFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Polynomials in the squared distances (E1,E2,E3) = (e1^2,e2^2,e3^2), exact coefficients.
SparsePoly cylinder_poly_sq(const Triangle &t);
std::array<SparsePoly, 3> generatrix_polys_sq(const Triangle &t); // the three extra generators
SparsePoly volume_poly_sq(const Triangle &t);                      // the displayed volume generator
// Same polynomials in (e1,e2,e3).
SparsePoly cylinder_poly(const Triangle &t);
std::vector<SparsePoly> i1_generators(const Triangle &t); // cylinder form first, then the three generators

double danger_cylinder_value_e(const Triangle &t, const Eigen::Vector3d &e);
mpq_class danger_cylinder_value_e_exact_sq(const Triangle &t, const std::array<mpq_class, 3> &E);
// Distances scaled by the circumdiameter, polynomial scaled to unit largest coefficient.
double normalized_cylinder_value(const Triangle &t, const Eigen::Vector3cd &e);
// |g(e)| for each I1 generator under the same normalization.
std::vector<double> normalized_generator_values(const Triangle &t, const Eigen::Vector3cd &e);

double danger_cylinder_value_xyz(const Triangle &t, const CameraCenter &O);
Eigen::Vector3d danger_cylinder_gradient_xyz(const Triangle &t, const CameraCenter &O);

struct Circumcircle {
    Eigen::Vector2d center;
    double R = 0;
    double diameter() const { return 2 * R; }
};
Circumcircle circumcircle_data(const Triangle &t);
CameraCenter cylinder_point(const Triangle &t, double theta, double h, double radius_fraction = 1.0);

double cayley_menger_volume_sq(const Triangle &t, const Eigen::Vector3d &e);
mpq_class cayley_menger_volume_sq_exact(const Triangle &t, const std::array<mpq_class, 3> &E);

struct MorleyData {
    Eigen::Vector2d D, E, F; // near sides BC, CA, AB
    double side = 0;
    std::vector<double> thetas;
    std::vector<Eigen::Vector2d> generatrix_bases;
    std::vector<double> f1_residuals;
    double sin3theta = 0;
};

MorleyData morley_triangle(const Triangle &t);
// Adds thetas/bases: roots of the sin-theta cubic, kept where the probe at h = R has multiplicity 3.
MorleyData morley_angles(const Triangle &t, const Tolerances &tol = {});
double morley_cubic(const Triangle &t, double sin_theta); // normalized by its leading coefficient

enum class StratumLabel { Regular, DangerCylinder, MorleyGeneratrix, Circumcircle, Degenerate };
std::string to_string(StratumLabel l);

struct Classification {
    StratumLabel label = StratumLabel::Regular;
    std::string reason;
    bool on_cylinder = false;
    bool exact_membership = false;
    double cylinder_value = 0; // normalized
    bool continuum = false;
    bool i3_degenerate = false;
    bool generators_vanish = false;
    std::vector<double> generator_values;
    DualSpaceReport report;
    std::vector<std::string> notes;
};

Classification classify(const Triangle &t, const CameraCenter &O, const Tolerances &tol = {});

} // namespace p3pstrat
