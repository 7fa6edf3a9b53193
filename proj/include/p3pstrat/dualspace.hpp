#pragma once
// Jacobian structure, local dual spaces via Macaulay matrices, multiplicity and
// the breadth-one criterion values c_k at a root of the P3P distance system.

#include "p3pstrat/p3p.hpp"

#include <Eigen/Dense>
#include <gmpxx.h>

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace p3pstrat {

struct ZeroComponent : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct BreadthViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IllConditioned : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <typename Scalar> using Mat3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar> using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

// Row order follows the displayed Jacobian: equations for the pairs (2,3), (1,3), (1,2).
// Entries are half the partial derivatives, with the cosines eliminated by the law of cosines.
template <typename Scalar> Mat3<Scalar> jacobian_at(const Triangle &t, const Vec3<Scalar> &e);
std::array<std::array<mpq_class, 3>, 3> jacobian_exact_sq(const Triangle &t, const std::array<mpq_class, 3> &E);

template <typename Scalar> struct NullInfo {
    int corank = 0;
    Vec3<Scalar> u = Vec3<Scalar>::Zero(); // left null vector
    Vec3<Scalar> v = Vec3<Scalar>::Zero(); // right null vector
    Eigen::Vector3d sigma = Eigen::Vector3d::Zero();
};
template <typename Scalar> NullInfo<Scalar> corank_and_nullvec(const Mat3<Scalar> &J, double tau_rank = 1e-8);

// Local Taylor form of a quadratic system: f_i(xi + y) = f0_i + g_i . y + y^T A_i y.
template <typename Scalar> struct QuadraticSystem {
    Vec3<Scalar> f0 = Vec3<Scalar>::Zero();
    Mat3<Scalar> G = Mat3<Scalar>::Zero(); // rows are gradients
    std::array<Mat3<Scalar>, 3> A;         // symmetric quadratic parts
};

// The P3P system of an instance expanded at xi (equation order as in jacobian_at).
template <typename Scalar> QuadraticSystem<Scalar> local_system(const P3PInstance &inst, const Vec3<Scalar> &xi);

struct MacaulayResult {
    int dim = 0;
    int rows = 0, cols = 0;
    double gap = 0; // sigma_rank / sigma_{rank+1} around the threshold (inf when no small values)
};
template <typename Scalar>
MacaulayResult macaulay_dual_dim(const QuadraticSystem<Scalar> &sys, int order, double tau_rank = 1e-8);

struct MultiplicityResult {
    std::vector<int> dims;
    std::optional<int> mu; // empty => infinite suspected
    double min_gap = 0;
    std::string mu_string() const { return mu ? std::to_string(*mu) : "infinite_suspected"; }
};
template <typename Scalar>
MultiplicityResult multiplicity(const QuadraticSystem<Scalar> &sys, int max_order = 6, double tau_rank = 1e-8);

// c_1: the danger-cylinder polynomial at (e, s).
double criterion_c1(const Triangle &t, const Eigen::Vector3d &e);
std::complex<double> criterion_c1(const Triangle &t, const Eigen::Vector3cd &e);
mpq_class criterion_c1_exact_sq(const Triangle &t, const std::array<mpq_class, 3> &E);

// c_k for k in {2,3} along the breadth-one arc x(s) = xi + v s + a2 s^2 + ...,
// v the unit right null vector; the coefficient of s is fixed to 1.
template <typename Scalar>
Scalar criterion_ck(const QuadraticSystem<Scalar> &sys, int k, double tau_rank = 1e-8);

struct DualSpaceReport {
    int corank = 0;
    Eigen::Vector3cd null_vector_u = Eigen::Vector3cd::Zero();
    Eigen::Vector3d jacobian_sigma = Eigen::Vector3d::Zero();
    std::vector<int> dims;
    std::optional<int> mu;
    double c1 = 0;
    std::optional<double> c2, c3; // magnitudes; present only at corank one
    double tau_rank = 1e-8;
    double macaulay_min_gap = 0;
};

DualSpaceReport dual_space_report(const P3PInstance &inst, const Eigen::Vector3cd &xi, int max_order = 6,
                                  double tau_rank = 1e-8);

} // namespace p3pstrat
