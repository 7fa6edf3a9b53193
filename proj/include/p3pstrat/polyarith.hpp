#pragma once
// Exact sparse multivariate polynomials over Q, float/complex evaluation,
// differentiation and least-squares implicit-surface fitting.

#include <Eigen/Dense>
#include <gmpxx.h>

#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace p3pstrat {

using Monomial = std::vector<int>;

// Graded lexicographic: higher total degree first, then lexicographically larger.
struct GrlexOrder {
    bool operator()(const Monomial &a, const Monomial &b) const;
};

int total_degree(const Monomial &m);

class SparsePoly {
  public:
    using TermMap = std::map<Monomial, mpq_class, GrlexOrder>;

    SparsePoly() = default;
    explicit SparsePoly(std::vector<std::string> vars) : vars_(std::move(vars)) {}

    static SparsePoly constant(std::vector<std::string> vars, const mpq_class &c);
    static SparsePoly variable(std::vector<std::string> vars, int index);

    const std::vector<std::string> &variables() const { return vars_; }
    int nvars() const { return static_cast<int>(vars_.size()); }
    const TermMap &terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    int degree() const;

    // Accumulates; zero results are erased.
    void add_term(const Monomial &m, const mpq_class &c);
    mpq_class coefficient(const Monomial &m) const;

    SparsePoly operator+(const SparsePoly &o) const;
    SparsePoly operator-(const SparsePoly &o) const;
    SparsePoly operator*(const SparsePoly &o) const;
    SparsePoly operator-() const;
    SparsePoly scaled(const mpq_class &c) const;
    SparsePoly pow(int k) const;
    bool operator==(const SparsePoly &o) const { return vars_ == o.vars_ && terms_ == o.terms_; }

    // Largest |coefficient|.
    mpq_class max_abs_coefficient() const;
    SparsePoly normalized_max() const { return scaled(1 / max_abs_coefficient()); }

    std::string to_string() const;
    static SparsePoly parse(const std::string &text);

  private:
    void check_compatible(const SparsePoly &o) const;
    std::vector<std::string> vars_;
    TermMap terms_;
};

mpq_class eval_exact(const SparsePoly &p, const std::vector<mpq_class> &point);

// Direct evaluation in canonical term order (no compensated summation).
template <typename Scalar> Scalar eval(const SparsePoly &p, const std::vector<Scalar> &point);
double eval_float(const SparsePoly &p, const std::vector<double> &point);
std::complex<double> eval_complex(const SparsePoly &p, const std::vector<std::complex<double>> &point);
// Sum of |c_t m_t(x)|; used as an evaluation-error scale.
double abs_term_sum(const SparsePoly &p, const std::vector<std::complex<double>> &point);

SparsePoly partial(const SparsePoly &p, int var_index);
std::vector<SparsePoly> gradient(const SparsePoly &p);

// Substitute x_i -> x_i^2 is the inverse; this divides every exponent by two.
// Throws if an odd exponent is present.
SparsePoly halve_exponents(const SparsePoly &p, std::vector<std::string> new_vars);

std::vector<Monomial> monomial_basis(int nvars, int max_degree, bool even_only);

struct ImplicitSurfaceModel {
    std::vector<Monomial> basis;
    Eigen::VectorXd coefficients; // unit norm
    double rms_residual = 0;
    double max_residual = 0;
    int sample_count = 0;
    double sigma_min = 0;  // smallest singular value (equilibrated matrix)
    double sigma_next = 0; // second smallest
    double sigma_max = 0;
    double gap() const { return sigma_next / std::max(sigma_min, 1e-300); }
};

struct FitAmbiguity : std::runtime_error {
    double gap;
    FitAmbiguity(const std::string &w, double g) : std::runtime_error(w), gap(g) {}
};

// Monomial evaluation row for one point.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> monomial_row(const std::vector<Monomial> &basis,
                                                      const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> &x);

// Samples may be complex: each complex sample contributes its real and imaginary rows.
// Every 5th sample (index % 5 == 4) is held out for the residual statistics.
ImplicitSurfaceModel fit_implicit(const std::vector<Eigen::VectorXcd> &samples, const std::vector<Monomial> &basis,
                                  double ambiguity_ratio = 10.0);
ImplicitSurfaceModel fit_implicit(const std::vector<Eigen::VectorXd> &samples, const std::vector<Monomial> &basis,
                                  double ambiguity_ratio = 10.0);

// Value, gradient and Hessian of sum c_t x^{m_t}.
template <typename Scalar> struct PolyJet {
    Scalar value{};
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> grad;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> hess;
    double abs_terms = 0; // sum |c_t m_t(x)|
};
template <typename Scalar>
PolyJet<Scalar> model_jet(const std::vector<Monomial> &basis, const Eigen::VectorXd &coeffs,
                          const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> &x);
PolyJet<std::complex<double>> poly_jet(const SparsePoly &p, const Eigen::VectorXcd &x);

// Exact conversion of a float model to a polynomial (binary fractions are rational).
SparsePoly model_to_poly(const ImplicitSurfaceModel &m, std::vector<std::string> vars);

} // namespace p3pstrat
