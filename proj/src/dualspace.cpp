#include "p3pstrat/dualspace.hpp"
#include "p3pstrat/polyarith.hpp"

#include <cmath>
#include <limits>
#include <map>

namespace p3pstrat {

namespace {

using cd = std::complex<double>;

template <typename T> T j1_sq(const T &S12, const T &S13, const T &S23, const T &E1, const T &E2, const T &E3) {
    return E1 * E1 * S23 + E1 * E2 * (S12 - S13 - S23) + E1 * E3 * (S13 - S12 - S23) + E2 * E2 * S13 +
           E2 * E3 * (S23 - S12 - S13) + E3 * E3 * S12 - S12 * S13 * S23;
}

} // namespace

template <typename Scalar> Mat3<Scalar> jacobian_at(const Triangle &t, const Vec3<Scalar> &e) {
    for (int i = 0; i < 3; ++i)
        if (e(i) == Scalar(0))
            throw ZeroComponent("jacobian_at: zero distance component");
    const Eigen::Vector3d S = t.S();
    const double S12 = S(0), S13 = S(1), S23 = S(2);
    const Scalar E1 = e(0) * e(0), E2 = e(1) * e(1), E3 = e(2) * e(2);
    Mat3<Scalar> J = Mat3<Scalar>::Zero();
    J(0, 1) = (S23 + E2 - E3) / e(1);
    J(0, 2) = (S23 - E2 + E3) / e(2);
    J(1, 0) = (S13 + E1 - E3) / e(0);
    J(1, 2) = (S13 - E1 + E3) / e(2);
    J(2, 0) = (S12 + E1 - E2) / e(0);
    J(2, 1) = (S12 - E1 + E2) / e(1);
    return J;
}
template Mat3<double> jacobian_at<double>(const Triangle &, const Vec3<double> &);
template Mat3<cd> jacobian_at<cd>(const Triangle &, const Vec3<cd> &);

// Entries multiplied by the column's e (so that they stay rational in the squares).
std::array<std::array<mpq_class, 3>, 3> jacobian_exact_sq(const Triangle &t, const std::array<mpq_class, 3> &E) {
    const auto &S = t.sq;
    std::array<std::array<mpq_class, 3>, 3> N{};
    N[0][1] = S[2] + E[1] - E[2];
    N[0][2] = S[2] - E[1] + E[2];
    N[1][0] = S[1] + E[0] - E[2];
    N[1][2] = S[1] - E[0] + E[2];
    N[2][0] = S[0] + E[0] - E[1];
    N[2][1] = S[0] - E[0] + E[1];
    return N;
}

template <typename Scalar> NullInfo<Scalar> corank_and_nullvec(const Mat3<Scalar> &J, double tau_rank) {
    Eigen::JacobiSVD<Mat3<Scalar>> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
    NullInfo<Scalar> r;
    r.sigma = svd.singularValues();
    const double s1 = r.sigma(0);
    for (int i = 0; i < 3; ++i)
        if (s1 == 0 || r.sigma(i) < tau_rank * s1)
            ++r.corank;
    r.u = svd.matrixU().col(2);
    r.v = svd.matrixV().col(2);
    auto fix = [](Vec3<Scalar> &x) {
        Eigen::Index k;
        x.cwiseAbs().maxCoeff(&k);
        const Scalar m = x(k);
        if (std::abs(m) > 0)
            x *= std::abs(m) / m; // largest entry becomes real positive
    };
    fix(r.u);
    fix(r.v);
    return r;
}
template NullInfo<double> corank_and_nullvec<double>(const Mat3<double> &, double);
template NullInfo<cd> corank_and_nullvec<cd>(const Mat3<cd> &, double);

template <typename Scalar> QuadraticSystem<Scalar> local_system(const P3PInstance &inst, const Vec3<Scalar> &xi) {
    const Eigen::Vector3d S = inst.triangle.S();
    // (i, j, cos, S) per equation in displayed order
    const int I[3] = {1, 0, 0}, Jx[3] = {2, 2, 1};
    const double C[3] = {inst.c23, inst.c13, inst.c12}, SS[3] = {S(2), S(1), S(0)};
    QuadraticSystem<Scalar> sys;
    for (int r = 0; r < 3; ++r) {
        const int i = I[r], j = Jx[r];
        sys.f0(r) = xi(i) * xi(i) + xi(j) * xi(j) - 2.0 * C[r] * xi(i) * xi(j) - SS[r];
        sys.G(r, i) = 2.0 * xi(i) - 2.0 * C[r] * xi(j);
        sys.G(r, j) = 2.0 * xi(j) - 2.0 * C[r] * xi(i);
        Mat3<Scalar> A = Mat3<Scalar>::Zero();
        A(i, i) = 1;
        A(j, j) = 1;
        A(i, j) = A(j, i) = -C[r];
        sys.A[r] = A;
    }
    return sys;
}
template QuadraticSystem<double> local_system<double>(const P3PInstance &, const Vec3<double> &);
template QuadraticSystem<cd> local_system<cd>(const P3PInstance &, const Vec3<cd> &);

template <typename Scalar>
MacaulayResult macaulay_dual_dim(const QuadraticSystem<Scalar> &sys, int order, double tau_rank) {
    MacaulayResult res;
    const auto cols = monomial_basis(3, order, false);
    res.cols = static_cast<int>(cols.size());
    if (order == 0) {
        res.dim = 1;
        res.gap = std::numeric_limits<double>::infinity();
        return res;
    }
    std::map<Monomial, int> idx;
    for (std::size_t i = 0; i < cols.size(); ++i)
        idx[cols[i]] = static_cast<int>(i);
    // each generator as (monomial -> coefficient) in the local coordinates
    std::array<std::vector<std::pair<Monomial, Scalar>>, 3> gens;
    for (int r = 0; r < 3; ++r) {
        auto &g = gens[r];
        g.push_back({{0, 0, 0}, sys.f0(r)});
        for (int k = 0; k < 3; ++k) {
            Monomial m{0, 0, 0};
            m[k] = 1;
            g.push_back({m, sys.G(r, k)});
        }
        for (int k = 0; k < 3; ++k)
            for (int l = k; l < 3; ++l) {
                Monomial m{0, 0, 0};
                m[k] += 1;
                m[l] += 1;
                g.push_back({m, k == l ? sys.A[r](k, k) : Scalar(2.0) * sys.A[r](k, l)});
            }
    }
    const auto shifts = monomial_basis(3, order - 1, false);
    std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> rows;
    for (const auto &b : shifts)
        for (int r = 0; r < 3; ++r) {
            Eigen::Matrix<Scalar, Eigen::Dynamic, 1> row = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(res.cols);
            for (const auto &[m, c] : gens[r]) {
                Monomial mm{m[0] + b[0], m[1] + b[1], m[2] + b[2]};
                if (total_degree(mm) <= order)
                    row(idx[mm]) += c;
            }
            const double n = row.norm();
            if (n > 0)
                rows.push_back(row / n);
        }
    res.rows = static_cast<int>(rows.size());
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> M(rows.size(), res.cols);
    for (std::size_t i = 0; i < rows.size(); ++i)
        M.row(i) = rows[i].transpose();
    Eigen::BDCSVD<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> svd(M);
    const auto &s = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > tau_rank * s(0))
            ++rank;
    res.dim = res.cols - rank;
    if (rank < s.size() && rank > 0)
        res.gap = s(rank - 1) / std::max(s(rank), 1e-300);
    else
        res.gap = std::numeric_limits<double>::infinity();
    return res;
}
template MacaulayResult macaulay_dual_dim<double>(const QuadraticSystem<double> &, int, double);
template MacaulayResult macaulay_dual_dim<cd>(const QuadraticSystem<cd> &, int, double);

template <typename Scalar>
MultiplicityResult multiplicity(const QuadraticSystem<Scalar> &sys, int max_order, double tau_rank) {
    MultiplicityResult r;
    r.dims.push_back(1);
    r.min_gap = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= max_order; ++k) {
        const MacaulayResult m = macaulay_dual_dim(sys, k, tau_rank);
        r.min_gap = std::min(r.min_gap, m.gap);
        r.dims.push_back(m.dim);
        if (m.dim == r.dims[k - 1]) {
            r.mu = m.dim;
            return r;
        }
    }
    return r;
}
template MultiplicityResult multiplicity<double>(const QuadraticSystem<double> &, int, double);
template MultiplicityResult multiplicity<cd>(const QuadraticSystem<cd> &, int, double);

double criterion_c1(const Triangle &t, const Eigen::Vector3d &e) {
    const Eigen::Vector3d S = t.S();
    return j1_sq(S(0), S(1), S(2), e(0) * e(0), e(1) * e(1), e(2) * e(2));
}

std::complex<double> criterion_c1(const Triangle &t, const Eigen::Vector3cd &e) {
    const Eigen::Vector3d S = t.S();
    return j1_sq<cd>(S(0), S(1), S(2), e(0) * e(0), e(1) * e(1), e(2) * e(2));
}

mpq_class criterion_c1_exact_sq(const Triangle &t, const std::array<mpq_class, 3> &E) {
    return j1_sq<mpq_class>(t.sq[0], t.sq[1], t.sq[2], E[0], E[1], E[2]);
}

template <typename Scalar> Scalar criterion_ck(const QuadraticSystem<Scalar> &sys, int k, double tau_rank) {
    if (k != 2 && k != 3)
        throw std::invalid_argument("criterion_ck: k must be 2 or 3");
    Eigen::JacobiSVD<Mat3<Scalar>> svd(sys.G, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto &s = svd.singularValues();
    int corank = 0;
    for (int i = 0; i < 3; ++i)
        if (s(0) == 0 || s(i) < tau_rank * s(0))
            ++corank;
    if (corank != 1)
        throw BreadthViolation("criterion_ck requires Jacobian corank one (corank " + std::to_string(corank) + ")");
    if (s(1) < 1e3 * tau_rank * s(0))
        throw IllConditioned("criterion_ck: rank gap of the Jacobian too small");
    const Vec3<Scalar> u = svd.matrixU().col(2), v = svd.matrixV().col(2);
    Vec3<Scalar> q;
    for (int r = 0; r < 3; ++r)
        q(r) = (v.transpose() * sys.A[r] * v).value();
    if (k == 2)
        return u.dot(q);
    // J a2 = -Q(v), solved on the rank-2 part
    Vec3<Scalar> a2 = Vec3<Scalar>::Zero();
    const Vec3<Scalar> rhs = svd.matrixU().adjoint() * (-q);
    for (int i = 0; i < 2; ++i)
        a2 += svd.matrixV().col(i) * (rhs(i) / s(i));
    Vec3<Scalar> b;
    for (int r = 0; r < 3; ++r)
        b(r) = Scalar(2.0) * (v.transpose() * sys.A[r] * a2).value();
    return u.dot(b);
}
template double criterion_ck<double>(const QuadraticSystem<double> &, int, double);
template cd criterion_ck<cd>(const QuadraticSystem<cd> &, int, double);

DualSpaceReport dual_space_report(const P3PInstance &inst, const Eigen::Vector3cd &xi, int max_order,
                                  double tau_rank) {
    DualSpaceReport rep;
    rep.tau_rank = tau_rank;
    const auto null = corank_and_nullvec<cd>(jacobian_at<cd>(inst.triangle, xi), tau_rank);
    rep.corank = null.corank;
    rep.null_vector_u = null.u;
    rep.jacobian_sigma = null.sigma;
    const auto sys = local_system<cd>(inst, xi);
    const auto mult = multiplicity(sys, max_order, tau_rank);
    rep.dims = mult.dims;
    rep.mu = mult.mu;
    rep.macaulay_min_gap = mult.min_gap;
    rep.c1 = std::abs(criterion_c1(inst.triangle, xi));
    if (rep.corank == 1) {
        try {
            rep.c2 = std::abs(criterion_ck(sys, 2, tau_rank));
            rep.c3 = std::abs(criterion_ck(sys, 3, tau_rank));
        } catch (const std::runtime_error &) {
            // corank of the local system disagrees at the threshold; leave unset
        }
    }
    return rep;
}

} // namespace p3pstrat
