#include "p3pstrat/polyarith.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace p3pstrat {

int total_degree(const Monomial &m) { return std::accumulate(m.begin(), m.end(), 0); }

bool GrlexOrder::operator()(const Monomial &a, const Monomial &b) const {
    const int da = total_degree(a), db = total_degree(b);
    if (da != db)
        return da > db;
    return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

SparsePoly SparsePoly::constant(std::vector<std::string> vars, const mpq_class &c) {
    SparsePoly p(std::move(vars));
    p.add_term(Monomial(p.nvars(), 0), c);
    return p;
}

SparsePoly SparsePoly::variable(std::vector<std::string> vars, int index) {
    SparsePoly p(std::move(vars));
    if (index < 0 || index >= p.nvars())
        throw std::out_of_range("variable index");
    Monomial m(p.nvars(), 0);
    m[index] = 1;
    p.add_term(m, 1);
    return p;
}

int SparsePoly::degree() const { return terms_.empty() ? -1 : total_degree(terms_.begin()->first); }

void SparsePoly::add_term(const Monomial &m, const mpq_class &coef) {
    if (static_cast<int>(m.size()) != nvars())
        throw std::invalid_argument("monomial length does not match variable count");
    mpq_class c = coef; // GMP arithmetic assumes canonical form
    c.canonicalize();
    if (c == 0)
        return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        terms_.emplace(m, c);
        return;
    }
    it->second += c;
    if (it->second == 0)
        terms_.erase(it);
}

mpq_class SparsePoly::coefficient(const Monomial &m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? mpq_class(0) : it->second;
}

void SparsePoly::check_compatible(const SparsePoly &o) const {
    if (vars_ != o.vars_)
        throw std::invalid_argument("polynomials over different variables");
}

SparsePoly SparsePoly::operator+(const SparsePoly &o) const {
    check_compatible(o);
    SparsePoly r = *this;
    for (const auto &[m, c] : o.terms_)
        r.add_term(m, c);
    return r;
}

SparsePoly SparsePoly::operator-(const SparsePoly &o) const { return *this + (-o); }

SparsePoly SparsePoly::operator-() const { return scaled(-1); }

SparsePoly SparsePoly::scaled(const mpq_class &c) const {
    SparsePoly r(vars_);
    if (c == 0)
        return r;
    for (const auto &[m, v] : terms_)
        r.terms_.emplace(m, v * c);
    return r;
}

SparsePoly SparsePoly::operator*(const SparsePoly &o) const {
    check_compatible(o);
    SparsePoly r(vars_);
    Monomial m(nvars());
    for (const auto &[ma, ca] : terms_)
        for (const auto &[mb, cb] : o.terms_) {
            for (int i = 0; i < nvars(); ++i)
                m[i] = ma[i] + mb[i];
            r.add_term(m, ca * cb);
        }
    return r;
}

SparsePoly SparsePoly::pow(int k) const {
    SparsePoly r = constant(vars_, 1);
    for (int i = 0; i < k; ++i)
        r = r * *this;
    return r;
}

mpq_class SparsePoly::max_abs_coefficient() const {
    mpq_class best = 0;
    for (const auto &[m, c] : terms_)
        if (abs(c) > best)
            best = abs(c);
    return best;
}

std::string SparsePoly::to_string() const {
    std::ostringstream os;
    os << "vars";
    for (const auto &v : vars_)
        os << ' ' << v;
    os << '\n';
    for (const auto &[m, c] : terms_) {
        os << c.get_str();
        bool first = true;
        for (int i = 0; i < nvars(); ++i) {
            if (m[i] == 0)
                continue;
            os << (first ? " * " : " ") << vars_[i];
            if (m[i] != 1)
                os << '^' << m[i];
            first = false;
        }
        os << '\n';
    }
    return os.str();
}

SparsePoly SparsePoly::parse(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("empty polynomial text");
    std::istringstream hs(line);
    std::string tag;
    hs >> tag;
    if (tag != "vars")
        throw std::invalid_argument("polynomial header must start with 'vars'");
    std::vector<std::string> vars;
    for (std::string v; hs >> v;)
        vars.push_back(v);
    SparsePoly p(vars);
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string coeff;
        if (!(ls >> coeff))
            continue;
        mpq_class c;
        if (c.set_str(coeff, 10) != 0)
            throw std::invalid_argument("bad coefficient on line " + std::to_string(lineno));
        c.canonicalize();
        Monomial m(vars.size(), 0);
        std::string tok;
        if (ls >> tok) {
            if (tok != "*")
                throw std::invalid_argument("expected '*' on line " + std::to_string(lineno));
            while (ls >> tok) {
                auto caret = tok.find('^');
                std::string name = tok.substr(0, caret);
                int e = caret == std::string::npos ? 1 : std::stoi(tok.substr(caret + 1));
                auto it = std::find(vars.begin(), vars.end(), name);
                if (it == vars.end())
                    throw std::invalid_argument("unknown variable '" + name + "' on line " + std::to_string(lineno));
                m[it - vars.begin()] += e;
            }
        }
        p.add_term(m, c);
    }
    return p;
}

static void check_point(const SparsePoly &p, std::size_t n) {
    if (static_cast<int>(n) != p.nvars())
        throw std::invalid_argument("point dimension does not match variable count");
}

mpq_class eval_exact(const SparsePoly &p, const std::vector<mpq_class> &point) {
    check_point(p, point.size());
    mpq_class sum = 0, term;
    for (const auto &[m, c] : p.terms()) {
        term = c;
        for (int i = 0; i < p.nvars(); ++i)
            for (int k = 0; k < m[i]; ++k)
                term *= point[i];
        sum += term;
    }
    return sum;
}

template <typename Scalar> static Scalar ipow(Scalar x, int k) {
    Scalar r(1);
    for (int i = 0; i < k; ++i)
        r *= x;
    return r;
}

template <typename Scalar> Scalar eval(const SparsePoly &p, const std::vector<Scalar> &point) {
    check_point(p, point.size());
    Scalar sum(0);
    for (const auto &[m, c] : p.terms()) {
        Scalar term(c.get_d());
        for (int i = 0; i < p.nvars(); ++i)
            term *= ipow(point[i], m[i]);
        sum += term;
    }
    return sum;
}
template double eval<double>(const SparsePoly &, const std::vector<double> &);
template std::complex<double> eval<std::complex<double>>(const SparsePoly &, const std::vector<std::complex<double>> &);

double eval_float(const SparsePoly &p, const std::vector<double> &point) { return eval(p, point); }

std::complex<double> eval_complex(const SparsePoly &p, const std::vector<std::complex<double>> &point) {
    return eval(p, point);
}

double abs_term_sum(const SparsePoly &p, const std::vector<std::complex<double>> &point) {
    check_point(p, point.size());
    double s = 0;
    for (const auto &[m, c] : p.terms()) {
        double t = std::abs(c.get_d());
        for (int i = 0; i < p.nvars(); ++i)
            t *= std::pow(std::abs(point[i]), m[i]);
        s += t;
    }
    return s;
}

SparsePoly partial(const SparsePoly &p, int var_index) {
    if (var_index < 0 || var_index >= p.nvars())
        throw std::out_of_range("partial: variable index");
    SparsePoly r(p.variables());
    for (const auto &[m, c] : p.terms()) {
        if (m[var_index] == 0)
            continue;
        Monomial d = m;
        d[var_index] -= 1;
        r.add_term(d, c * m[var_index]);
    }
    return r;
}

std::vector<SparsePoly> gradient(const SparsePoly &p) {
    std::vector<SparsePoly> g;
    for (int i = 0; i < p.nvars(); ++i)
        g.push_back(partial(p, i));
    return g;
}

SparsePoly halve_exponents(const SparsePoly &p, std::vector<std::string> new_vars) {
    if (static_cast<int>(new_vars.size()) != p.nvars())
        throw std::invalid_argument("halve_exponents: variable count");
    SparsePoly r(std::move(new_vars));
    for (const auto &[m, c] : p.terms()) {
        Monomial h(m.size());
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (m[i] % 2)
                throw std::invalid_argument("halve_exponents: odd exponent");
            h[i] = m[i] / 2;
        }
        r.add_term(h, c);
    }
    return r;
}

static void enumerate(int nvars, int degree, int step, Monomial &cur, int pos, int remaining,
                      std::vector<Monomial> &out) {
    if (pos == nvars - 1) {
        if (remaining % step == 0) {
            cur[pos] = remaining;
            out.push_back(cur);
        }
        return;
    }
    for (int e = remaining; e >= 0; e -= 1) {
        if (e % step)
            continue;
        cur[pos] = e;
        enumerate(nvars, degree, step, cur, pos + 1, remaining - e, out);
    }
}

std::vector<Monomial> monomial_basis(int nvars, int max_degree, bool even_only) {
    if (nvars < 1 || max_degree < 0)
        throw std::invalid_argument("monomial_basis: nvars >= 1 and max_degree >= 0 required");
    std::vector<Monomial> out;
    const int step = even_only ? 2 : 1;
    for (int d = max_degree; d >= 0; --d) {
        if (d % step)
            continue;
        Monomial cur(nvars, 0);
        enumerate(nvars, d, step, cur, 0, d, out);
    }
    // enumeration already yields grlex (descending) order; ensure it explicitly
    std::sort(out.begin(), out.end(), GrlexOrder{});
    return out;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> monomial_row(const std::vector<Monomial> &basis,
                                                      const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> &x) {
    const int n = static_cast<int>(x.size());
    int maxe = 0;
    for (const auto &m : basis)
        for (int e : m)
            maxe = std::max(maxe, e);
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> pw(n, maxe + 1);
    for (int i = 0; i < n; ++i) {
        pw(i, 0) = Scalar(1);
        for (int k = 1; k <= maxe; ++k)
            pw(i, k) = pw(i, k - 1) * x(i);
    }
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> row(basis.size());
    for (std::size_t j = 0; j < basis.size(); ++j) {
        Scalar v(1);
        for (int i = 0; i < n; ++i)
            v *= pw(i, basis[j][i]);
        row(j) = v;
    }
    return row;
}
template Eigen::VectorXd monomial_row<double>(const std::vector<Monomial> &, const Eigen::VectorXd &);
template Eigen::VectorXcd monomial_row<std::complex<double>>(const std::vector<Monomial> &, const Eigen::VectorXcd &);

namespace {

struct Rows {
    std::vector<Eigen::VectorXd> train, test;
};

void push_rows(std::vector<Eigen::VectorXd> &dst, const Eigen::VectorXcd &row) {
    for (const Eigen::VectorXd &r : {Eigen::VectorXd(row.real()), Eigen::VectorXd(row.imag())}) {
        const double n = r.norm();
        if (n > 1e-300 && (r.norm() > 1e-14 * row.norm()))
            dst.push_back(r / n);
    }
}

ImplicitSurfaceModel fit_rows(const Rows &rows, const std::vector<Monomial> &basis, int nsamples,
                              double ambiguity_ratio) {
    const int ncols = static_cast<int>(basis.size());
    if (static_cast<int>(rows.train.size()) < 2 * ncols)
        throw std::invalid_argument("fit_implicit: need at least twice as many sample rows as basis monomials (" +
                                    std::to_string(rows.train.size()) + " < 2*" + std::to_string(ncols) + ")");
    Eigen::MatrixXd A(rows.train.size(), ncols);
    for (std::size_t i = 0; i < rows.train.size(); ++i)
        A.row(i) = rows.train[i].transpose();
    // column equilibration; undone on the singular vector
    Eigen::VectorXd cn = A.colwise().norm().transpose();
    for (int j = 0; j < ncols; ++j)
        if (cn(j) < 1e-300)
            cn(j) = 1;
    A = A * cn.cwiseInverse().asDiagonal();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinV);
    const auto &s = svd.singularValues();
    ImplicitSurfaceModel m;
    m.basis = basis;
    m.sample_count = nsamples;
    m.sigma_max = s(0);
    m.sigma_min = s(ncols - 1);
    m.sigma_next = ncols >= 2 ? s(ncols - 2) : s(0);
    Eigen::VectorXd c = svd.matrixV().col(ncols - 1).cwiseQuotient(cn);
    c.normalize();
    // deterministic sign: largest-magnitude coefficient positive
    Eigen::Index imax;
    c.cwiseAbs().maxCoeff(&imax);
    if (c(imax) < 0)
        c = -c;
    m.coefficients = c;
    if (ncols >= 2 && m.gap() < ambiguity_ratio)
        throw FitAmbiguity("fit_implicit: singular-value gap " + std::to_string(m.gap()) + " below " +
                               std::to_string(ambiguity_ratio) + " (sample cloud lies on several surfaces)",
                           m.gap());
    const auto &eval_rows = rows.test.empty() ? rows.train : rows.test;
    double ss = 0, mx = 0;
    for (const auto &r : eval_rows) {
        const double v = std::abs(r.dot(c));
        ss += v * v;
        mx = std::max(mx, v);
    }
    m.rms_residual = std::sqrt(ss / eval_rows.size());
    m.max_residual = mx;
    return m;
}

} // namespace

ImplicitSurfaceModel fit_implicit(const std::vector<Eigen::VectorXcd> &samples, const std::vector<Monomial> &basis,
                                  double ambiguity_ratio) {
    Rows rows;
    for (std::size_t i = 0; i < samples.size(); ++i)
        push_rows(i % 5 == 4 ? rows.test : rows.train, monomial_row<std::complex<double>>(basis, samples[i]));
    return fit_rows(rows, basis, static_cast<int>(samples.size()), ambiguity_ratio);
}

ImplicitSurfaceModel fit_implicit(const std::vector<Eigen::VectorXd> &samples, const std::vector<Monomial> &basis,
                                  double ambiguity_ratio) {
    std::vector<Eigen::VectorXcd> cs;
    cs.reserve(samples.size());
    for (const auto &s : samples)
        cs.push_back(s.cast<std::complex<double>>());
    return fit_implicit(cs, basis, ambiguity_ratio);
}

template <typename Scalar>
PolyJet<Scalar> model_jet(const std::vector<Monomial> &basis, const Eigen::VectorXd &coeffs,
                          const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> &x) {
    const int n = static_cast<int>(x.size());
    PolyJet<Scalar> jet;
    jet.value = Scalar(0);
    jet.grad = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n);
    jet.hess = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
    auto mono = [&](const Monomial &m) {
        Scalar v(1);
        for (int i = 0; i < n; ++i)
            v *= ipow(x(i), m[i]);
        return v;
    };
    for (std::size_t t = 0; t < basis.size(); ++t) {
        const double c = coeffs(t);
        if (c == 0)
            continue;
        const Monomial &m = basis[t];
        const Scalar mv = mono(m);
        jet.value += c * mv;
        jet.abs_terms += std::abs(c * mv);
        for (int k = 0; k < n; ++k) {
            if (m[k] == 0)
                continue;
            Monomial mk = m;
            mk[k] -= 1;
            jet.grad(k) += c * double(m[k]) * mono(mk);
            for (int l = 0; l < n; ++l) {
                if (mk[l] == 0)
                    continue;
                Monomial mkl = mk;
                mkl[l] -= 1;
                jet.hess(k, l) += c * double(m[k]) * double(mk[l]) * mono(mkl);
            }
        }
    }
    return jet;
}
template PolyJet<double> model_jet<double>(const std::vector<Monomial> &, const Eigen::VectorXd &,
                                           const Eigen::VectorXd &);
template PolyJet<std::complex<double>> model_jet<std::complex<double>>(const std::vector<Monomial> &,
                                                                       const Eigen::VectorXd &,
                                                                       const Eigen::VectorXcd &);

PolyJet<std::complex<double>> poly_jet(const SparsePoly &p, const Eigen::VectorXcd &x) {
    std::vector<Monomial> basis;
    Eigen::VectorXd c(p.terms().size());
    int i = 0;
    for (const auto &[m, v] : p.terms()) {
        basis.push_back(m);
        c(i++) = v.get_d();
    }
    return model_jet<std::complex<double>>(basis, c, x);
}

SparsePoly model_to_poly(const ImplicitSurfaceModel &m, std::vector<std::string> vars) {
    SparsePoly p(std::move(vars));
    for (std::size_t i = 0; i < m.basis.size(); ++i)
        p.add_term(m.basis[i], mpq_class(m.coefficients(i)));
    return p;
}

} // namespace p3pstrat
