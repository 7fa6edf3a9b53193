// The seven reference triangles and the displayed components of the radical of the
// complementary elimination ideal, transcribed term by term.
#include "p3pstrat/harness.hpp"

#include <tuple>

namespace p3pstrat {

namespace {

const std::vector<std::string> kVars = {"e1p", "e2p", "e3p"};

using Term = std::tuple<long long, int, int, int>;

SparsePoly poly(std::initializer_list<Term> terms) {
    SparsePoly p(kVars);
    for (const auto &[c, a, b, d] : terms)
        p.add_term({a, b, d}, mpq_class(static_cast<long>(c)));
    return p;
}

// a x_i^2 -/+ b x_i x_j + a x_j^2 - c, both sign variants.
void quadric_pair(std::vector<Component> &out, int i, int j, long long a, long long b, long long c) {
    for (int sgn : {-1, 1}) {
        SparsePoly p(kVars);
        Monomial mi(3, 0), mj(3, 0), mij(3, 0);
        mi[i] = 2;
        mj[j] = 2;
        mij[i] = mij[j] = 1;
        p.add_term(mi, mpq_class(static_cast<long>(a)));
        p.add_term(mj, mpq_class(static_cast<long>(a)));
        p.add_term(mij, mpq_class(static_cast<long>(sgn * b)));
        p.add_term({0, 0, 0}, mpq_class(static_cast<long>(-c)));
        const std::string name = "quadric_" + std::to_string(i + 1) + std::to_string(j + 1) + (sgn < 0 ? "_minus" : "_plus");
        out.push_back({name, p, false});
    }
}

void add_trivial(std::vector<Component> &out) {
    for (int i = 0; i < 3; ++i)
        out.push_back({"trivial_e" + std::to_string(i + 1) + "p", SparsePoly::variable(kVars, i), true});
}

const std::vector<Monomial> kLeading = {{8, 8, 0}, {8, 6, 2}, {8, 4, 4}, {8, 2, 6}, {8, 0, 8}};

std::vector<FixtureTriangle> build() {
    std::vector<FixtureTriangle> fx;

    {
        FixtureTriangle f{"equilateral", "1,1,1", make_triangle(1, 1, 1), {}, kLeading, {3, -6, 9, -6, 3}};
        add_trivial(f.components);
        quadric_pair(f.components, 0, 1, 1, 1, 1);
        quadric_pair(f.components, 0, 2, 1, 1, 1);
        quadric_pair(f.components, 1, 2, 1, 1, 1);
        f.components.push_back({"quartic",
                                poly({{1, 4, 0, 0}, {-1, 2, 2, 0}, {-1, 2, 0, 2}, {1, 0, 4, 0}, {-1, 0, 2, 2},
                                      {1, 0, 0, 4}, {-1, 0, 0, 0}}),
                                false});
        fx.push_back(std::move(f));
    }
    {
        FixtureTriangle f{"isosceles_right", "sqrt2,1,1", make_triangle_sq(2, 1, 1), {}, kLeading, {4, -8, 8, -4, 1}};
        add_trivial(f.components);
        f.components.push_back({"quadric_12", poly({{1, 2, 0, 0}, {1, 0, 2, 0}, {-2, 0, 0, 0}}), false});
        f.components.push_back(
            {"quartic_13", poly({{1, 4, 0, 0}, {1, 0, 0, 4}, {-2, 2, 0, 0}, {-2, 0, 0, 2}, {1, 0, 0, 0}}), false});
        f.components.push_back(
            {"quartic_23", poly({{1, 0, 4, 0}, {1, 0, 0, 4}, {-2, 0, 2, 0}, {-2, 0, 0, 2}, {1, 0, 0, 0}}), false});
        f.components.push_back({"quartic",
                                poly({{1, 4, 0, 0}, {-2, 2, 0, 2}, {1, 0, 4, 0}, {-2, 0, 2, 2}, {2, 0, 0, 4},
                                      {-2, 0, 0, 0}}),
                                false});
        fx.push_back(std::move(f));
    }
    {
        FixtureTriangle f{"isosceles_acute", "4,3,3", make_triangle(4, 3, 3), {}, kLeading, {1280, -2560, 2720, -1440, 405}};
        add_trivial(f.components);
        quadric_pair(f.components, 0, 1, 9, 2, 144);
        quadric_pair(f.components, 0, 2, 3, 4, 27);
        quadric_pair(f.components, 1, 2, 3, 4, 27);
        f.components.push_back({"quartic",
                                poly({{9, 4, 0, 0}, {-2, 2, 2, 0}, {-16, 2, 0, 2}, {9, 0, 4, 0}, {-16, 0, 2, 2},
                                      {16, 0, 0, 4}, {-1296, 0, 0, 0}}),
                                false});
        fx.push_back(std::move(f));
    }
    {
        FixtureTriangle f{"isosceles_obtuse", "5,3,3", make_triangle(5, 3, 3), {}, kLeading, {6875, -13750, 11825, -4950, 891}};
        add_trivial(f.components);
        quadric_pair(f.components, 0, 1, 9, 7, 225);
        quadric_pair(f.components, 0, 2, 3, 5, 27);
        quadric_pair(f.components, 1, 2, 3, 5, 27);
        f.components.push_back({"quartic",
                                poly({{9, 4, 0, 0}, {7, 2, 2, 0}, {-25, 2, 0, 2}, {9, 0, 4, 0}, {-25, 0, 2, 2},
                                      {25, 0, 0, 4}, {-2025, 0, 0, 0}}),
                                false});
        fx.push_back(std::move(f));
    }
    {
        FixtureTriangle f{"general_right", "5,4,3", make_triangle(5, 4, 3), {}, kLeading, {625, -1600, 1824, -1024, 256}};
        add_trivial(f.components);
        f.components.push_back({"quadric_12", poly({{1, 2, 0, 0}, {1, 0, 2, 0}, {-25, 0, 0, 0}}), false});
        quadric_pair(f.components, 0, 2, 5, 6, 80);
        quadric_pair(f.components, 1, 2, 5, 8, 45);
        f.components.push_back({"quartic",
                                poly({{9, 4, 0, 0}, {-18, 2, 0, 2}, {16, 0, 4, 0}, {-32, 0, 2, 2}, {25, 0, 0, 4},
                                      {-3600, 0, 0, 0}}),
                                false});
        fx.push_back(std::move(f));
    }
    {
        FixtureTriangle f{"general_obtuse", "7,5,3", make_triangle(7, 5, 3), {}, kLeading, {7203, -19110, 20025, -9750, 1875}};
        add_trivial(f.components);
        quadric_pair(f.components, 0, 1, 1, 1, 49);
        quadric_pair(f.components, 0, 2, 7, 11, 175);
        quadric_pair(f.components, 1, 2, 7, 13, 63);
        f.components.push_back({"quartic",
                                poly({{9, 4, 0, 0}, {15, 2, 2, 0}, {-33, 2, 0, 2}, {25, 0, 4, 0}, {-65, 0, 2, 2},
                                      {49, 0, 0, 4}, {-11025, 0, 0, 0}}),
                                false});
        fx.push_back(std::move(f));
    }
    {
        FixtureTriangle f{"general_acute", "7,6,5", make_triangle(7, 6, 5), {}, kLeading, {57624, -141120, 171072, -103680, 31104}};
        add_trivial(f.components);
        quadric_pair(f.components, 0, 1, 5, 2, 245);
        quadric_pair(f.components, 0, 2, 35, 38, 1260);
        quadric_pair(f.components, 1, 2, 7, 10, 175);
        f.components.push_back({"quartic",
                                poly({{25, 4, 0, 0}, {-12, 2, 2, 0}, {-38, 2, 0, 2}, {36, 0, 4, 0}, {-60, 0, 2, 2},
                                      {49, 0, 0, 4}, {-44100, 0, 0, 0}}),
                                false});
        fx.push_back(std::move(f));
    }
    return fx;
}

} // namespace

const std::vector<FixtureTriangle> &load_fixtures() {
    static const std::vector<FixtureTriangle> fx = build();
    return fx;
}

const FixtureTriangle *find_fixture(const std::string &key) {
    for (const auto &f : load_fixtures())
        if (f.name == key || f.sides_label == key)
            return &f;
    return nullptr;
}

} // namespace p3pstrat
