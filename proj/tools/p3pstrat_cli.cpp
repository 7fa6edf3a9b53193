// p3pstrat command line: solve, classify, morley, sweep, deltoid fit, verify, dump-fixtures.
#include "p3pstrat/acceptance.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace p3pstrat;

namespace {

Eigen::Vector3d parse_vec3(const std::string &s) {
    std::stringstream ss(s);
    std::string item;
    Eigen::Vector3d v;
    int i = 0;
    while (std::getline(ss, item, ',')) {
        if (i >= 3)
            throw CLI::ValidationError("expected x,y,z");
        v(i++) = parse_rational(json(item), "coordinate").get_d();
    }
    if (i != 3)
        throw CLI::ValidationError("expected x,y,z");
    return v;
}

struct SceneArgs {
    std::string sides, scene, center;

    void add(CLI::App *app) {
        app->add_option("--sides", sides, "side lengths s12,s13,s23 (\"sqrt2\" allowed) or a fixture name");
        app->add_option("--scene", scene, "scene JSON file");
        app->add_option("--center", center, "camera center x,y,z");
    }
    Scene load() const {
        Scene sc;
        if (!scene.empty())
            sc = ingest_scene(scene);
        else if (!sides.empty())
            sc.triangle = parse_sides(sides);
        else
            throw CLI::ValidationError("give --sides or --scene");
        if (!center.empty())
            sc.centers.push_back(parse_vec3(center));
        return sc;
    }
};

std::ostream &out_stream(const std::string &path, std::ofstream &file) {
    if (path.empty() || path == "-")
        return std::cout;
    file.open(path);
    if (!file)
        throw std::runtime_error("cannot write " + path);
    return file;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Singular P3P configurations: solver, multiplicity, strata and the deltoidal surface"};
    app.require_subcommand(1);
    std::string config;
    app.add_option("--config", config, std::string("tolerance config JSON (else $") + kToleranceEnv + ")");

    SceneArgs solve_args, classify_args;
    auto *solve_cmd = app.add_subcommand("solve", "all roots of the distance system for a camera center");
    solve_args.add(solve_cmd);

    bool classify_json = false;
    auto *classify_cmd = app.add_subcommand("classify", "stratum of each camera center");
    classify_args.add(classify_cmd);
    classify_cmd->add_flag("--json", classify_json, "JSON output");

    std::string morley_sides;
    auto *morley_cmd = app.add_subcommand("morley", "Morley triangle and the triple-root generatrices");
    morley_cmd->add_option("--sides", morley_sides)->required();

    std::string sweep_sides, sweep_out;
    SweepConfig sweep_cfg;
    double h_min_r = 0.1, h_max_r = 3.0;
    auto *sweep_cmd = app.add_subcommand("sweep", "complementary solutions over a cylinder grid (CSV)");
    sweep_cmd->add_option("--sides", sweep_sides)->required();
    sweep_cmd->add_option("--theta-samples", sweep_cfg.theta_samples)->capture_default_str();
    sweep_cmd->add_option("--height-samples", sweep_cfg.height_samples)->capture_default_str();
    sweep_cmd->add_option("--h-min", h_min_r, "lowest height, in circumradii")->capture_default_str();
    sweep_cmd->add_option("--h-max", h_max_r, "highest height, in circumradii")->capture_default_str();
    sweep_cmd->add_option("--theta-offset", sweep_cfg.theta_offset, "grid shift in angular steps");
    sweep_cmd->add_flag("--morley", sweep_cfg.include_morley, "add the Morley generatrices");
    sweep_cmd->add_option("-o,--out", sweep_out, "CSV path (default stdout)");

    auto *deltoid_cmd = app.add_subcommand("deltoid", "complementary surface");
    deltoid_cmd->require_subcommand(1);
    std::string fit_sides, fit_space = "e", fit_out, fit_report;
    int fit_degree = 0, fit_theta = 64, fit_height = 8;
    auto *fit_cmd = deltoid_cmd->add_subcommand("fit", "implicit fit of the complementary surface");
    fit_cmd->add_option("--sides", fit_sides)->required();
    fit_cmd->add_option("--space", fit_space, "e (distances, degree 16) or xyz (centers, degree 12)")
        ->check(CLI::IsMember({"e", "xyz"}));
    fit_cmd->add_option("--degree", fit_degree, "basis degree (default by space)");
    fit_cmd->add_option("--theta-samples", fit_theta)->capture_default_str();
    fit_cmd->add_option("--height-samples", fit_height)->capture_default_str();
    fit_cmd->add_option("-o,--out", fit_out, "polynomial text output (default stdout)");
    fit_cmd->add_option("--report", fit_report, "JSON residual report path");

    std::string suite = "all", verify_report;
    std::vector<std::string> verify_triangles;
    std::uint64_t seed = AcceptanceOptions{}.seed;
    bool verbose = false;
    auto *verify_cmd = app.add_subcommand("verify", "run acceptance checks");
    verify_cmd->add_option("--suite", suite, "all, strata, deltoid, p3p, c1..c9")->capture_default_str();
    verify_cmd->add_option("--triangle", verify_triangles, "restrict to fixture triangles (name or sides)");
    verify_cmd->add_option("--seed", seed)->capture_default_str();
    verify_cmd->add_option("--report", verify_report, "JSON report path");
    verify_cmd->add_flag("-v,--verbose", verbose);

    auto *dump_cmd = app.add_subcommand("dump-fixtures", "the reference triangles and their components (JSON)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e);
    }

    try {
        const Tolerances tol = load_tolerances(config.empty() ? std::nullopt : std::optional<std::string>(config));

        if (*solve_cmd) {
            const Scene sc = solve_args.load();
            if (sc.centers.empty())
                throw CLI::ValidationError("solve needs a camera center (--center or scene centers)");
            json out = json::array();
            for (const auto &O : sc.centers) {
                const P3PInstance inst = instance_from_center(sc.triangle, O);
                json j{{"center", to_json(O)}, {"cosines", {inst.c12, inst.c13, inst.c23}}};
                try {
                    json sols = json::array();
                    for (const auto &s : solve(inst))
                        sols.push_back(to_json(s));
                    j["solutions"] = sols;
                } catch (const ContinuumDetected &c) {
                    json samples = json::array();
                    for (const auto &s : c.samples)
                        samples.push_back(to_json(s));
                    j["continuum"] = true;
                    j["samples"] = samples;
                }
                out.push_back(j);
            }
            std::cout << out.dump(2) << "\n";
            return 0;
        }

        if (*classify_cmd) {
            const Scene sc = classify_args.load();
            if (sc.centers.empty())
                throw CLI::ValidationError("classify needs a camera center (--center or scene centers)");
            json out = json::array();
            for (const auto &O : sc.centers) {
                const Classification c = classify(sc.triangle, O, tol);
                if (classify_json) {
                    json j = to_json(c);
                    j["center"] = to_json(O);
                    out.push_back(j);
                } else {
                    std::cout << O.transpose() << ": " << to_string(c.label) << " (" << c.reason << ")";
                    if (c.report.mu)
                        std::cout << ", mu " << *c.report.mu;
                    std::cout << "\n";
                }
            }
            if (classify_json)
                std::cout << out.dump(2) << "\n";
            return 0;
        }

        if (*morley_cmd) {
            std::cout << to_json(morley_angles(parse_sides(morley_sides), tol)).dump(2) << "\n";
            return 0;
        }

        if (*sweep_cmd) {
            sweep_cfg.triangle = parse_sides(sweep_sides);
            sweep_cfg.tol = tol;
            const double R = circumcircle_data(sweep_cfg.triangle).R;
            sweep_cfg.h_min = h_min_r * R;
            sweep_cfg.h_max = h_max_r * R;
            const SweepResult res = sweep_cylinder(sweep_cfg);
            std::ofstream file;
            std::ostream &os = out_stream(sweep_out, file);
            os << std::setprecision(17);
            os << "theta,h,Ox,Oy,Oz,mu,branch_index,e1p,e2p,e3p,Opx,Opy,Opz,on_generatrix\n";
            auto cplx = [](std::complex<double> z) {
                std::ostringstream s;
                s << std::setprecision(17) << z.real();
                if (z.imag() != 0)
                    s << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
                return s.str();
            };
            for (const auto &r : res.records) {
                const Eigen::Vector3cd &e = r.complement_e.e;
                auto row = [&](const std::string &op) {
                    os << r.theta << "," << r.h << "," << r.source_center.x() << "," << r.source_center.y() << ","
                       << r.source_center.z() << "," << r.source_mu << "," << r.branch_index << "," << cplx(e(0))
                       << "," << cplx(e(1)) << "," << cplx(e(2)) << "," << op << "," << (r.on_morley_generatrix ? 1 : 0)
                       << "\n";
                };
                if (r.complement_centers.empty())
                    row(",,");
                for (const auto &c : r.complement_centers) {
                    std::ostringstream s;
                    s << std::setprecision(17) << c.x() << "," << c.y() << "," << c.z();
                    row(s.str());
                }
            }
            for (const auto &f : res.failures)
                std::cerr << "warning: " << f << "\n";
            return 0;
        }

        if (*fit_cmd) {
            SweepConfig cfg;
            cfg.triangle = parse_sides(fit_sides);
            cfg.tol = tol;
            const double R = circumcircle_data(cfg.triangle).R;
            cfg.theta_samples = fit_theta;
            cfg.height_samples = fit_height;
            cfg.h_min = 0.1 * R;
            cfg.h_max = 3 * R;
            cfg.theta_offset = 0.37;
            const SweepResult res = sweep_cylinder(cfg);
            const bool xyz = fit_space == "xyz";
            const int degree = fit_degree > 0 ? fit_degree : (xyz ? 12 : 16);
            const FittedSurface fs = xyz ? fit_deltoid_xyz(cfg.triangle, res.records, degree, tol.fit_residual)
                                         : fit_deltoid_e(cfg.triangle, res.records, degree);
            const std::vector<std::string> vars =
                xyz ? std::vector<std::string>{"X", "Y", "Z"} : std::vector<std::string>{"e1p", "e2p", "e3p"};
            std::ofstream file;
            out_stream(fit_out, file) << model_to_poly(fs.model, vars).to_string();
            json rep{{"space", fit_space},
                     {"degree", degree},
                     {"basis", fs.basis_kind},
                     {"basis_size", fs.model.basis.size()},
                     {"samples", fs.model.sample_count},
                     {"rms_residual", fs.model.rms_residual},
                     {"max_residual", fs.model.max_residual},
                     {"sigma_min", fs.model.sigma_min},
                     {"sigma_next", fs.model.sigma_next},
                     {"offset", to_json(fs.offset)},
                     {"scale", fs.scale},
                     {"attempts", fs.attempts}};
            if (fit_report.empty())
                std::cerr << rep.dump(2) << "\n";
            else
                std::ofstream(fit_report) << rep.dump(2) << "\n";
            return 0;
        }

        if (*verify_cmd) {
            try {
                suite_criteria(suite);
            } catch (const UnknownSuite &e) {
                std::cerr << e.what() << "\n";
                return 2;
            }
            AcceptanceOptions opt;
            opt.tol = tol;
            opt.seed = seed;
            opt.triangles = verify_triangles;
            const RunReport rep = run_verify(suite, opt);
            for (const auto &c : rep.checks) {
                std::cout << summary_line(c) << "\n";
                if (verbose || !c.passed)
                    for (const auto &d : c.details)
                        std::cout << "      " << d << "\n";
            }
            if (!verify_report.empty())
                std::ofstream(verify_report) << rep.to_json().dump(2) << "\n";
            return rep.passed() ? 0 : 1;
        }

        if (*dump_cmd) {
            json out = json::array();
            for (const auto &f : load_fixtures()) {
                json comps = json::array();
                for (const auto &c : f.components)
                    comps.push_back({{"name", c.name}, {"trivial", c.trivial}, {"poly", c.poly.to_string()}});
                json lead = json::array();
                for (std::size_t k = 0; k < f.leading_monomials.size(); ++k)
                    lead.push_back({{"monomial", f.leading_monomials[k]}, {"coefficient", f.leading_coefficients[k]}});
                out.push_back({{"name", f.name},
                               {"sides", f.sides_label},
                               {"squared_sides", {f.triangle.sq[0].get_str(), f.triangle.sq[1].get_str(),
                                                  f.triangle.sq[2].get_str()}},
                               {"components", comps},
                               {"degree16_leading_terms", lead}});
            }
            std::cout << out.dump(2) << "\n";
            return 0;
        }
    } catch (const CLI::Error &e) {
        return app.exit(e);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
