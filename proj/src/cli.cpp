#include "sobtrace/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sobtrace/assembly.hpp"
#include "sobtrace/besov_set.hpp"
#include "sobtrace/json_io.hpp"
#include "sobtrace/oracle.hpp"
#include "sobtrace/quadrature.hpp"

namespace sobtrace {

namespace {

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw InvalidInput("malformed JSON in '" + path + "': " + e.what());
    }
    return j;
}

void write_text(const std::string& path, const std::string& text,
                std::ostream& fallback) {
    if (path.empty()) {
        fallback << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write '" + path + "'");
    out << text;
}

Config load_config(const std::string& explicit_path) {
    std::string path = explicit_path;
    if (path.empty()) {
        if (const char* env = std::getenv("SOBTRACE_CONFIG")) path = env;
    }
    Config cfg;
    if (!path.empty()) cfg = config_from_json(load_json(path), cfg);
    return cfg;
}

json decomposition_summary(const CZDecomposition& d) {
    return json{{"leaves", d.leaf_count()},
                {"keystones", d.keystone_count()},
                {"trivial", d.trivial()},
                {"root_side", d.root.side},
                {"decay_constant", d.decay_constant}};
}

std::string field_csv(const Field2D& F, const Square& box, int n) {
    std::ostringstream os;
    os << "x,y,value\n";
    const double h = box.side / (n - 1);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double x = box.xmin() + i * h, y = box.ymin() + j * h;
            os << format_double(x) << ',' << format_double(y) << ','
               << format_double(F.value({x, y})) << '\n';
        }
    return os.str();
}

struct CommonOpts {
    std::string input, output, config;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_input = true) {
    auto* in = cmd->add_option("-i,--input", o.input, "instance JSON file");
    if (needs_input) in->required();
    cmd->add_option("-o,--output", o.output, "output file (stdout if omitted)");
    cmd->add_option("--config", o.config, "config JSON file");
}

int dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
    CLI::App app{"Sobolev trace-norm extension toolkit"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string csv_path, profile_path;
    int grid_n = 64;
    double box_side = 0.0;

    auto* c_dec = app.add_subcommand("decompose", "build the CZ quadtree");
    add_common(c_dec, o);
    c_dec->add_option("--csv", csv_path, "square outlines CSV");

    auto* c_set = app.add_subcommand("set-seminorm",
                                     "Besov seminorm estimate of a point set");
    add_common(c_set, o);
    c_set->add_option("--profile", profile_path, "per-angle profile CSV");

    auto* c_tr = app.add_subcommand("trace1d", "1D Besov trace norm");
    add_common(c_tr, o);

    auto* c_loc = app.add_subcommand("local-extend", "local modified extension");
    add_common(c_loc, o);
    c_loc->add_option("--field-csv", csv_path, "sampled field CSV");
    c_loc->add_option("--grid", grid_n, "samples per side for the CSV");

    auto* c_jets = app.add_subcommand("jets", "optimal keystone Whitney field");
    add_common(c_jets, o);

    auto* c_ext = app.add_subcommand("extend", "global extension and M(f)");
    add_common(c_ext, o);

    auto* c_eval = app.add_subcommand("eval", "sample the extension on a grid");
    add_common(c_eval, o);
    c_eval->add_option("--grid", grid_n, "samples per side");
    c_eval->add_option("--box-side", box_side,
                       "sampling box side (default: data box doubled)");

    auto* c_or = app.add_subcommand("oracle", "run a variational oracle");
    add_common(c_or, o);

    auto* c_cmp = app.add_subcommand("compare", "extension vs grid oracle");
    add_common(c_cmp, o);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);

    Config cfg = load_config(o.config);

    if (c_tr->parsed()) {
        json j = load_json(o.input);
        if (!j.contains("xs") || !j.contains("gs"))
            throw InvalidInput("trace1d: input needs 'xs' and 'gs'");
        Samples1D s(j["xs"].get<std::vector<double>>(),
                    j["gs"].get<std::vector<double>>(),
                    j.value("p", cfg.p));
        TraceNorm1D semi = trace_seminorm_p(s);
        TraceNorm1D full = trace_norm_full_p(s);
        json res{{"Mp", semi.Mp},
                 {"full_norm_p", full.Mp},
                 {"functionals", to_json(full)["terms"]},
                 {"inhomogeneous", to_json(full)["inhomogeneous_terms"]}};
        write_text(o.output, res.dump(2) + "\n", out);
        return 0;
    }

    if (c_set->parsed()) {
        json j = load_json(o.input);
        Instance inst = instance_from_json(j);
        SetSeminormEstimate est =
            set_seminorm(inst.points, inst.p.value_or(cfg.p), cfg.angle_count,
                         cfg.exec, !profile_path.empty());
        json res{{"value", est.value},
                 {"graph_ok", est.graph_ok},
                 {"frame", to_json(est.frame)}};
        write_text(o.output, res.dump(2) + "\n", out);
        if (!profile_path.empty()) {
            std::ostringstream os;
            os << "angle,seminorm_p\n";
            for (std::size_t a = 0; a < est.per_angle.size(); ++a)
                os << format_double(M_PI * double(a) / cfg.angle_count) << ','
                   << format_double(est.per_angle[a]) << '\n';
            write_text(profile_path, os.str(), out);
        }
        return 0;
    }

    if (c_dec->parsed()) {
        Instance inst = instance_from_json(load_json(o.input));
        Config c = cfg;
        if (inst.p) c.p = *inst.p;
        CZDecomposition d = build_decomposition(inst.points, c);
        write_text(o.output, to_json(d).dump(2) + "\n", out);
        if (!csv_path.empty()) {
            std::ostringstream os;
            os << "xmin,ymin,xmax,ymax,keystone\n";
            std::vector<char> is_ks(d.leaves.size(), 0);
            for (int k : d.keystones) is_ks[std::size_t(k)] = 1;
            for (std::size_t i = 0; i < d.leaves.size(); ++i) {
                const Square& q = d.leaves[i];
                os << format_double(q.xmin()) << ',' << format_double(q.ymin())
                   << ',' << format_double(q.xmax()) << ','
                   << format_double(q.ymax()) << ',' << int(is_ks[i]) << '\n';
            }
            write_text(csv_path, os.str(), out);
        }
        return 0;
    }

    if (c_loc->parsed()) {
        json j = load_json(o.input);
        for (const char* key : {"square", "points", "values", "x0", "L0"})
            if (!j.contains(key))
                throw InvalidInput(std::string("local-extend: missing '") + key +
                                   "'");
        Square Q = square_from_json(j["square"]);
        std::vector<Point2> pts;
        for (const json& q : j["points"]) pts.push_back(point2_from_json(q));
        std::vector<double> vals = j["values"].get<std::vector<double>>();
        Point2 x0 = point2_from_json(j["x0"]);
        AffineJet L0 = jet_from_json(j["L0"]);
        const double p = j.value("p", cfg.p);
        LocalSolution sol = local_extend(Q, pts, x0, vals, L0, p, cfg);
        json res{{"Mhat_p", sol.Mhat_p},
                 {"functional_count", sol.functionals.size()}};
        write_text(o.output, res.dump(2) + "\n", out);
        if (!csv_path.empty())
            write_text(csv_path, field_csv(*sol.field, dilate(Q, 1.2), grid_n),
                       out);
        return 0;
    }

    if (c_jets->parsed()) {
        Instance inst = instance_from_json(load_json(o.input));
        Config c = cfg;
        if (inst.p) c.p = *inst.p;
        if (inst.values.size() != inst.points.size())
            throw InvalidInput("jets: 'values' must match 'points'");
        CZDecomposition d = build_decomposition(inst.points, c);
        if (d.trivial())
            throw InvalidInput("jets: decomposition is trivial (single leaf)");
        WhitneyField lf = keystone_field(d, inst.values, c);
        write_text(o.output, to_json(lf).dump(2) + "\n", out);
        return 0;
    }

    if (c_ext->parsed() || c_eval->parsed() || c_cmp->parsed()) {
        Instance inst = instance_from_json(load_json(o.input));
        Config c = cfg;
        if (inst.p) c.p = *inst.p;
        if (inst.values.size() != inst.points.size())
            throw InvalidInput("extend: 'values' must match 'points'");
        Extension ext = extend(inst.values, inst.points, c);

        if (c_eval->parsed()) {
            double lo_x = 0, hi_x = 0, lo_y = 0, hi_y = 0;
            for (const Point2& q : inst.points) {
                lo_x = std::min(lo_x, q.x);
                hi_x = std::max(hi_x, q.x);
                lo_y = std::min(lo_y, q.y);
                hi_y = std::max(hi_y, q.y);
            }
            double side = box_side > 0
                              ? box_side
                              : 2.0 * std::max({hi_x - lo_x, hi_y - lo_y, 1.0});
            Square box({(lo_x + hi_x) / 2, (lo_y + hi_y) / 2}, side);
            write_text(o.output, field_csv(*ext.field, box, grid_n), out);
            return 0;
        }

        json report = json::array();
        for (const auto& [label, v] : ext.functional_report)
            report.push_back(json{{"label", label}, {"value", v}});
        json res{{"M_p", ext.M_p},
                 {"Mhat_p", ext.Mhat_p},
                 {"functional_count", ext.functional_count},
                 {"decomposition", decomposition_summary(*ext.decomp)},
                 {"keystone_field", to_json(ext.keystone_field)}};

        if (c_cmp->parsed()) {
            double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
            for (const Point2& q : inst.points) {
                lo_x = std::min(lo_x, q.x);
                hi_x = std::max(hi_x, q.x);
                lo_y = std::min(lo_y, q.y);
                hi_y = std::max(hi_y, q.y);
            }
            const double side =
                2.0 * std::max({hi_x - lo_x, hi_y - lo_y, 0.5});
            GridProblem prob;
            prob.box = Square({(lo_x + hi_x) / 2, (lo_y + hi_y) / 2}, side);
            prob.n = c.oracle_grid;
            prob.p = c.p;
            for (std::size_t i = 0; i < inst.points.size(); ++i)
                prob.constraints.emplace_back(inst.points[i], inst.values[i]);
            GridSolution gs = min_energy_2d(prob, c.exec);
            const double mroot = std::pow(ext.M_p, 1.0 / c.p);
            json cmp{{"M_p_root", mroot},
                     {"oracle_root", gs.energy_p_root},
                     {"ratio", gs.energy_p_root > 0 ? mroot / gs.energy_p_root
                                                    : 0.0}};
            write_text(o.output, cmp.dump(2) + "\n", out);
            return 0;
        }

        res["functional_report"] = report;
        write_text(o.output, res.dump(2) + "\n", out);
        return 0;
    }

    if (c_or->parsed()) {
        json j = load_json(o.input);
        const std::string type = j.value("type", "grid2d");
        if (type == "grid2d") {
            GridProblem prob;
            prob.box = square_from_json(j.at("box"));
            prob.n = j.value("n", cfg.oracle_grid);
            prob.p = j.value("p", cfg.p);
            for (const json& c : j.at("constraints"))
                prob.constraints.emplace_back(point2_from_json(c.at("at")),
                                              c.at("value").get<double>());
            if (j.contains("jet_constraints"))
                for (const json& c : j["jet_constraints"])
                    prob.jet_constraints.push_back(
                        {point2_from_json(c.at("at")),
                         c.at("value").get<double>(),
                         point2_from_json(c.at("grad"))});
            GridSolution sol = min_energy_2d(prob, cfg.exec);
            json res{{"energy_p_root", sol.energy_p_root},
                     {"outer_iterations", sol.outer_iterations}};
            write_text(o.output, res.dump(2) + "\n", out);
            return 0;
        }
        if (type == "besov1d") {
            double v = min_besov_1d(j.at("xs").get<std::vector<double>>(),
                                    j.at("values").get<std::vector<double>>(),
                                    j.value("p", cfg.p),
                                    j.value("n", 129), cfg.exec);
            write_text(o.output, json{{"value", v}}.dump(2) + "\n", out);
            return 0;
        }
        throw InvalidInput("oracle: unknown problem type '" + type + "'");
    }

    err << "no command dispatched\n";
    return 2;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
    try {
        return dispatch(args, out, err);
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return e.get_exit_code() == 0 ? 0 : 2;
    } catch (const ToleranceNotMet& e) {
        err << "tolerance not met: " << e.what()
            << " (best estimate: " << format_double(e.best_estimate) << ")\n";
        return 3;
    } catch (const InvalidInput& e) {
        err << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace sobtrace
