#include "sobtrace/json_io.hpp"

#include <cstdio>

namespace sobtrace {

namespace {
json poly_to_json(const Poly1& p) {
    return json{{"anchor", p.anchor}, {"coef", p.coef}};
}
Poly1 poly_from_json(const json& j) {
    return Poly1(j.at("anchor").get<double>(),
                 j.at("coef").get<std::vector<double>>());
}
}  // namespace

json to_json(const Point2& p) { return json::array({p.x, p.y}); }

json to_json(const Square& q) {
    json j{{"center", to_json(q.center)}, {"side", q.side}};
    if (q.dyadic_addr)
        j["dyadic_addr"] = {{"level", q.dyadic_addr->level},
                            {"i", q.dyadic_addr->i},
                            {"j", q.dyadic_addr->j}};
    return j;
}

json to_json(const Frame& f) {
    return json{{"origin", to_json(f.origin)},
                {"e1", to_json(f.e1)},
                {"e2", to_json(f.e2)}};
}

json to_json(const AffineJet& L) {
    return json{{"base", to_json(L.base)},
                {"value", L.value},
                {"grad", to_json(L.grad)}};
}

json to_json(const WhitneyField& w) {
    json sites = json::array(), entries = json::array();
    for (const Point2& s : w.sites) sites.push_back(to_json(s));
    for (const AffineJet& L : w.entries) entries.push_back(to_json(L));
    return json{{"sites", sites}, {"entries", entries}};
}

json to_json(const LinearFunctional& l) {
    json cf = json::array(), cj = json::array();
    for (const auto& [site, c] : l.coeffs_f)
        cf.push_back(json{{"site", site}, {"c", c}});
    static const char* comps[] = {"value", "gx", "gy"};
    for (const auto& [key, c] : l.coeffs_jet)
        cj.push_back(json{{"jet", key.first},
                          {"component", comps[key.second]},
                          {"c", c}});
    return json{{"coeffs_f", cf},
                {"coeffs_jet", cj},
                {"offset_weight", l.offset_weight}};
}

json to_json(const PiecewiseC11& f) {
    json pieces = json::array();
    for (const Poly1& p : f.pieces) pieces.push_back(poly_to_json(p));
    return json{{"breakpoints", f.breakpoints},
                {"pieces", pieces},
                {"left_piece", poly_to_json(f.left_piece)},
                {"right_piece", poly_to_json(f.right_piece)}};
}

json to_json(const TraceNorm1D& t) {
    auto terms = [](const std::vector<NormTerm>& ts) {
        json out = json::array();
        for (const NormTerm& n : ts)
            out.push_back(json{{"functional", to_json(n.functional)},
                               {"weight", n.weight},
                               {"label", n.label}});
        return out;
    };
    return json{{"Mp", t.Mp},
                {"p", t.p},
                {"terms", terms(t.terms)},
                {"inhomogeneous_terms", terms(t.inhomogeneous_terms)}};
}

json to_json(const CZDecomposition& d) {
    json leaves = json::array();
    for (const Square& q : d.leaves) leaves.push_back(to_json(q));
    json xs = json::array();
    for (const Point2& x : d.x_nu) xs.push_back(to_json(x));
    json xsharp = json::array();
    for (const Point2& x : d.x_sharp) xsharp.push_back(to_json(x));
    json pairs = json::array();
    for (const auto& [key, v] : d.delta_pairs)
        pairs.push_back(json{{"mu", key.first}, {"mu2", key.second}, {"gap", v}});
    return json{{"root", to_json(d.root)},
                {"leaves", leaves},
                {"adjacency", d.adjacency},
                {"keystones", d.keystones},
                {"mu_of_nu", d.mu_of_nu},
                {"paths", d.paths},
                {"x_nu", xs},
                {"x_sharp", xsharp},
                {"E_nu", d.E_nu},
                {"E_sharp", d.E_sharp},
                {"delta_pairs", pairs},
                {"decay_constant", d.decay_constant}};
}

Point2 point2_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2)
        throw InvalidInput("point: expected [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

Square square_from_json(const json& j) {
    Square q(point2_from_json(j.at("center")), j.at("side").get<double>());
    if (j.contains("dyadic_addr")) {
        const json& a = j["dyadic_addr"];
        q.dyadic_addr = DyadicAddr{a.at("level").get<int>(),
                                   a.at("i").get<std::int64_t>(),
                                   a.at("j").get<std::int64_t>()};
    }
    return q;
}

Frame frame_from_json(const json& j) {
    Frame f;
    f.origin = point2_from_json(j.at("origin"));
    f.e1 = point2_from_json(j.at("e1"));
    f.e2 = point2_from_json(j.at("e2"));
    if (!f.valid()) throw InvalidInput("frame: axes not orthonormal");
    return f;
}

AffineJet jet_from_json(const json& j) {
    return AffineJet(point2_from_json(j.at("base")), j.at("value").get<double>(),
                     point2_from_json(j.at("grad")));
}

WhitneyField whitney_from_json(const json& j) {
    WhitneyField w;
    for (const json& s : j.at("sites")) w.sites.push_back(point2_from_json(s));
    for (const json& e : j.at("entries")) w.entries.push_back(jet_from_json(e));
    if (!w.consistent(1e-12))
        throw InvalidInput("whitney field: entry base != site");
    return w;
}

LinearFunctional functional_from_json(const json& j) {
    LinearFunctional l;
    for (const json& t : j.at("coeffs_f"))
        l.add_f(t.at("site").get<int>(), t.at("c").get<double>());
    for (const json& t : j.at("coeffs_jet")) {
        const std::string comp = t.at("component").get<std::string>();
        LinearFunctional::JetComponent c =
            comp == "value" ? LinearFunctional::kValue
            : comp == "gx"  ? LinearFunctional::kGx
                            : LinearFunctional::kGy;
        l.add_jet(t.at("jet").get<int>(), c, t.at("c").get<double>());
    }
    l.offset_weight = j.value("offset_weight", 1.0);
    return l;
}

PiecewiseC11 piecewise_from_json(const json& j) {
    PiecewiseC11 f;
    f.breakpoints = j.at("breakpoints").get<std::vector<double>>();
    for (const json& p : j.at("pieces")) f.pieces.push_back(poly_from_json(p));
    f.left_piece = poly_from_json(j.at("left_piece"));
    f.right_piece = poly_from_json(j.at("right_piece"));
    return f;
}

Instance instance_from_json(const json& j) {
    Instance inst;
    if (!j.contains("points")) throw InvalidInput("instance: missing 'points'");
    for (const json& p : j["points"]) inst.points.push_back(point2_from_json(p));
    if (j.contains("values"))
        inst.values = j["values"].get<std::vector<double>>();
    if (!inst.values.empty() && inst.values.size() != inst.points.size())
        throw InvalidInput("instance: 'values' length differs from 'points'");
    if (j.contains("p")) inst.p = j["p"].get<double>();
    return inst;
}

Config config_from_json(const json& j, Config base) {
    Config c = base;
    c.p = j.value("p", c.p);
    c.c1 = j.value("c1", c.c1);
    c.c2 = j.value("c2", c.c2);
    c.c3 = j.value("c3", c.c3);
    c.c4 = j.value("c4", c.c4);
    c.angle_count = j.value("angle_count", c.angle_count);
    c.quad_tol = j.value("quad_tol", c.quad_tol);
    c.oracle_grid = j.value("oracle_grid", c.oracle_grid);
    c.seed = j.value("seed", c.seed);
    if (j.contains("exec")) {
        const std::string e = j["exec"].get<std::string>();
        if (e == "serial") c.exec = ExecPolicy::Serial;
        else if (e == "openmp") c.exec = ExecPolicy::OpenMP;
        else throw InvalidInput("config: exec must be 'serial' or 'openmp'");
    }
    c.validate();
    return c;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json dump_doubles(const std::vector<double>& v) {
    json out = json::array();
    for (double x : v) out.push_back(x);
    return out;
}

} // namespace sobtrace
