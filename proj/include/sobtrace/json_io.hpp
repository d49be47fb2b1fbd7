#pragma once

#include <json.hpp>

#include "sobtrace/besov1d.hpp"
#include "sobtrace/config.hpp"
#include "sobtrace/cz.hpp"
#include "sobtrace/geometry.hpp"
#include "sobtrace/piecewise.hpp"

namespace sobtrace {

using nlohmann::json;

json to_json(const Point2& p);
json to_json(const Square& q);
json to_json(const Frame& f);
json to_json(const AffineJet& L);
json to_json(const WhitneyField& w);
json to_json(const LinearFunctional& l);
json to_json(const PiecewiseC11& f);
json to_json(const TraceNorm1D& t);
json to_json(const CZDecomposition& d);

Point2 point2_from_json(const json& j);
Square square_from_json(const json& j);
Frame frame_from_json(const json& j);
AffineJet jet_from_json(const json& j);
WhitneyField whitney_from_json(const json& j);
LinearFunctional functional_from_json(const json& j);
PiecewiseC11 piecewise_from_json(const json& j);

/// Instance files: {"points": [[x, y], ...], "values": [...], "p": real}.
struct Instance {
    std::vector<Point2> points;
    std::vector<double> values;
    std::optional<double> p;
};
Instance instance_from_json(const json& j);

Config config_from_json(const json& j, Config base = {});

/// 17 significant digits, reproducible.
std::string format_double(double v);
json dump_doubles(const std::vector<double>& v);

} // namespace sobtrace
