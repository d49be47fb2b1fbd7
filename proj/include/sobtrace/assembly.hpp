#pragma once

#include <memory>
#include <string>
#include <vector>

#include "sobtrace/config.hpp"
#include "sobtrace/cz.hpp"
#include "sobtrace/field.hpp"
#include "sobtrace/jets.hpp"
#include "sobtrace/local.hpp"

namespace sobtrace {

/// Normalized Whitney partition of unity over the CZ leaves: plateau bumps
/// supported just outside each leaf, divided by their sum (>= 1 on the root).
struct PartitionOfUnity {
    struct Data {
        std::vector<Square> supports;     // closed support boxes
        std::vector<FieldPtr> raw;        // un-normalized plateau bumps
        Square domain;                    // the root square
    };
    std::shared_ptr<const Data> data;

    FieldPtr theta(int nu) const;         // normalized weight field
    int size() const { return int(data->raw.size()); }
};

PartitionOfUnity build_pou(const CZDecomposition& d);

struct AssembleResult {
    FieldPtr field;                       // global extension (outer cutoff applied)
    FieldPtr patched;                     // sum theta_nu Fhat_nu, valid on the root
    AffineJet origin_jet;                 // jet of the patched field at 0
    double Mhat_p = 0.0;
    std::vector<LocalSolution> locals;    // one per leaf
    WhitneyField path_field;              // constant-path jets on E'
};

/// Patch the per-leaf local solutions for a given keystone Whitney field.
AssembleResult assemble(const std::vector<double>& f, const WhitneyField& Lsharp,
                        const CZDecomposition& d, const Config& cfg);

struct Extension {
    FieldPtr field;
    double Mhat_p = 0.0;
    double M_p = 0.0;
    std::vector<std::pair<std::string, double>> functional_report;
    std::size_t functional_count = 0;
    WhitneyField keystone_field;
    WhitneyField constant_path;
    std::shared_ptr<CZDecomposition> decomp;
};

/// The bounded linear extension operator: decomposition, keystone jets,
/// patching, and the norm functional M(f)^p, with the single-leaf case
/// handled by one local solve whose jet is chosen by l^p elimination.
Extension extend(const std::vector<double>& f, const std::vector<Point2>& E,
                 const Config& cfg);

} // namespace sobtrace
