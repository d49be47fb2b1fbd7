#pragma once

#include <cstdint>

#include "sobtrace/errors.hpp"

namespace sobtrace {

/// How the data-parallel kernels execute. Serial is the reference
/// implementation kept for testing; OpenMP is the default when available.
enum class ExecPolicy { Serial, OpenMP };

struct Config {
    double p = 4.0;

    // Smallness constants of the decomposition and the jet selection.
    // c3 is the one constant allowed to sit above the 1/100 ceiling.
    double c1 = 0.01;
    double c2 = 0.05;
    double c3 = 0.1;
    double c4 = 0.05;

    int angle_count = 256;          // frame-search grid for the set seminorm
    double quad_tol = 1e-6;         // Besov quadrature relative tolerance
    int oracle_grid = 64;           // nodes per side of the grid oracle
    std::uint64_t seed = 1;

    ExecPolicy exec = ExecPolicy::OpenMP;

    void validate() const {
        if (!(p > 2.0)) throw InvalidInput("config: p must exceed 2");
        if (!(c1 > 0 && c1 < 0.01 + 1e-15))
            throw InvalidInput("config: c1 out of (0, 1/100]");
        if (!(c2 > 0 && c2 < 1.0)) throw InvalidInput("config: c2 out of (0,1)");
        if (!(c3 > 0 && c3 < 1.0)) throw InvalidInput("config: c3 out of (0,1)");
        if (!(c4 > 0 && c4 < 1.0)) throw InvalidInput("config: c4 out of (0,1)");
        if (angle_count < 8) throw InvalidInput("config: angle_count < 8");
        if (!(quad_tol > 0)) throw InvalidInput("config: quad_tol <= 0");
        if (oracle_grid < 16) throw InvalidInput("config: oracle_grid < 16");
    }
};

} // namespace sobtrace
