#pragma once

#include <vector>

#include "sobtrace/config.hpp"
#include "sobtrace/field.hpp"
#include "sobtrace/geometry.hpp"

// Data-parallel inner loops, each compiled twice: an OpenMP variant and a
// serial reference used by the tests and the benchmark. Reductions sum
// per-row partials sequentially, so both variants produce identical bits.

namespace sobtrace::kernels {

/// n x n nodal grid with spacing h; cell quantities live on interior nodes.
struct Grid2D {
    int n = 0;
    double h = 1.0;
    int nodes() const { return n * n; }
    int idx(int i, int j) const { return j * n + i; }
};

// Per-angle trace seminorm^p of the points projected onto the rotated
// u-axis; +infinity where two points collide in u but not in v.
std::vector<double> angle_profile_serial(const std::vector<Point2>& pts,
                                         const std::vector<double>& angles,
                                         double p);
std::vector<double> angle_profile_omp(const std::vector<Point2>& pts,
                                      const std::vector<double>& angles,
                                      double p);

// Midpoint-rule sum of |Hess F|_F^p over n x n cells of a box, one partial
// sum per cell row.
std::vector<double> hessian_rows_serial(const Field2D& F, const Square& box,
                                        int n, double p);
std::vector<double> hessian_rows_omp(const Field2D& F, const Square& box,
                                     int n, double p);

// Second differences (Dxx, Dxy, Dyy) per interior node.
void cell_hessians_serial(const Grid2D& g, const std::vector<double>& u,
                          std::vector<double>& dxx, std::vector<double>& dxy,
                          std::vector<double>& dyy);
void cell_hessians_omp(const Grid2D& g, const std::vector<double>& u,
                       std::vector<double>& dxx, std::vector<double>& dxy,
                       std::vector<double>& dyy);

// Discrete p-energy sum_cells (Dxx^2 + 2 Dxy^2 + Dyy^2)^{p/2} h^2.
double penergy_serial(const Grid2D& g, const std::vector<double>& dxx,
                      const std::vector<double>& dxy,
                      const std::vector<double>& dyy, double p);
double penergy_omp(const Grid2D& g, const std::vector<double>& dxx,
                   const std::vector<double>& dxy,
                   const std::vector<double>& dyy, double p);

// Gradient of the weighted quadratic energy: y = grad_u sum_c w_c q_c h^2,
// gathered per node from the adjacent cells' second differences.
void weighted_gather_serial(const Grid2D& g, const std::vector<double>& w,
                            const std::vector<double>& dxx,
                            const std::vector<double>& dxy,
                            const std::vector<double>& dyy,
                            std::vector<double>& y);
void weighted_gather_omp(const Grid2D& g, const std::vector<double>& w,
                         const std::vector<double>& dxx,
                         const std::vector<double>& dxy,
                         const std::vector<double>& dyy,
                         std::vector<double>& y);

// Dense pair kernels of the 1D Besov oracle (K is the symmetric n x n
// matrix of 2 h_i h_j |t_i - t_j|^{-p}, zero diagonal).
void pair_weights_serial(const std::vector<double>& s, double p, double eps,
                         std::vector<double>& w);
void pair_weights_omp(const std::vector<double>& s, double p, double eps,
                      std::vector<double>& w);
void pair_matvec_serial(const std::vector<double>& K,
                        const std::vector<double>& w,
                        const std::vector<double>& s, std::vector<double>& y);
void pair_matvec_omp(const std::vector<double>& K,
                     const std::vector<double>& w,
                     const std::vector<double>& s, std::vector<double>& y);
double pair_energy_serial(const std::vector<double>& K,
                          const std::vector<double>& s, double p);
double pair_energy_omp(const std::vector<double>& K,
                       const std::vector<double>& s, double p);

// ---- dispatchers ----

inline std::vector<double> angle_profile(const std::vector<Point2>& pts,
                                         const std::vector<double>& angles,
                                         double p, ExecPolicy e) {
    return e == ExecPolicy::OpenMP ? angle_profile_omp(pts, angles, p)
                                   : angle_profile_serial(pts, angles, p);
}
inline std::vector<double> hessian_rows(const Field2D& F, const Square& box,
                                        int n, double p, ExecPolicy e) {
    return e == ExecPolicy::OpenMP ? hessian_rows_omp(F, box, n, p)
                                   : hessian_rows_serial(F, box, n, p);
}
inline void cell_hessians(const Grid2D& g, const std::vector<double>& u,
                          std::vector<double>& dxx, std::vector<double>& dxy,
                          std::vector<double>& dyy, ExecPolicy e) {
    e == ExecPolicy::OpenMP ? cell_hessians_omp(g, u, dxx, dxy, dyy)
                            : cell_hessians_serial(g, u, dxx, dxy, dyy);
}
inline double penergy(const Grid2D& g, const std::vector<double>& dxx,
                      const std::vector<double>& dxy,
                      const std::vector<double>& dyy, double p, ExecPolicy e) {
    return e == ExecPolicy::OpenMP ? penergy_omp(g, dxx, dxy, dyy, p)
                                   : penergy_serial(g, dxx, dxy, dyy, p);
}
inline void weighted_gather(const Grid2D& g, const std::vector<double>& w,
                            const std::vector<double>& dxx,
                            const std::vector<double>& dxy,
                            const std::vector<double>& dyy,
                            std::vector<double>& y, ExecPolicy e) {
    e == ExecPolicy::OpenMP ? weighted_gather_omp(g, w, dxx, dxy, dyy, y)
                            : weighted_gather_serial(g, w, dxx, dxy, dyy, y);
}
inline void pair_weights(const std::vector<double>& s, double p, double eps,
                         std::vector<double>& w, ExecPolicy e) {
    e == ExecPolicy::OpenMP ? pair_weights_omp(s, p, eps, w)
                            : pair_weights_serial(s, p, eps, w);
}
inline void pair_matvec(const std::vector<double>& K,
                        const std::vector<double>& w,
                        const std::vector<double>& s, std::vector<double>& y,
                        ExecPolicy e) {
    e == ExecPolicy::OpenMP ? pair_matvec_omp(K, w, s, y)
                            : pair_matvec_serial(K, w, s, y);
}
inline double pair_energy(const std::vector<double>& K,
                          const std::vector<double>& s, double p,
                          ExecPolicy e) {
    return e == ExecPolicy::OpenMP ? pair_energy_omp(K, s, p)
                                   : pair_energy_serial(K, s, p);
}

} // namespace sobtrace::kernels
