#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sobtrace/besov1d.hpp"
#include "sobtrace/kernels.hpp"

#define SOBTRACE_KERNEL(name) name##_omp
#if defined(_OPENMP)
#define SOBTRACE_FOR _Pragma("omp parallel for schedule(static)")
#else
#define SOBTRACE_FOR
#endif

#include "kernels_body.inc"
