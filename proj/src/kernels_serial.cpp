#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sobtrace/besov1d.hpp"
#include "sobtrace/kernels.hpp"

#define SOBTRACE_KERNEL(name) name##_serial
#define SOBTRACE_FOR

#include "kernels_body.inc"
