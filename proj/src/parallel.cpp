#include "gmcf/parallel.hpp"

namespace gmcf {

namespace {
int g_threads = 1;
}

void set_threads(int k) { g_threads = k < 0 ? 1 : k; }
int threads() { return g_threads; }

}  // namespace gmcf
