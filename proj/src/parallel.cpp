#include "sggmech/parallel.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

namespace sggmech {

int worker_threads() {
  if (const char* env = std::getenv("SGG_MECH_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return omp_get_max_threads();
}

}  // namespace sggmech
