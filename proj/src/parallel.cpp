#include "haggis/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

#include "haggis/util.hpp"

namespace haggis {

int apply_thread_cap() {
  const char* env = std::getenv("HAGGIS_THREADS");
  if (env && *env) {
    int cap = 0;
    try {
      cap = std::stoi(env);
    } catch (const std::exception&) {
      throw usage_error("HAGGIS_THREADS must be a positive integer");
    }
    if (cap < 1) throw usage_error("HAGGIS_THREADS must be a positive integer");
    omp_set_num_threads(cap);
  }
  return omp_get_max_threads();
}

}  // namespace haggis
