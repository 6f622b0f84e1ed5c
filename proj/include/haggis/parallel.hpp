#pragma once

namespace haggis {

// Applies the HAGGIS_THREADS cap (a positive integer) to the OpenMP runtime.
// Returns the effective max thread count.
int apply_thread_cap();

}  // namespace haggis
