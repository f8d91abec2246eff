// Copyright The holofredholm Authors
// SPDX-License-Identifier: Apache-2.0

#include "holofredholm/parallel.hpp"

#include <cstdlib>
#include <string>

namespace holofredholm {

int worker_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  if (const char* env = std::getenv("HOLOFREDHOLM_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1) n = std::min(n, cap);
    } catch (const std::exception&) {
      // Unparsable values leave the hardware default in place.
    }
  }
  return n;
}

}  // namespace holofredholm
