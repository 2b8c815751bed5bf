// Copyright 2026 The occlear Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "occlear/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "occlear/error.hpp"

namespace occlear::simd {
namespace {

bool cpu_supports(Backend backend) {
  switch (backend) {
    case Backend::kScalar:
      return true;
    case Backend::kAvx2:
#if defined(__x86_64__) || defined(__i386__)
      return detail::avx2_table() != nullptr &&
             __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::kNeon:
      return detail::neon_table() != nullptr;
  }
  return false;
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{&kernels_for(detect_backend())};
  return slot;
}

}  // namespace

std::string_view to_string(Backend backend) {
  switch (backend) {
    case Backend::kScalar: return "scalar";
    case Backend::kAvx2: return "avx2";
    case Backend::kNeon: return "neon";
  }
  return "unknown";
}

bool backend_available(Backend backend) { return cpu_supports(backend); }

std::vector<Backend> available_backends() {
  std::vector<Backend> out;
  for (Backend b : {Backend::kScalar, Backend::kAvx2, Backend::kNeon}) {
    if (cpu_supports(b)) out.push_back(b);
  }
  return out;
}

const KernelTable& kernels_for(Backend backend) {
  if (!cpu_supports(backend)) {
    fail(ErrorCode::kInvalidArgument,
         "SIMD backend '" + std::string(to_string(backend)) +
             "' is not available on this machine");
  }
  switch (backend) {
    case Backend::kAvx2: return *detail::avx2_table();
    case Backend::kNeon: return *detail::neon_table();
    case Backend::kScalar: break;
  }
  return *detail::scalar_table();
}

Backend detect_backend() {
  if (const char* env = std::getenv("OCCLEAR_SIMD")) {
    const std::string_view want(env);
    for (Backend b : {Backend::kScalar, Backend::kAvx2, Backend::kNeon}) {
      if (want == to_string(b) && cpu_supports(b)) return b;
    }
  }
  if (cpu_supports(Backend::kAvx2)) return Backend::kAvx2;
  if (cpu_supports(Backend::kNeon)) return Backend::kNeon;
  return Backend::kScalar;
}

const KernelTable& active() {
  return *active_slot().load(std::memory_order_acquire);
}

void select_backend(Backend backend) {
  active_slot().store(&kernels_for(backend), std::memory_order_release);
}

}  // namespace occlear::simd
