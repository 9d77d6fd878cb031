// Copyright 2026 The Looplab Authors.
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

#include "looplab/kernels.hpp"

#include <atomic>

#include "looplab/common.hpp"

namespace looplab::kernels {

namespace scalar {

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw ContractViolation("kernels::dot: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw ContractViolation("kernels::squared_distance: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double sum(std::span<const double> values) {
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc;
}

void axpy(double scale, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size())
    throw ContractViolation("kernels::axpy: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += scale * x[i];
}

}  // namespace scalar

namespace {

bool avx2_runtime_ok() {
#if defined(LOOPLAB_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend pick_default() {
  return avx2_runtime_ok() ? Backend::kAvx2 : Backend::kScalar;
}

std::atomic<Backend> g_active{pick_default()};

}  // namespace

bool supported(Backend backend) {
  switch (backend) {
    case Backend::kScalar:
      return true;
    case Backend::kAvx2:
      return avx2_runtime_ok();
  }
  return false;
}

Backend active() { return g_active.load(std::memory_order_relaxed); }

void use(Backend backend) {
  if (!supported(backend))
    throw ContractViolation("kernels::use: backend not supported on this cpu");
  g_active.store(backend, std::memory_order_relaxed);
}

std::string_view name(Backend backend) {
  switch (backend) {
    case Backend::kScalar:
      return "scalar";
    case Backend::kAvx2:
      return "avx2";
  }
  return "unknown";
}

double dot(std::span<const double> a, std::span<const double> b) {
#if defined(LOOPLAB_HAVE_AVX2_TU)
  if (active() == Backend::kAvx2) return avx2::dot(a, b);
#endif
  return scalar::dot(a, b);
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
#if defined(LOOPLAB_HAVE_AVX2_TU)
  if (active() == Backend::kAvx2) return avx2::squared_distance(a, b);
#endif
  return scalar::squared_distance(a, b);
}

double sum(std::span<const double> values) {
#if defined(LOOPLAB_HAVE_AVX2_TU)
  if (active() == Backend::kAvx2) return avx2::sum(values);
#endif
  return scalar::sum(values);
}

void axpy(double scale, std::span<const double> x, std::span<double> y) {
#if defined(LOOPLAB_HAVE_AVX2_TU)
  if (active() == Backend::kAvx2) return avx2::axpy(scale, x, y);
#endif
  return scalar::axpy(scale, x, y);
}

}  // namespace looplab::kernels
