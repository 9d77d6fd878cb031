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

#pragma once

#include <span>
#include <string_view>

namespace looplab::kernels {

// Dense double-precision inner loops shared by the classifiers and the
// statistics code. Every kernel has a scalar reference implementation and,
// on x86-64 with AVX2+FMA, a vectorized variant. The backend is picked once
// at runtime and can be pinned explicitly (runs record which one was used).

enum class Backend { kScalar, kAvx2 };

bool supported(Backend backend);
Backend active();
void use(Backend backend);  // ContractViolation if unsupported on this host
std::string_view name(Backend backend);

double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> values);
/// y += scale * x
void axpy(double scale, std::span<const double> x, std::span<double> y);

// Reference kernels. Always available; the dispatched variants above are
// equivalence-tested against these.
namespace scalar {
double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> values);
void axpy(double scale, std::span<const double> x, std::span<double> y);
}  // namespace scalar

#if defined(LOOPLAB_HAVE_AVX2_TU)
namespace avx2 {
double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> values);
void axpy(double scale, std::span<const double> x, std::span<double> y);
}  // namespace avx2
#endif

}  // namespace looplab::kernels
