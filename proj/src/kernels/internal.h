/*
 * Copyright 2026 The SIFL Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SIFL_SRC_KERNELS_INTERNAL_H_
#define SIFL_SRC_KERNELS_INTERNAL_H_

#include "sifl/kernels.h"

namespace sifl::kernels::internal {

const KernelTable& scalar_table();
#if defined(SIFL_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(SIFL_HAVE_NEON)
const KernelTable& neon_table();
#endif

}  // namespace sifl::kernels::internal

#endif  // SIFL_SRC_KERNELS_INTERNAL_H_
