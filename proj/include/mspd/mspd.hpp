/*
 * Copyright 2026 the mspd authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef MSPD_MSPD_HPP
#define MSPD_MSPD_HPP

// umbrella header

#include "mspd/adam.hpp"
#include "mspd/baselines.hpp"
#include "mspd/checkpoint.hpp"
#include "mspd/common.hpp"
#include "mspd/dataset.hpp"
#include "mspd/experiment.hpp"
#include "mspd/image.hpp"
#include "mspd/metrics.hpp"
#include "mspd/model.hpp"
#include "mspd/pattern.hpp"
#include "mspd/png_io.hpp"
#include "mspd/tensor.hpp"
#include "mspd/tensor_ops.hpp"
#include "mspd/train.hpp"

#endif  // MSPD_MSPD_HPP
