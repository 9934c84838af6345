// Copyright 2026 The qvx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "qvx/circuit.hpp"
#include "qvx/counts.hpp"
#include "qvx/errors.hpp"
#include "qvx/haar.hpp"
#include "qvx/harness.hpp"
#include "qvx/heavy_output.hpp"
#include "qvx/kak.hpp"
#include "qvx/linalg.hpp"
#include "qvx/parallel.hpp"
#include "qvx/qv_circuit.hpp"
#include "qvx/rng.hpp"
#include "qvx/serialization.hpp"
#include "qvx/sim.hpp"
#include "qvx/stats.hpp"
#include "qvx/zne.hpp"
