// Copyright 2026 The ghzdistill Authors
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

#include "ghzdistill/decomposition.hpp"
#include "ghzdistill/errors.hpp"
#include "ghzdistill/fidelity_opt.hpp"
#include "ghzdistill/monotone_audit.hpp"
#include "ghzdistill/osbp_solver.hpp"
#include "ghzdistill/protocol_sim.hpp"
#include "ghzdistill/scalar_search.hpp"
#include "ghzdistill/tensor_core.hpp"
