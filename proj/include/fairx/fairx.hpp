// Copyright 2026 The fairx Authors
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

#ifndef FAIRX_FAIRX_HPP
#define FAIRX_FAIRX_HPP

#include "fairx/equilibrium.hpp"
#include "fairx/levels.hpp"
#include "fairx/lex_decomposition.hpp"
#include "fairx/market.hpp"
#include "fairx/max_flow.hpp"
#include "fairx/maxmin_flow.hpp"
#include "fairx/rational.hpp"
#include "fairx/stability.hpp"
#include "fairx/structure_check.hpp"
#include "fairx/token_sim.hpp"

#endif  // FAIRX_FAIRX_HPP
