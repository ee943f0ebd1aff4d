#pragma once
//------------------------------------------------------------------------------
//
//   Copyright 2026 The patrec Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#include "patrec/binary_region.hpp"
#include "patrec/envelope.hpp"
#include "patrec/errors.hpp"
#include "patrec/gaussian_region.hpp"
#include "patrec/info_core.hpp"
#include "patrec/lemma_lab.hpp"
#include "patrec/numerics.hpp"
#include "patrec/rng.hpp"
#include "patrec/sim_code.hpp"
#include "patrec/surface_grid.hpp"
