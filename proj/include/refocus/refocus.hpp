// Copyright 2026 The Refocus Authors
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

// Umbrella header.

#include "refocus/errors.hpp"
#include "refocus/flatten.hpp"
#include "refocus/gateset.hpp"
#include "refocus/inverse_approx.hpp"
#include "refocus/json_io.hpp"
#include "refocus/matcore.hpp"
#include "refocus/net.hpp"
#include "refocus/parallel.hpp"
#include "refocus/pulse_sequence.hpp"
#include "refocus/qubit.hpp"
#include "refocus/qudit.hpp"
#include "refocus/refocus_map.hpp"
#include "refocus/solovay_kitaev.hpp"
#include "refocus/tolerances.hpp"
#include "refocus/trace.hpp"
#include "refocus/weyl.hpp"
