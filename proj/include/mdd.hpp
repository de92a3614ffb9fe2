// Copyright 2026 The MDD Toolkit Authors
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

#include "mdd/analysis.hpp"
#include "mdd/core.hpp"
#include "mdd/crosstalk.hpp"
#include "mdd/dd.hpp"
#include "mdd/determinant.hpp"
#include "mdd/errors.hpp"
#include "mdd/experiments.hpp"
#include "mdd/fcidump.hpp"
#include "mdd/filter.hpp"
#include "mdd/noise.hpp"
#include "mdd/parallel.hpp"
#include "mdd/recovery.hpp"
#include "mdd/rng.hpp"
#include "mdd/schedule.hpp"
#include "mdd/verify.hpp"
