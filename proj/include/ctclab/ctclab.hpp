// Copyright 2026 The ctclab Authors
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

#include "ctclab/deutsch.hpp"
#include "ctclab/errors.hpp"
#include "ctclab/experiments.hpp"
#include "ctclab/json_io.hpp"
#include "ctclab/layout.hpp"
#include "ctclab/pctc.hpp"
#include "ctclab/qcore.hpp"
#include "ctclab/random.hpp"
#include "ctclab/report_io.hpp"
#include "ctclab/types.hpp"
