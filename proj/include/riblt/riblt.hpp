/*
   Copyright 2026 The riblt Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include "riblt/core.hpp"
#include "riblt/mapping.hpp"
#include "riblt/encoder.hpp"
#include "riblt/decoder.hpp"
#include "riblt/wire.hpp"
#include "riblt/session.hpp"
#include "riblt/baseline.hpp"
#include "riblt/analysis.hpp"
#include "riblt/setfile.hpp"
#include "riblt/sim.hpp"
