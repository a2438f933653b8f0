// Copyright 2026 The geoqc Authors
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

#include "geoqc/hilbert.hpp"
#include "geoqc/device.hpp"
#include "geoqc/device_config.hpp"
#include "geoqc/pulses.hpp"
#include "geoqc/evolve.hpp"
#include "geoqc/tomo.hpp"
#include "geoqc/clifford.hpp"
#include "geoqc/rb.hpp"
#include "geoqc/calib.hpp"
#include "geoqc/schedule_io.hpp"
