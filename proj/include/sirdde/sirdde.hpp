// Copyright (c) 2026 the sirdde authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sirdde/core.hpp"
#include "sirdde/csv.hpp"
#include "sirdde/diagnostics.hpp"
#include "sirdde/integrator.hpp"
#include "sirdde/models.hpp"
#include "sirdde/pde1d.hpp"
#include "sirdde/scenario.hpp"
#include "sirdde/stability.hpp"
