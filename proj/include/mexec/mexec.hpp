// Copyright 2026 The mexec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mexec/ast.hpp"
#include "mexec/cfg.hpp"
#include "mexec/distance.hpp"
#include "mexec/driver.hpp"
#include "mexec/error.hpp"
#include "mexec/interp.hpp"
#include "mexec/lexer.hpp"
#include "mexec/optimize.hpp"
#include "mexec/parser.hpp"
#include "mexec/printer.hpp"
#include "mexec/report.hpp"
#include "mexec/sampling.hpp"
#include "mexec/satcheck.hpp"
#include "mexec/saturation.hpp"
#include "mexec/transform.hpp"
