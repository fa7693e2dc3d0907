#pragma once

// Core library: distributions, the lost-positions planner, decision products
// and calibration diagnostics. File formats live in io.hpp; the JSON
// payloads, service and CLI have their own headers.

#include "quotaplan/calibration.hpp"
#include "quotaplan/decision.hpp"
#include "quotaplan/errors.hpp"
#include "quotaplan/planner.hpp"
#include "quotaplan/pmf.hpp"
#include "quotaplan/rng.hpp"
#include "quotaplan/sample.hpp"
