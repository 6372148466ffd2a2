#pragma once

#include "triage/vitals/chrom.hpp"
#include "triage/vitals/estimators.hpp"
#include "triage/vitals/filter.hpp"
#include "triage/vitals/peaks.hpp"
#include "triage/vitals/series.hpp"
#include "triage/vitals/spectral.hpp"
#include "triage/vitals/synth.hpp"
#include "triage/vitals/thermal.hpp"
#include "triage/vitals/trace_io.hpp"
